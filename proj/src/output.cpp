#include "ncrsim/output.hpp"

#include <fstream>
#include "json.hpp"

#include "ncrsim/config.hpp"

namespace ncrsim {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void preflight_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw SimError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".ncr_sim_write_probe";
  {
    std::ofstream f(probe);
    if (!f || !(f << "x") || !f.flush()) throw SimError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

void write_sinr_samples(std::ostream& os, const MetricsStore& store) {
  os << "slot,direction,link_type,ue,serving_gnb,serving_ncr,sinr_db\n";
  for (const SampleRecord& s : store.samples) {
    os << s.slot << ',' << to_string(s.dir) << ',' << to_string(s.link) << ',' << s.ue << ',' << s.gnb << ','
       << s.ncr << ',' << format_double(s.sinr_db) << '\n';
  }
}

void write_throughput(std::ostream& os, const MetricsStore& store) {
  os << "ue,direction,mbit_s\n";
  for (Direction d : {Direction::dl, Direction::ul}) {
    const auto tp = per_ue_throughput(store, d);
    for (std::size_t u = 0; u < tp.size(); ++u) os << u << ',' << to_string(d) << ',' << format_double(tp[u]) << '\n';
  }
}

void write_mcs_usage(std::ostream& os, const MetricsStore& store) {
  os << "mcs,direction,count\n";
  for (Direction d : {Direction::dl, Direction::ul})
    for (int m = 0; m < kMcsSlots; ++m)
      os << m - 1 << ',' << to_string(d) << ',' << store.mcs_usage[dir_index(d)][m] << '\n';
}

namespace {

ojson percentile_block(std::vector<double> v) {
  ojson o;
  o["count"] = v.size();
  std::sort(v.begin(), v.end());
  for (double p : {10.0, 50.0, 90.0}) {
    const std::string key = "p" + std::to_string(static_cast<int>(p));
    if (v.empty())
      o[key] = nullptr;
    else
      o[key] = percentile_sorted(v, p);
  }
  return o;
}

}  // namespace

std::string summary_json(const MetricsStore& store) {
  ojson j;
  j["scenario"] = store.scenario;
  j["ncr"] = store.ncr_enabled ? "on" : "off";
  j["seed"] = store.seed;
  j["total_slots"] = store.total_slots;
  j["warmup_slots"] = store.warmup_slots;
  j["ue_count"] = store.ue_count;
  j["slot_s"] = store.slot_s;
  j["config_hash"] = store.config_hash;

  ojson sinr;
  ojson tput;
  for (Direction d : {Direction::dl, Direction::ul}) {
    ojson parts;
    parts[partition_label(store.ncr_enabled, LinkType::direct)] = percentile_block(sinr_values(store, d, LinkType::direct));
    if (store.ncr_enabled)
      parts[partition_label(true, LinkType::forwarded)] = percentile_block(sinr_values(store, d, LinkType::forwarded));
    sinr[to_string(d)] = parts;
    tput[to_string(d)] = percentile_block(per_ue_throughput(store, d));
  }
  j["sinr_db"] = sinr;
  j["throughput_mbit_s"] = tput;
  return j.dump(2) + "\n";
}

void emit(const MetricsStore& store, const fs::path& dir) {
  preflight_output_dir(dir);
  auto write = [&](const char* name, auto&& fn) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw SimError(std::string("cannot open ") + (dir / name).string());
    fn(f);
    if (!f) throw SimError(std::string("write failed: ") + (dir / name).string());
  };
  write("sinr_samples.csv", [&](std::ostream& os) { write_sinr_samples(os, store); });
  write("throughput.csv", [&](std::ostream& os) { write_throughput(os, store); });
  write("mcs_usage.csv", [&](std::ostream& os) { write_mcs_usage(os, store); });
  write("summary.json", [&](std::ostream& os) { os << summary_json(store); });
}

}  // namespace ncrsim
