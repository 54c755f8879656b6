#include "ncrsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <openssl/evp.h>

namespace ncrsim {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

const std::set<std::string> kGnbFields = {"x", "y", "height_m", "azimuth_deg"};
const std::set<std::string> kNcrFields = {"x", "y", "height_m", "gnb_side_azimuth_deg", "ue_side_azimuth_deg",
                                          "controller"};

void add_sci(RunConfig& cfg, int ncr, const std::string& key, const std::string& value) {
  const auto f = split(value, ',');
  if (f.size() != 5) throw ConfigError("'" + key + "' expects kind,periodicity,offset,duration,beam");
  const SciKind kind = parse_sci_kind(f[0]);
  const std::int64_t period = parse_int(key, f[1]);
  SciEntry e{parse_int(key, f[2]), parse_int(key, f[3]), static_cast<int>(parse_int(key, f[4]))};
  auto& list = cfg.sci[ncr];
  for (SideControlInfo& s : list) {
    if (s.kind != kind) continue;
    if (s.periodicity_slots != period)
      throw ConfigError("'" + key + "': all " + to_string(kind) + " entries of ncr." + std::to_string(ncr) +
                        " must share one periodicity");
    s.entries.push_back(e);
    return;
  }
  SideControlInfo s;
  s.kind = kind;
  s.periodicity_slots = period;
  s.entries.push_back(e);
  list.push_back(s);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"scenario.id", [](RunConfig& c, const std::string&, const std::string& v) { c.scenario_id = parse_scenario_id(v); }},
      {"scenario.ncr", [](RunConfig& c, const std::string& k, const std::string& v) { c.ncr_enabled = parse_bool(k, v); }},
      {"run.seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto s = parse_int(k, v);
         if (s < 0) throw ConfigError("'run.seed' must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"run.slots", [](RunConfig& c, const std::string& k, const std::string& v) { c.total_slots = parse_int(k, v); }},
      {"run.warmup_slots", [](RunConfig& c, const std::string& k, const std::string& v) { c.warmup_slots = parse_int(k, v); }},
      {"run.kernel",
       [](RunConfig& c, const std::string&, const std::string& v) {
         if (v == "serial") c.kernel = KernelKind::serial;
         else if (v == "omp") c.kernel = KernelKind::omp;
         else throw ConfigError("'run.kernel' expects serial or omp");
       }},
      {"run.debug_checks", [](RunConfig& c, const std::string& k, const std::string& v) { c.debug_checks = parse_bool(k, v); }},
      {"ue.count", [](RunConfig& c, const std::string& k, const std::string& v) { c.ue_count = static_cast<int>(parse_int(k, v)); }},
      {"ue.speed_kmh", [](RunConfig& c, const std::string& k, const std::string& v) { c.ue_speed_kmh = parse_double(k, v); }},
      {"ue.height_m", [](RunConfig& c, const std::string& k, const std::string& v) { c.ue_height_m = parse_double(k, v); }},
      {"ue.tx_power_dbm", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.ue_tx_dbm = parse_double(k, v); }},
      {"gnb.tx_power_dbm", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.gnb_tx_dbm = parse_double(k, v); }},
      {"radio.carrier_ghz", [](RunConfig& c, const std::string& k, const std::string& v) { c.carrier_ghz = parse_double(k, v); }},
      {"radio.scs_khz", [](RunConfig& c, const std::string& k, const std::string& v) { c.scs_khz = parse_double(k, v); }},
      {"radio.rb_count", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.rb_count = static_cast<int>(parse_int(k, v)); }},
      {"radio.noise_figure_db", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.noise_figure_db = parse_double(k, v); }},
      {"radio.noise_density_dbm_hz", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.noise_density_dbm_hz = parse_double(k, v); }},
      {"antenna.downtilt_deg", [](RunConfig& c, const std::string& k, const std::string& v) { c.downtilt_deg = parse_double(k, v); }},
      {"channel.paths", [](RunConfig& c, const std::string& k, const std::string& v) { c.channel.path_count = static_cast<int>(parse_int(k, v)); }},
      {"channel.rician_k_db", [](RunConfig& c, const std::string& k, const std::string& v) { c.channel.rician_k_db = parse_double(k, v); }},
      {"channel.refresh_distance_m", [](RunConfig& c, const std::string& k, const std::string& v) { c.refresh_distance_m = parse_double(k, v); }},
      {"ncr.gain_db", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.ncr_gain_db = parse_double(k, v); }},
      {"ncr.max_output_dbm", [](RunConfig& c, const std::string& k, const std::string& v) { c.radio.ncr_max_output_dbm = parse_double(k, v); }},
      {"ncr.auto_schedule", [](RunConfig& c, const std::string& k, const std::string& v) { c.auto_schedule = parse_bool(k, v); }},
      {"sweep.access_period_slots", [](RunConfig& c, const std::string& k, const std::string& v) { c.access_period_slots = parse_int(k, v); }},
      {"sweep.backhaul_period_slots", [](RunConfig& c, const std::string& k, const std::string& v) { c.backhaul_period_slots = parse_int(k, v); }},
      {"mac.max_ues_per_slot", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_ues_per_slot = static_cast<int>(parse_int(k, v)); }},
      {"mac.outage_rsrp_dbm", [](RunConfig& c, const std::string& k, const std::string& v) { c.outage_rsrp_dbm = parse_double(k, v); }},
      {"traffic.packet_bits", [](RunConfig& c, const std::string& k, const std::string& v) { c.traffic.packet_bits = parse_int(k, v); }},
      {"traffic.interarrival_slots", [](RunConfig& c, const std::string& k, const std::string& v) { c.traffic.interarrival_slots = parse_int(k, v); }},
  };
  return m;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& m = setters();
  if (auto it = m.find(key); it != m.end()) {
    it->second(cfg, key, value);
    return;
  }
  const auto parts = split(key, '.');
  if (parts.size() >= 3 && (parts[0] == "gnb" || parts[0] == "ncr") && is_index(parts[1])) {
    const int idx = static_cast<int>(parse_int(key, parts[1]));
    if (parts[0] == "ncr" && parts.size() == 4 && parts[2] == "sci" && is_index(parts[3])) {
      add_sci(cfg, idx, key, value);
      return;
    }
    const auto& fields = parts[0] == "gnb" ? kGnbFields : kNcrFields;
    if (parts.size() == 3 && fields.count(parts[2]) != 0) {
      cfg.placements[key] = parse_double(key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

void finalize(RunConfig& cfg) {
  if (cfg.total_slots < 1) throw ConfigError("run.slots must be >= 1");
  if (cfg.warmup_slots < 0 || cfg.warmup_slots >= cfg.total_slots)
    throw ConfigError("run.warmup_slots must satisfy 0 <= warmup < slots");
  if (cfg.ue_count < 0) throw ConfigError("ue.count must be >= 0");
  if (cfg.ue_speed_kmh < 0.0) throw ConfigError("ue.speed_kmh must be >= 0");
  if (!(cfg.carrier_ghz > 0.0)) throw ConfigError("radio.carrier_ghz must be > 0");
  if (!(cfg.scs_khz > 0.0)) throw ConfigError("radio.scs_khz must be > 0");
  if (cfg.radio.rb_count < 1) throw ConfigError("radio.rb_count must be >= 1");
  if (cfg.max_ues_per_slot < 1) throw ConfigError("mac.max_ues_per_slot must be >= 1");
  if (cfg.access_period_slots < 1) throw ConfigError("sweep.access_period_slots must be >= 1");
  if (cfg.backhaul_period_slots < 0) throw ConfigError("sweep.backhaul_period_slots must be >= 0");
  if (!(cfg.refresh_distance_m > 0.0)) throw ConfigError("channel.refresh_distance_m must be > 0");
  if (cfg.traffic.packet_bits < 0) throw ConfigError("traffic.packet_bits must be >= 0");
  if (cfg.traffic.interarrival_slots < 1) throw ConfigError("traffic.interarrival_slots must be >= 1");
  if (cfg.channel.path_count < 1) throw ConfigError("channel.paths must be >= 1");

  PlacementOverrides overrides;
  for (const auto& [k, v] : cfg.placements)
    if (cfg.ncr_enabled || k.rfind("ncr.", 0) != 0) overrides[k] = v;
  ScenarioConfig sc = build_scenario(cfg.scenario_id, cfg.ncr_enabled, &overrides);
  sc.ue_count = cfg.ue_count;
  sc.rb_count = cfg.radio.rb_count;
  sc.carrier_hz = cfg.carrier_ghz * 1e9;
  sc.scs_hz = cfg.scs_khz * 1e3;
  sc.slot_s = 1e-3 * 15.0 / cfg.scs_khz;
  sc.ue_speed_mps = cfg.ue_speed_kmh / 3.6;
  sc.ue_height_m = cfg.ue_height_m;
  sc.symbols_per_slot = cfg.radio.symbols_per_slot;
  sc.subcarriers_per_rb = cfg.radio.subcarriers_per_rb;
  validate_scenario(sc);

  cfg.radio.rb_bandwidth_hz = sc.rb_bandwidth_hz();
  cfg.channel.carrier_hz = sc.carrier_hz;
  cfg.channel.rb_bandwidth_hz = sc.rb_bandwidth_hz();
  cfg.channel.rb_count = sc.rb_count;

  if (cfg.ncr_enabled) {
    for (const auto& [n, list] : cfg.sci) {
      if (n < 0 || n >= static_cast<int>(sc.ncrs.size()))
        throw ConfigError("SCI given for ncr." + std::to_string(n) + " which does not exist");
      for (const SideControlInfo& s : list) validate_sci(s, 64);
    }
  }
  cfg.scenario = std::move(sc);
}

std::string canonical_config(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["scenario.id"] = to_string(c.scenario_id);
  kv["scenario.ncr"] = c.ncr_enabled ? "on" : "off";
  kv["run.seed"] = std::to_string(c.seed);
  kv["run.slots"] = std::to_string(c.total_slots);
  kv["run.warmup_slots"] = std::to_string(c.warmup_slots);
  kv["ue.count"] = std::to_string(c.ue_count);
  kv["ue.speed_kmh"] = format_double(c.ue_speed_kmh);
  kv["ue.height_m"] = format_double(c.ue_height_m);
  kv["ue.tx_power_dbm"] = format_double(c.radio.ue_tx_dbm);
  kv["gnb.tx_power_dbm"] = format_double(c.radio.gnb_tx_dbm);
  kv["radio.carrier_ghz"] = format_double(c.carrier_ghz);
  kv["radio.scs_khz"] = format_double(c.scs_khz);
  kv["radio.rb_count"] = std::to_string(c.radio.rb_count);
  kv["radio.noise_figure_db"] = format_double(c.radio.noise_figure_db);
  kv["radio.noise_density_dbm_hz"] = format_double(c.radio.noise_density_dbm_hz);
  kv["antenna.downtilt_deg"] = format_double(c.downtilt_deg);
  kv["channel.paths"] = std::to_string(c.channel.path_count);
  kv["channel.rician_k_db"] = format_double(c.channel.rician_k_db);
  kv["channel.refresh_distance_m"] = format_double(c.refresh_distance_m);
  kv["ncr.gain_db"] = format_double(c.radio.ncr_gain_db);
  kv["ncr.max_output_dbm"] = format_double(c.radio.ncr_max_output_dbm);
  kv["ncr.auto_schedule"] = c.auto_schedule ? "true" : "false";
  kv["sweep.access_period_slots"] = std::to_string(c.access_period_slots);
  kv["sweep.backhaul_period_slots"] = std::to_string(c.backhaul_period_slots);
  kv["mac.max_ues_per_slot"] = std::to_string(c.max_ues_per_slot);
  kv["mac.outage_rsrp_dbm"] = format_double(c.outage_rsrp_dbm);
  kv["traffic.packet_bits"] = std::to_string(c.traffic.packet_bits);
  kv["traffic.interarrival_slots"] = std::to_string(c.traffic.interarrival_slots);
  for (const auto& [k, v] : c.placements) kv[k] = format_double(v);
  for (const auto& [n, list] : c.sci) {
    int j = 0;
    for (const SideControlInfo& s : list) {
      for (const SciEntry& e : s.entries) {
        kv["ncr." + std::to_string(n) + ".sci." + std::to_string(j++)] =
            std::string(to_string(s.kind)) + "," + std::to_string(s.periodicity_slots) + "," +
            std::to_string(e.offset) + "," + std::to_string(e.duration) + "," + std::to_string(e.beam);
      }
    }
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw SimError("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw SimError("SHA-1 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) { return git_blob_sha1(canonical_config(cfg)); }

}  // namespace ncrsim
