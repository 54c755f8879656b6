#include "ncrsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncrsim {

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample set");
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile outside [0, 100]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double percentile(std::span<const double> samples, double p) {
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  return percentile_sorted(v, p);
}

std::string partition_label(bool ncr_enabled, LinkType link) {
  if (link == LinkType::forwarded) return "forwarded";
  return ncr_enabled ? "direct_w_ncr" : "direct_wo_ncr";
}

std::vector<double> sinr_values(const MetricsStore& store, Direction d, LinkType link) {
  std::vector<double> out;
  for (const SampleRecord& s : store.samples)
    if (s.dir == d && s.link == link) out.push_back(s.sinr_db);
  return out;
}

std::vector<double> per_ue_throughput(const MetricsStore& store, Direction d) {
  const auto& bits = store.counted_bits[dir_index(d)];
  const double secs = store.measured_seconds();
  std::vector<double> out;
  out.reserve(bits.size());
  for (std::int64_t b : bits) out.push_back(secs > 0.0 ? static_cast<double>(b) / secs / 1e6 : 0.0);
  return out;
}

}  // namespace ncrsim
