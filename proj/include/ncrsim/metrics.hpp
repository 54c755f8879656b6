#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncrsim/common.hpp"
#include "ncrsim/phy.hpp"

namespace ncrsim {

struct SampleRecord {
  std::int64_t slot = 0;
  Direction dir = Direction::dl;
  LinkType link = LinkType::direct;
  int ue = 0;
  int gnb = 0;
  int ncr = -1;
  int rb_start = 0;
  int rb_len = 0;
  int mcs = kOutage;
  double sinr_db = 0.0;
};

/// Checks gathered when a run has debug checks enabled.
struct DebugStats {
  std::int64_t checked_slots = 0;
  std::int64_t rb_collisions = 0;
  std::int64_t saturated_windows = 0;
  std::int64_t max_fairness_gap = 0;
  double max_ncr_output_dbm = kFloorDb;
  std::int64_t ncr_on_slots = 0;
};

inline constexpr int kMcsSlots = 17;  // outage plus 16 MCS indices

struct MetricsStore {
  std::string scenario;
  bool ncr_enabled = false;
  std::uint64_t seed = 0;
  std::int64_t total_slots = 0;
  std::int64_t warmup_slots = 0;
  int ue_count = 0;
  double slot_s = 0.25e-3;
  std::string config_hash;

  std::vector<SampleRecord> samples;
  /// [direction][ue]; bits arrived and delivered after warm-up.
  std::array<std::vector<std::int64_t>, 2> counted_bits;
  std::array<std::vector<std::int64_t>, 2> counted_arrivals;
  /// [direction][mcs + 1]
  std::array<std::array<std::int64_t, kMcsSlots>, 2> mcs_usage{};
  /// Bits delivered per scheduled allocation, summed, post warm-up.
  std::array<std::int64_t, 2> delivered_by_allocations{0, 0};
  DebugStats debug;

  double measured_seconds() const { return static_cast<double>(total_slots - warmup_slots) * slot_s; }
};

inline int dir_index(Direction d) { return d == Direction::dl ? 0 : 1; }

/// Type-7 quantile: linear interpolation between closest ranks.
double percentile(std::span<const double> samples, double p);
/// Same, on data that is already sorted ascending.
double percentile_sorted(std::span<const double> sorted, double p);

/// Partition label of a sample: direct_wo_ncr, direct_w_ncr or forwarded.
std::string partition_label(bool ncr_enabled, LinkType link);

std::vector<double> sinr_values(const MetricsStore& store, Direction d, LinkType link);

/// Bits delivered after warm-up per UE divided by the post-warm-up run
/// time, in Mbit/s.
std::vector<double> per_ue_throughput(const MetricsStore& store, Direction d);

}  // namespace ncrsim
