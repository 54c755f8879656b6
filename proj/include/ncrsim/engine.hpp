#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ncrsim/channel.hpp"
#include "ncrsim/config.hpp"
#include "ncrsim/mac.hpp"
#include "ncrsim/metrics.hpp"
#include "ncrsim/ncr.hpp"
#include "ncrsim/phy.hpp"
#include "ncrsim/scenario.hpp"

namespace ncrsim {

struct TraceSinks {
  std::ostream* links = nullptr;
  std::ostream* alloc = nullptr;
};

/// Slot-driven simulation of one deployment. Per slot: mobility, channel
/// update, sweeps and association, traffic, scheduling, repeater control,
/// SINR, link adaptation and delivery, recording.
class Simulator {
 public:
  /// `cfg` must have been finalized.
  explicit Simulator(const RunConfig& cfg, TraceSinks traces = {});
  ~Simulator();

  void run();
  void step();

  std::int64_t slot() const { return slot_; }
  const MetricsStore& metrics() const { return metrics_; }
  MetricsStore take_metrics() { return std::move(metrics_); }

  const std::vector<UeMobilityState>& ue_states() const { return ues_; }
  /// Running hash over every UE position of every slot so far.
  std::uint64_t trajectory_digest() const { return trajectory_digest_; }
  const std::vector<Association>& associations() const { return assoc_; }
  const std::vector<NcrState>& ncr_states() const { return ncr_states_; }
  const ChannelModel& channel() const { return *channel_; }
  const SlotAllocation& last_allocation() const { return alloc_; }
  const SlotContext& last_context() const { return ctx_; }

  int direct_beam(int g, int u) const { return direct_beam_[static_cast<std::size_t>(g) * ue_count_ + u]; }
  int access_beam(int n, int u) const { return access_beam_[static_cast<std::size_t>(n) * ue_count_ + u]; }
  int gnb_backhaul_beam(int n) const { return gnb_bh_beam_[n]; }

 private:
  class View;

  void mobility();
  void sweeps();
  void schedule();
  void control_repeaters();
  void evaluate();
  void debug_checks();
  void close_fairness_windows();
  void trace_links();

  RunConfig cfg_;
  ScenarioConfig sc_;
  TraceSinks traces_;
  int gnb_count_;
  int ncr_count_;
  int ue_count_;
  int rb_count_;
  NodePanels panels_;
  std::unique_ptr<ChannelModel> channel_;
  McsTable mcs_;

  std::vector<UeMobilityState> ues_;
  std::vector<RngStream> mobility_rng_;
  std::vector<Vec2> last_refresh_;

  std::vector<NcrState> ncr_states_;
  std::vector<int> gnb_bh_beam_;
  std::vector<double> bh_table_;  // [(g * N + n) * beams + beam] * rbs + r
  int gnb_beams_ = 64;

  std::vector<int> direct_beam_;
  std::vector<int> access_beam_;
  std::vector<Association> assoc_;

  TrafficQueues queues_;
  RoundRobin rr_;

  std::int64_t slot_ = 0;
  SlotAllocation alloc_;
  std::vector<int> slot_gnb_beam_;  // [g * rbs + r]
  std::vector<int> slot_access_beam_;
  std::vector<char> ncr_on_;
  std::vector<int> ncr_controller_;
  SlotContext ctx_;
  std::vector<SinrComponents> sinr_out_;
  std::unique_ptr<View> view_;

  // Fairness windows: per (gnb, direction), counts since the last sweep.
  std::vector<std::vector<std::int64_t>> window_counts_;
  std::vector<char> window_saturated_;
  std::vector<std::int64_t> window_rounds_;

  std::uint64_t trajectory_digest_ = 0;
  MetricsStore metrics_;
};

MetricsStore run(const RunConfig& cfg);

}  // namespace ncrsim
