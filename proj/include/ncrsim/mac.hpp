#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ncrsim/channel.hpp"
#include "ncrsim/common.hpp"

namespace ncrsim {

/// Static, network-wide pattern: even slots DL, odd slots UL.
Direction tdd_direction(std::int64_t slot);

enum class SweepKind { backhaul, access, direct };

/// Backhaul sweeps happen once at slot 0 when `period` is 0.
bool sweep_due(SweepKind kind, std::int64_t slot, std::int64_t period);

struct BeamChoice {
  int beam = 0;
  double gain_lin = 0.0;
};

struct BeamPair {
  int beam_a = 0;
  int beam_b = 0;
  double gain_lin = 0.0;
};

/// Exhaustive search over end a's codebook with end b fixed (single-antenna
/// UEs have one "beam"), on RB-averaged gain.
BeamChoice sweep_beam_a(const Link& link, int beam_b = 0);
/// Exhaustive search over both codebooks (backhaul links).
BeamPair sweep_beam_pair(const Link& link);

struct Association {
  int ue = 0;
  int serving_gnb = -1;  // -1: outage
  int ncr = -1;          // -1: direct
  std::int64_t valid_from_slot = 0;
  double rsrp_dbm = kFloorDb;

  bool outage() const { return serving_gnb < 0; }
};

struct RsrpCandidate {
  int gnb = 0;
  int ncr = -1;
  double rsrp_dbm = kFloorDb;
};

inline constexpr double kOutageRsrpDbm = -140.0;

/// Serving gNB by best-path RSRP, then direct unless a repeater path is
/// strictly stronger. Lower ids win remaining ties.
Association associate(int ue, std::span<const RsrpCandidate> candidates, std::int64_t slot,
                      double outage_dbm = kOutageRsrpDbm);

struct TrafficParams {
  std::int64_t packet_bits = 3072;
  std::int64_t interarrival_slots = 4;
};

/// CBR backlog per (UE, direction). Arrivals and deliveries after the end of
/// the warm-up are also counted separately. Queues start empty when counting
/// starts, so counted deliveries never exceed counted arrivals.
class TrafficQueues {
 public:
  TrafficQueues(int ue_count, TrafficParams params = {});

  void step_traffic(std::int64_t slot);
  /// Drops the warm-up backlog and starts the counted totals from zero.
  void mark_warmup_end();

  std::int64_t backlog(int ue, Direction d) const { return backlog_[index(ue, d)]; }
  std::int64_t arrived(int ue, Direction d) const { return arrived_[index(ue, d)]; }
  std::int64_t delivered(int ue, Direction d) const { return delivered_[index(ue, d)]; }
  std::int64_t counted(int ue, Direction d) const { return counted_[index(ue, d)]; }
  std::int64_t counted_arrivals(int ue, Direction d) const { return counted_arrived_[index(ue, d)]; }

  struct Delivery {
    std::int64_t bits = 0;
    std::int64_t counted_bits = 0;
  };
  /// Removes min(backlog, capacity) bits.
  Delivery deliver(int ue, Direction d, std::int64_t capacity_bits);

  int ue_count() const { return ues_; }
  const TrafficParams& params() const { return params_; }

 private:
  std::size_t index(int ue, Direction d) const { return static_cast<std::size_t>(ue) * 2 + (d == Direction::dl ? 0 : 1); }

  int ues_;
  TrafficParams params_;
  std::vector<std::int64_t> backlog_;
  std::vector<std::int64_t> arrived_;
  std::vector<std::int64_t> counted_arrived_;
  std::vector<std::int64_t> delivered_;
  std::vector<std::int64_t> counted_;
  bool measuring_ = false;
};

/// Chunk sizes for k UEs sharing rb_count RBs; the first rb_count % k get one more.
std::vector<int> split_rbs(int k, int rb_count);

struct RbChunk {
  int ue = 0;
  int rb_start = 0;
  int rb_len = 0;
};

/// Round-robin order per direction: UEs sort by the time they were last
/// served (never-served first, then by id). Serving a UE sends it to the back.
class RoundRobin {
 public:
  explicit RoundRobin(int ue_count) : stamp_(static_cast<std::size_t>(ue_count) * 2, 0) {}

  /// Picks up to max_ues of `candidates` in round-robin order and splits the
  /// carrier among them contiguously. With `groups` (one per candidate), a
  /// group >= 0 is a repeater with a single access beam per slot, and `beams`
  /// holds each candidate's beam in it. Selection stops at the first UE whose
  /// repeater is already claimed with another beam, so the served set is
  /// always a prefix of the round-robin order.
  std::vector<RbChunk> schedule(Direction d, std::span<const int> candidates, int max_ues, int rb_count,
                                std::span<const int> groups = {}, std::span<const int> beams = {});

  std::uint64_t stamp(int ue, Direction d) const { return stamp_[index(ue, d)]; }

 private:
  std::size_t index(int ue, Direction d) const { return static_cast<std::size_t>(ue) * 2 + (d == Direction::dl ? 0 : 1); }

  std::vector<std::uint64_t> stamp_;
  std::uint64_t clock_[2] = {0, 0};
};

/// UEs of `gnb` with backlog in the slot's direction, then round-robin with
/// one forwarded UE per repeater.
/// `access_beam(ncr, ue)` gives the repeater beam of forwarded UEs.
std::vector<RbChunk> schedule_rbs(RoundRobin& rr, int gnb, std::span<const Association> associations,
                                  const TrafficQueues& queues, std::int64_t slot, int max_ues, int rb_count,
                                  const std::function<int(int, int)>& access_beam = {});

}  // namespace ncrsim
