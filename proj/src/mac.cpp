#include "ncrsim/mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace ncrsim {

Direction tdd_direction(std::int64_t slot) { return slot % 2 == 0 ? Direction::dl : Direction::ul; }

bool sweep_due(SweepKind kind, std::int64_t slot, std::int64_t period) {
  if (period <= 0) return slot == 0;
  (void)kind;
  return slot % period == 0;
}

BeamChoice sweep_beam_a(const Link& link, int beam_b) {
  std::vector<double> g;
  link.wideband_gains_a(beam_b, g);
  const int b = argmax_beam(g);
  return {b, g[b]};
}

BeamPair sweep_beam_pair(const Link& link) {
  BeamPair best{0, 0, -1.0};
  std::vector<double> g;
  for (int bb = 0; bb < link.beams_b(); ++bb) {
    link.wideband_gains_a(bb, g);
    for (int ba = 0; ba < link.beams_a(); ++ba) {
      if (g[ba] > best.gain_lin) best = {ba, bb, g[ba]};
    }
  }
  return best;
}

Association associate(int ue, std::span<const RsrpCandidate> candidates, std::int64_t slot, double outage_dbm) {
  Association a;
  a.ue = ue;
  a.valid_from_slot = slot;
  for (const RsrpCandidate& c : candidates) {
    if (c.rsrp_dbm < outage_dbm) continue;
    bool better = false;
    if (a.serving_gnb < 0) {
      better = true;
    } else if (c.rsrp_dbm > a.rsrp_dbm) {
      better = true;
    } else if (c.rsrp_dbm == a.rsrp_dbm) {
      // Equal power: direct beats forwarded, then lower gNB id, then lower NCR id.
      const bool c_direct = c.ncr < 0;
      const bool a_direct = a.ncr < 0;
      if (c_direct != a_direct)
        better = c_direct;
      else if (c.gnb != a.serving_gnb)
        better = c.gnb < a.serving_gnb;
      else
        better = c.ncr < a.ncr;
    }
    if (better) {
      a.serving_gnb = c.gnb;
      a.ncr = c.ncr;
      a.rsrp_dbm = c.rsrp_dbm;
    }
  }
  return a;
}

TrafficQueues::TrafficQueues(int ue_count, TrafficParams params)
    : ues_(ue_count),
      params_(params),
      backlog_(static_cast<std::size_t>(ue_count) * 2, 0),
      arrived_(backlog_.size(), 0),
      counted_arrived_(backlog_.size(), 0),
      delivered_(backlog_.size(), 0),
      counted_(backlog_.size(), 0) {
  if (params.packet_bits < 0 || params.interarrival_slots < 1) throw ConfigError("invalid traffic parameters");
}

void TrafficQueues::step_traffic(std::int64_t slot) {
  if (slot % params_.interarrival_slots != 0) return;
  for (std::size_t i = 0; i < backlog_.size(); ++i) {
    backlog_[i] += params_.packet_bits;
    arrived_[i] += params_.packet_bits;
    if (measuring_) counted_arrived_[i] += params_.packet_bits;
  }
}

void TrafficQueues::mark_warmup_end() {
  measuring_ = true;
  std::fill(backlog_.begin(), backlog_.end(), 0);
  std::fill(counted_arrived_.begin(), counted_arrived_.end(), 0);
  std::fill(counted_.begin(), counted_.end(), 0);
}

TrafficQueues::Delivery TrafficQueues::deliver(int ue, Direction d, std::int64_t capacity_bits) {
  const std::size_t i = index(ue, d);
  Delivery out;
  out.bits = std::min(backlog_[i], std::max<std::int64_t>(capacity_bits, 0));
  backlog_[i] -= out.bits;
  delivered_[i] += out.bits;
  out.counted_bits = measuring_ ? out.bits : 0;
  counted_[i] += out.counted_bits;
  return out;
}

std::vector<int> split_rbs(int k, int rb_count) {
  if (k <= 0) return {};
  std::vector<int> sizes(k, rb_count / k);
  for (int i = 0; i < rb_count % k; ++i) ++sizes[i];
  return sizes;
}

std::vector<RbChunk> RoundRobin::schedule(Direction d, std::span<const int> candidates, int max_ues, int rb_count,
                                          std::span<const int> groups, std::span<const int> beams) {
  if (!groups.empty() && groups.size() != candidates.size())
    throw std::invalid_argument("groups must match candidates");
  if (!beams.empty() && beams.size() != candidates.size()) throw std::invalid_argument("beams must match candidates");
  std::vector<int> idx(candidates.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const auto sa = stamp(candidates[a], d);
    const auto sb = stamp(candidates[b], d);
    return sa != sb ? sa < sb : candidates[a] < candidates[b];
  });
  int k = std::min({static_cast<int>(idx.size()), max_ues, rb_count});
  if (!groups.empty()) {
    std::vector<std::pair<int, int>> taken;
    for (int i = 0; i < k; ++i) {
      const int g = groups[idx[i]];
      if (g < 0) continue;
      const int b = beams.empty() ? -1 : beams[idx[i]];
      auto it = std::find_if(taken.begin(), taken.end(), [&](const auto& t) { return t.first == g; });
      if (it == taken.end()) {
        taken.emplace_back(g, b);
      } else if (beams.empty() || it->second != b) {
        k = i;
        break;
      }
    }
  }
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = candidates[idx[i]];
  const std::vector<int> sizes = split_rbs(k, rb_count);
  std::vector<RbChunk> out;
  int start = 0;
  auto& clock = clock_[d == Direction::dl ? 0 : 1];
  for (int i = 0; i < k; ++i) {
    out.push_back({order[i], start, sizes[i]});
    start += sizes[i];
    stamp_[index(order[i], d)] = ++clock;
  }
  return out;
}

std::vector<RbChunk> schedule_rbs(RoundRobin& rr, int gnb, std::span<const Association> associations,
                                  const TrafficQueues& queues, std::int64_t slot, int max_ues, int rb_count,
                                  const std::function<int(int, int)>& access_beam) {
  const Direction d = tdd_direction(slot);
  std::vector<int> candidates;
  std::vector<int> groups;
  std::vector<int> beams;
  for (const Association& a : associations) {
    if (a.serving_gnb == gnb && queues.backlog(a.ue, d) > 0) {
      candidates.push_back(a.ue);
      groups.push_back(a.ncr);
      beams.push_back(a.ncr >= 0 && access_beam ? access_beam(a.ncr, a.ue) : -1);
    }
  }
  return rr.schedule(d, candidates, max_ues, rb_count, groups, access_beam ? std::span<const int>(beams) : std::span<const int>());
}

}  // namespace ncrsim
