#include "ncrsim/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "ncrsim/kernels.hpp"

namespace ncrsim {

class Simulator::View final : public GainView {
 public:
  explicit View(const Simulator& s) : s_(s) {}

  double gnb_ue(int g, int u, int rb) const override {
    return s_.channel_->gnb_ue(g, u).gain(s_.slot_gnb_beam_[static_cast<std::size_t>(g) * s_.rb_count_ + rb], 0, rb);
  }
  double ncr_ue(int n, int u, int rb) const override {
    return s_.channel_->ncr_ue(n, u).gain(s_.slot_access_beam_[n], 0, rb);
  }
  double gnb_ncr(int g, int n, int rb) const override {
    const int beam = s_.slot_gnb_beam_[static_cast<std::size_t>(g) * s_.rb_count_ + rb];
    const std::size_t k = ((static_cast<std::size_t>(g) * s_.ncr_count_ + n) * s_.gnb_beams_ + beam) * s_.rb_count_ + rb;
    return s_.bh_table_[k];
  }

 private:
  const Simulator& s_;
};

Simulator::Simulator(const RunConfig& cfg, TraceSinks traces)
    : cfg_(cfg),
      sc_(cfg.scenario),
      traces_(traces),
      gnb_count_(static_cast<int>(cfg.scenario.gnbs.size())),
      ncr_count_(static_cast<int>(cfg.scenario.ncrs.size())),
      ue_count_(cfg.scenario.ue_count),
      rb_count_(cfg.scenario.rb_count),
      panels_(make_panels(cfg.scenario, deg_to_rad(cfg.downtilt_deg))),
      mcs_(McsTable::standard()),
      queues_(cfg.scenario.ue_count, cfg.traffic),
      rr_(cfg.scenario.ue_count) {
  if (sc_.gnbs.empty()) throw ConfigError("run config was not finalized");
  channel_ = std::make_unique<ChannelModel>(sc_, panels_, cfg_.channel, cfg_.seed);
  gnb_beams_ = panels_.gnb.empty() ? 1 : panels_.gnb.front().size();

  ues_ = spawn_ues(sc_, cfg_.seed);
  for (int u = 0; u < ue_count_; ++u) {
    mobility_rng_.emplace_back(cfg_.seed, RngPurpose::mobility, static_cast<std::uint64_t>(u));
    last_refresh_.push_back(ues_[u].position);
    channel_->refresh_ue(u, ues_[u]);
  }

  for (int n = 0; n < ncr_count_; ++n) {
    NcrState st(cfg_.radio.ncr_gain_db, cfg_.radio.ncr_max_output_dbm, panels_.ncr_ue_side[n].size());
    if (cfg_.auto_schedule) {
      // Keeps the repeater ON at sweep slots so forwarded paths can be measured.
      SideControlInfo sweep;
      sweep.kind = SciKind::periodic;
      sweep.periodicity_slots = cfg_.access_period_slots;
      sweep.entries.push_back({0, 1, 0});
      st = apply_sci(st, sweep);
    } else if (auto it = cfg_.sci.find(n); it != cfg_.sci.end()) {
      for (const SideControlInfo& s : it->second) st = apply_sci(st, s);
    }
    ncr_states_.push_back(std::move(st));
  }
  gnb_bh_beam_.assign(ncr_count_, 0);
  direct_beam_.assign(static_cast<std::size_t>(gnb_count_) * ue_count_, 0);
  access_beam_.assign(static_cast<std::size_t>(ncr_count_) * ue_count_, 0);
  assoc_.resize(ue_count_);
  for (int u = 0; u < ue_count_; ++u) assoc_[u].ue = u;
  slot_gnb_beam_.assign(static_cast<std::size_t>(gnb_count_) * rb_count_, 0);
  slot_access_beam_.assign(ncr_count_, 0);
  ncr_on_.assign(ncr_count_, 0);
  for (const NcrPlacement& p : sc_.ncrs) ncr_controller_.push_back(p.controlling_gnb);

  window_counts_.assign(static_cast<std::size_t>(gnb_count_) * 2, std::vector<std::int64_t>(ue_count_, 0));
  window_saturated_.assign(static_cast<std::size_t>(gnb_count_) * 2, 1);
  window_rounds_.assign(static_cast<std::size_t>(gnb_count_) * 2, 0);

  metrics_.scenario = to_string(cfg_.scenario_id);
  metrics_.ncr_enabled = cfg_.ncr_enabled;
  metrics_.seed = cfg_.seed;
  metrics_.total_slots = cfg_.total_slots;
  metrics_.warmup_slots = cfg_.warmup_slots;
  metrics_.ue_count = ue_count_;
  metrics_.slot_s = sc_.slot_s;
  metrics_.config_hash = config_hash(cfg_);

  view_ = std::make_unique<View>(*this);

  if (traces_.links != nullptr)
    *traces_.links << "slot,tx_kind,tx,rx_kind,rx,pathloss_db,shadowing_db,los,best_beam_gain_db\n";
  if (traces_.alloc != nullptr) *traces_.alloc << "slot,gnb,ue,rb_start,rb_len,direction,path\n";
}

Simulator::~Simulator() = default;

void Simulator::mobility() {
  for (int u = 0; u < ue_count_; ++u) {
    const Heading before = ues_[u].heading;
    ues_[u] = step_ue(ues_[u], sc_.slot_s, sc_.layout, mobility_rng_[u]);
    const Vec2 p = ues_[u].position;
    if (std::hypot(p.x - last_refresh_[u].x, p.y - last_refresh_[u].y) >= cfg_.refresh_distance_m) {
      channel_->refresh_ue(u, ues_[u]);
      last_refresh_[u] = p;
    } else if (ues_[u].heading != before) {
      channel_->set_ue_velocity(u, ues_[u]);
    }
  }
}

void Simulator::sweeps() {
  const std::int64_t s = slot_;
  const double per_re = cfg_.radio.gnb_re_dbm();

  if (sweep_due(SweepKind::backhaul, s, cfg_.backhaul_period_slots) && ncr_count_ > 0) {
    for (int n = 0; n < ncr_count_; ++n) {
      const int c = sc_.ncrs[n].controlling_gnb;
      const BeamPair bp = sweep_beam_pair(channel_->gnb_ncr(c, n));
      gnb_bh_beam_[n] = bp.beam_a;
      ncr_states_[n].set_backhaul_beam(bp.beam_b);
    }
    bh_table_.assign(static_cast<std::size_t>(gnb_count_) * ncr_count_ * gnb_beams_ * rb_count_, 0.0);
    for (int g = 0; g < gnb_count_; ++g) {
      for (int n = 0; n < ncr_count_; ++n) {
        const Link& l = channel_->gnb_ncr(g, n);
        const int bb = ncr_states_[n].backhaul_beam();
        for (int b = 0; b < gnb_beams_; ++b) {
          double* row = bh_table_.data() + ((static_cast<std::size_t>(g) * ncr_count_ + n) * gnb_beams_ + b) * rb_count_;
          for (int r = 0; r < rb_count_; ++r) row[r] = l.gain(b, bb, r);
        }
      }
    }
  }

  if (!sweep_due(SweepKind::access, s, cfg_.access_period_slots)) return;
  if (s > 0) close_fairness_windows();

  std::vector<double> direct_rsrp(static_cast<std::size_t>(gnb_count_) * ue_count_, kFloorDb);
  for (int g = 0; g < gnb_count_; ++g) {
    for (int u = 0; u < ue_count_; ++u) {
      const BeamChoice c = sweep_beam_a(channel_->gnb_ue(g, u));
      direct_beam_[static_cast<std::size_t>(g) * ue_count_ + u] = c.beam;
      direct_rsrp[static_cast<std::size_t>(g) * ue_count_ + u] = rsrp_direct_dbm(per_re, lin_to_db(c.gain_lin));
    }
  }

  std::vector<double> fwd_rsrp(static_cast<std::size_t>(ncr_count_) * ue_count_, kFloorDb);
  std::vector<char> measurable(ncr_count_, 0);
  const double carrier_noise_mw = db_to_lin(cfg_.radio.carrier_noise_dbm());
  for (int n = 0; n < ncr_count_; ++n) {
    // A repeater that is OFF at the sweep slot cannot be measured through.
    if (!ncr_states_[n].access_beam(s)) continue;
    measurable[n] = 1;
    const int c = sc_.ncrs[n].controlling_gnb;
    const double g_bh = channel_->gnb_ncr(c, n).wideband_gain(gnb_bh_beam_[n], ncr_states_[n].backhaul_beam());
    const double input = lin_to_db(db_to_lin(cfg_.radio.gnb_tx_dbm) * g_bh + carrier_noise_mw);
    const double g_eff = capped_gain(input, cfg_.radio.ncr_gain_db, cfg_.radio.ncr_max_output_dbm).effective_gain_db;
    for (int u = 0; u < ue_count_; ++u) {
      const BeamChoice a = sweep_beam_a(channel_->ncr_ue(n, u));
      access_beam_[static_cast<std::size_t>(n) * ue_count_ + u] = a.beam;
      fwd_rsrp[static_cast<std::size_t>(n) * ue_count_ + u] =
          rsrp_forwarded_dbm(per_re, lin_to_db(g_bh), g_eff, lin_to_db(a.gain_lin));
    }
  }

  std::vector<RsrpCandidate> cand;
  for (int u = 0; u < ue_count_; ++u) {
    cand.clear();
    for (int g = 0; g < gnb_count_; ++g) cand.push_back({g, -1, direct_rsrp[static_cast<std::size_t>(g) * ue_count_ + u]});
    for (int n = 0; n < ncr_count_; ++n)
      if (measurable[n])
        cand.push_back({sc_.ncrs[n].controlling_gnb, n, fwd_rsrp[static_cast<std::size_t>(n) * ue_count_ + u]});
    assoc_[u] = associate(u, cand, s, cfg_.outage_rsrp_dbm);
  }

  if (traces_.links != nullptr) trace_links();
}

void Simulator::trace_links() {
  std::ostream& os = *traces_.links;
  auto row = [&](const Link& l, double best) {
    os << slot_ << ',' << to_string(l.kind_a()) << ',' << l.id_a() << ',' << to_string(l.kind_b()) << ',' << l.id_b()
       << ',' << format_double(l.pathloss_db()) << ',' << format_double(l.shadowing_db()) << ',' << (l.los() ? 1 : 0)
       << ',' << format_double(best) << '\n';
  };
  for (int g = 0; g < gnb_count_; ++g)
    for (int u = 0; u < ue_count_; ++u) {
      const Link& l = channel_->gnb_ue(g, u);
      row(l, lin_to_db(l.wideband_gain(direct_beam(g, u), 0)));
    }
  for (int n = 0; n < ncr_count_; ++n)
    for (int u = 0; u < ue_count_; ++u) {
      const Link& l = channel_->ncr_ue(n, u);
      row(l, lin_to_db(l.wideband_gain(access_beam(n, u), 0)));
    }
  for (int g = 0; g < gnb_count_; ++g)
    for (int n = 0; n < ncr_count_; ++n) {
      const Link& l = channel_->gnb_ncr(g, n);
      const int bg = sc_.ncrs[n].controlling_gnb == g ? gnb_bh_beam_[n] : 0;
      row(l, lin_to_db(l.wideband_gain(bg, ncr_states_[n].backhaul_beam())));
    }
}

void Simulator::close_fairness_windows() {
  for (int g = 0; g < gnb_count_; ++g) {
    for (int d = 0; d < 2; ++d) {
      const std::size_t w = static_cast<std::size_t>(g) * 2 + d;
      auto& counts = window_counts_[w];
      if (window_saturated_[w] && window_rounds_[w] > 0) {
        std::int64_t lo = -1;
        std::int64_t hi = -1;
        for (const Association& a : assoc_) {
          if (a.serving_gnb != g) continue;
          const std::int64_t c = counts[a.ue];
          lo = lo < 0 ? c : std::min(lo, c);
          hi = std::max(hi, c);
        }
        if (hi >= 0) {
          ++metrics_.debug.saturated_windows;
          metrics_.debug.max_fairness_gap = std::max(metrics_.debug.max_fairness_gap, hi - lo);
        }
      }
      std::fill(counts.begin(), counts.end(), 0);
      window_saturated_[w] = 1;
      window_rounds_[w] = 0;
    }
  }
}

void Simulator::schedule() {
  const Direction dir = tdd_direction(slot_);
  alloc_ = SlotAllocation(dir, gnb_count_, rb_count_);
  const int d = dir_index(dir);
  for (int g = 0; g < gnb_count_; ++g) {
    const std::size_t w = static_cast<std::size_t>(g) * 2 + d;
    bool any = false;
    for (const Association& a : assoc_) {
      if (a.serving_gnb != g) continue;
      any = true;
      if (queues_.backlog(a.ue, dir) <= 0) window_saturated_[w] = 0;
    }
    if (any) ++window_rounds_[w];

    const auto chunks = schedule_rbs(rr_, g, assoc_, queues_, slot_, cfg_.max_ues_per_slot, rb_count_,
                                     [this](int n, int u) { return access_beam(n, u); });
    for (const RbChunk& c : chunks) {
      UeGrant gr;
      gr.ue = c.ue;
      gr.gnb = g;
      gr.ncr = assoc_[c.ue].ncr;
      gr.rb_start = c.rb_start;
      gr.rb_len = c.rb_len;
      gr.tx_rb_mw = dir == Direction::ul ? db_to_lin(cfg_.radio.ue_rb_dbm()) : 0.0;
      alloc_.add(gr);
      ++window_counts_[w][c.ue];
      const int beam = gr.ncr < 0 ? direct_beam(g, c.ue) : gnb_bh_beam_[gr.ncr];
      for (int r = c.rb_start; r < c.rb_start + c.rb_len; ++r)
        slot_gnb_beam_[static_cast<std::size_t>(g) * rb_count_ + r] = beam;
      if (traces_.alloc != nullptr) {
        *traces_.alloc << slot_ << ',' << g << ',' << c.ue << ',' << c.rb_start << ',' << c.rb_len << ','
                       << to_string(dir) << ',' << (gr.ncr < 0 ? std::string("direct") : "ncr" + std::to_string(gr.ncr))
                       << '\n';
      }
    }
  }
}

void Simulator::control_repeaters() {
  for (int n = 0; n < ncr_count_; ++n) {
    NcrState& st = ncr_states_[n];
    if (cfg_.auto_schedule) {
      SideControlInfo sci;
      sci.kind = SciKind::dynamic;
      sci.anchor_slot = slot_;
      for (const UeGrant& g : alloc_.grants) {
        if (g.ncr != n) continue;
        sci.entries.push_back({0, 1, access_beam(n, g.ue)});
        break;
      }
      st.set_slot(slot_);
      st = apply_sci(st, sci);
    } else {
      st.set_slot(slot_);
    }
    ncr_on_[n] = st.on() ? 1 : 0;
    slot_access_beam_[n] = st.on() ? *st.current_access_beam() : 0;
  }
}

void Simulator::evaluate() {
  ctx_ = prepare_slot(alloc_, *view_, cfg_.radio, ncr_on_, ncr_controller_);
  for (int n = 0; n < ncr_count_; ++n)
    if (ncr_on_[n]) ncr_states_[n].set_effective_gain_db(ctx_.ncrs[n].gain_db);

  sinr_out_.resize(alloc_.grants.size());
  if (cfg_.kernel == KernelKind::omp)
    sinr_batch_omp(ctx_, sinr_out_);
  else
    sinr_batch_serial(ctx_, sinr_out_);

  const bool record = slot_ >= cfg_.warmup_slots;
  const Direction dir = alloc_.dir;
  const int d = dir_index(dir);
  for (std::size_t i = 0; i < alloc_.grants.size(); ++i) {
    const UeGrant& g = alloc_.grants[i];
    const double sinr_db = sinr_out_[i].sinr_db();
    const int mcs = select_mcs(mcs_, sinr_db);
    const std::int64_t cap = tb_bits(mcs_, mcs, g.rb_len, sc_.subcarriers_per_rb, sc_.symbols_per_slot);
    const TrafficQueues::Delivery del = queues_.deliver(g.ue, dir, cap);
    if (!record) continue;
    SampleRecord rec;
    rec.slot = slot_;
    rec.dir = dir;
    rec.link = g.link_type();
    rec.ue = g.ue;
    rec.gnb = g.gnb;
    rec.ncr = g.ncr;
    rec.rb_start = g.rb_start;
    rec.rb_len = g.rb_len;
    rec.mcs = mcs;
    rec.sinr_db = sinr_db;
    metrics_.samples.push_back(rec);
    ++metrics_.mcs_usage[d][mcs + 1];
    metrics_.delivered_by_allocations[d] += del.counted_bits;
  }
}

void Simulator::debug_checks() {
  DebugStats& dbg = metrics_.debug;
  ++dbg.checked_slots;
  // Rebuilt from the grants alone, independent of the owner map.
  for (int g = 0; g < gnb_count_; ++g) {
    std::vector<int> used(rb_count_, 0);
    for (const UeGrant& gr : alloc_.grants) {
      if (gr.gnb != g) continue;
      for (int r = gr.rb_start; r < gr.rb_start + gr.rb_len; ++r)
        if (used[r]++ > 0) ++dbg.rb_collisions;
    }
  }
  for (int n = 0; n < ncr_count_; ++n) {
    if (!ncr_on_[n]) continue;
    ++dbg.ncr_on_slots;
    dbg.max_ncr_output_dbm = std::max(dbg.max_ncr_output_dbm, ctx_.ncrs[n].input_dbm + ctx_.ncrs[n].gain_db);
  }
}

void Simulator::step() {
  if (slot_ > 0) {
    mobility();
    channel_->advance(sc_.slot_s);
  }
  for (const UeMobilityState& s : ues_) {
    trajectory_digest_ = mix64(trajectory_digest_ ^ std::bit_cast<std::uint64_t>(s.position.x));
    trajectory_digest_ = mix64(trajectory_digest_ ^ std::bit_cast<std::uint64_t>(s.position.y));
  }
  sweeps();
  if (slot_ == cfg_.warmup_slots) queues_.mark_warmup_end();
  queues_.step_traffic(slot_);
  schedule();
  control_repeaters();
  evaluate();
  if (cfg_.debug_checks) debug_checks();
  ++slot_;
}

void Simulator::run() {
  while (slot_ < cfg_.total_slots) step();
  close_fairness_windows();
  for (int d = 0; d < 2; ++d) {
    const Direction dir = d == 0 ? Direction::dl : Direction::ul;
    metrics_.counted_bits[d].assign(ue_count_, 0);
    metrics_.counted_arrivals[d].assign(ue_count_, 0);
    for (int u = 0; u < ue_count_; ++u) {
      metrics_.counted_bits[d][u] = queues_.counted(u, dir);
      metrics_.counted_arrivals[d][u] = queues_.counted_arrivals(u, dir);
    }
  }
}

MetricsStore run(const RunConfig& cfg) {
  Simulator sim(cfg);
  sim.run();
  return sim.take_metrics();
}

}  // namespace ncrsim
