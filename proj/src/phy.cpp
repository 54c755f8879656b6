#include "ncrsim/phy.hpp"

#include <cmath>
#include <stdexcept>

#include "ncrsim/ncr.hpp"

namespace ncrsim {

double RadioParams::gnb_rb_dbm() const { return gnb_tx_dbm - 10.0 * std::log10(rb_count); }

double RadioParams::gnb_re_dbm() const {
  return gnb_tx_dbm - 10.0 * std::log10(static_cast<double>(rb_count) * subcarriers_per_rb);
}

double RadioParams::ue_rb_dbm() const { return ue_tx_dbm - 10.0 * std::log10(rb_count); }

double RadioParams::rb_noise_dbm() const {
  return noise_density_dbm_hz + 10.0 * std::log10(rb_bandwidth_hz) + noise_figure_db;
}

double RadioParams::carrier_noise_dbm() const {
  return noise_density_dbm_hz + 10.0 * std::log10(rb_bandwidth_hz * rb_count) + noise_figure_db;
}

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("MCS table is empty");
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (!(entries_[i].min_sinr_db > entries_[i - 1].min_sinr_db) ||
        !(entries_[i].spectral_efficiency > entries_[i - 1].spectral_efficiency))
      throw ConfigError("MCS table must be strictly increasing");
  }
}

McsTable McsTable::standard() {
  static const double kEff[] = {0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
                                2.4063, 2.7305, 3.0293, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};
  std::vector<McsEntry> e;
  for (double se : kEff) e.push_back({3.0 + 10.0 * std::log10(std::exp2(se) - 1.0), se});
  return McsTable(std::move(e));
}

int select_mcs(const McsTable& table, double sinr_db) {
  int mcs = kOutage;
  for (int i = 0; i < table.size(); ++i)
    if (table.threshold_db(i) <= sinr_db) mcs = i;
  return mcs;
}

std::int64_t tb_bits(const McsTable& table, int mcs, int n_rb, int subcarriers_per_rb, int symbols_per_slot) {
  if (mcs < 0 || n_rb <= 0) return 0;
  const double re = static_cast<double>(n_rb) * subcarriers_per_rb * symbols_per_slot;
  return static_cast<std::int64_t>(std::floor(table.efficiency(mcs) * re));
}

double rsrp_direct_dbm(double per_re_dbm, double gain_db) { return per_re_dbm + gain_db; }

double rsrp_forwarded_dbm(double per_re_dbm, double backhaul_gain_db, double ncr_gain_db, double access_gain_db) {
  return per_re_dbm + backhaul_gain_db + ncr_gain_db + access_gain_db;
}

int SlotAllocation::add(const UeGrant& g) {
  if (g.gnb < 0 || g.gnb >= gnb_count()) throw SimError("grant for unknown gNB " + std::to_string(g.gnb));
  if (g.rb_start < 0 || g.rb_len < 1 || g.rb_start + g.rb_len > rb_count)
    throw SimError("grant for UE " + std::to_string(g.ue) + " outside the carrier");
  const int id = static_cast<int>(grants.size());
  auto& row = owner[g.gnb];
  for (int r = g.rb_start; r < g.rb_start + g.rb_len; ++r) {
    if (row[r] >= 0)
      throw SimError("RB " + std::to_string(r) + " of gNB " + std::to_string(g.gnb) + " assigned twice");
    row[r] = id;
  }
  grants.push_back(g);
  return id;
}

SlotContext prepare_slot(const SlotAllocation& alloc, const GainView& view, const RadioParams& params,
                         std::span<const char> ncr_on, std::span<const int> controller) {
  if (!controller.empty() && controller.size() != ncr_on.size())
    throw std::invalid_argument("controller must have one entry per repeater");
  SlotContext ctx;
  ctx.alloc = &alloc;
  ctx.view = &view;
  ctx.params = params;
  ctx.gnb_rb_mw = db_to_lin(params.gnb_rb_dbm());
  ctx.rb_noise_mw = db_to_lin(params.rb_noise_dbm());
  ctx.ncr_count = static_cast<int>(ncr_on.size());
  ctx.ncrs.assign(ncr_on.size(), NcrSlot{});
  const int gnbs = alloc.gnb_count();
  const int rbs = alloc.rb_count;
  ctx.ncr_input.assign(ncr_on.size() * static_cast<std::size_t>(gnbs) * rbs, 0.0);
  const double carrier_noise_mw = db_to_lin(params.carrier_noise_dbm());

  for (int n = 0; n < ctx.ncr_count; ++n) {
    if (!ncr_on[n]) continue;
    double total = 0.0;
    for (int g = 0; g < gnbs; ++g) {
      double* in = ctx.ncr_input.data() + (static_cast<std::size_t>(n) * gnbs + g) * rbs;
      for (int r = 0; r < rbs; ++r) {
        const int id = alloc.owner[g][r];
        if (id < 0) continue;
        if (alloc.dir == Direction::dl) {
          in[r] = ctx.gnb_rb_mw * view.gnb_ncr(g, n, r);
        } else {
          const UeGrant& gr = alloc.grants[id];
          in[r] = gr.tx_rb_mw * view.ncr_ue(n, gr.ue, r);
        }
        total += in[r];
      }
    }
    NcrSlot& s = ctx.ncrs[n];
    s.on = true;
    s.controller = controller.empty() ? -1 : controller[n];
    s.input_dbm = lin_to_db(total + carrier_noise_mw);
    const ForwardResult f = capped_gain(s.input_dbm, params.ncr_gain_db, params.ncr_max_output_dbm);
    s.gain_db = f.effective_gain_db;
    s.gain_lin = db_to_lin(f.effective_gain_db);
    s.noise_out_rb_mw = ctx.rb_noise_mw * s.gain_lin;
  }
  return ctx;
}

SinrComponents sinr_dl(const SlotContext& ctx, const UeGrant& grant) {
  const SlotAllocation& a = *ctx.alloc;
  const GainView& v = *ctx.view;
  const int gnbs = a.gnb_count();
  SinrComponents c;
  for (int r = grant.rb_start; r < grant.rb_start + grant.rb_len; ++r) {
    for (int g = 0; g < gnbs; ++g) {
      if (a.owner[g][r] < 0) continue;
      const double p = ctx.gnb_rb_mw * v.gnb_ue(g, grant.ue, r);
      if (g != grant.gnb)
        c.direct_interf += p;
      else if (grant.ncr < 0)
        c.signal += p;
    }
    for (int n = 0; n < ctx.ncr_count; ++n) {
      const NcrSlot& s = ctx.ncrs[n];
      if (!s.on) continue;
      const double out = s.gain_lin * v.ncr_ue(n, grant.ue, r);
      // Repeaters of the serving cell only add noise to the UEs they serve.
      if (n == grant.ncr)
        c.ncr_noise += ctx.rb_noise_mw * out;
      else if (s.controller != grant.gnb)
        c.fwd_noise_interf += ctx.rb_noise_mw * out;
      for (int g = 0; g < gnbs; ++g) {
        const double in = ctx.input(n, g, r);
        if (in == 0.0) continue;
        if (g != grant.gnb)
          c.fwd_interf += in * out;
        else if (n == grant.ncr)
          c.signal += in * out;
      }
    }
    c.rx_noise += ctx.rb_noise_mw;
  }
  const double inv = 1.0 / grant.rb_len;
  c.signal *= inv;
  c.ncr_noise *= inv;
  c.rx_noise *= inv;
  c.direct_interf *= inv;
  c.fwd_interf *= inv;
  c.fwd_noise_interf *= inv;
  return c;
}

SinrComponents sinr_ul(const SlotContext& ctx, const UeGrant& grant) {
  const SlotAllocation& a = *ctx.alloc;
  const GainView& v = *ctx.view;
  const int gnbs = a.gnb_count();
  SinrComponents c;
  for (int r = grant.rb_start; r < grant.rb_start + grant.rb_len; ++r) {
    for (int g = 0; g < gnbs; ++g) {
      const int id = a.owner[g][r];
      if (id < 0) continue;
      const UeGrant& other = a.grants[id];
      const double p = other.tx_rb_mw * v.gnb_ue(grant.gnb, other.ue, r);
      if (g != grant.gnb)
        c.direct_interf += p;
      else if (grant.ncr < 0)
        c.signal += p;
    }
    for (int n = 0; n < ctx.ncr_count; ++n) {
      const NcrSlot& s = ctx.ncrs[n];
      if (!s.on) continue;
      const double out = s.gain_lin * v.gnb_ncr(grant.gnb, n, r);
      // Repeaters of the serving cell only add noise to the UEs they serve.
      if (n == grant.ncr)
        c.ncr_noise += ctx.rb_noise_mw * out;
      else if (s.controller != grant.gnb)
        c.fwd_noise_interf += ctx.rb_noise_mw * out;
      for (int g = 0; g < gnbs; ++g) {
        const double in = ctx.input(n, g, r);
        if (in == 0.0) continue;
        if (g != grant.gnb)
          c.fwd_interf += in * out;
        else if (n == grant.ncr)
          c.signal += in * out;
      }
    }
    c.rx_noise += ctx.rb_noise_mw;
  }
  const double inv = 1.0 / grant.rb_len;
  c.signal *= inv;
  c.ncr_noise *= inv;
  c.rx_noise *= inv;
  c.direct_interf *= inv;
  c.fwd_interf *= inv;
  c.fwd_noise_interf *= inv;
  return c;
}

}  // namespace ncrsim
