#include "ncrsim/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "ncrsim/common.hpp"
#include "ncrsim/rng.hpp"

namespace ncrsim {

const char* to_string(Profile p) { return p == Profile::UMa ? "UMa" : "UMi"; }

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::gnb: return "gnb";
    case NodeKind::ncr: return "ncr";
    case NodeKind::ue: return "ue";
  }
  return "?";
}

Profile assign_profile(NodeKind tx, NodeKind rx) {
  if (tx == rx) throw std::invalid_argument(std::string("no ") + to_string(tx) + "-" + to_string(rx) + " link in the model");
  if (tx == NodeKind::gnb || rx == NodeKind::gnb) return Profile::UMa;
  return Profile::UMi;
}

namespace {
std::atomic<std::uint64_t> g_clamped{0};
}

std::uint64_t pathloss_clamp_count() { return g_clamped.load(); }

double free_space_loss_db(double d3d_m, double fc_ghz) {
  return 32.4 + 20.0 * std::log10(std::max(d3d_m, 1.0)) + 20.0 * std::log10(fc_ghz);
}

double pathloss_db(Profile profile, bool los, double d3d_m, double fc_ghz, double ue_height_m) {
  if (d3d_m < 1.0) {
    if (g_clamped.fetch_add(1) == 0)
      std::cerr << "warning: link distance " << d3d_m << " m below 1 m, clamped\n";
    d3d_m = 1.0;
  }
  const double ld = std::log10(d3d_m);
  const double lf = std::log10(fc_ghz);
  if (profile == Profile::UMa) {
    const double pl_los = 28.0 + 22.0 * ld + 20.0 * lf;
    if (los) return pl_los;
    return std::max(pl_los, 13.54 + 39.08 * ld + 20.0 * lf - 0.6 * (ue_height_m - 1.5));
  }
  const double pl_los = 32.4 + 21.0 * ld + 20.0 * lf;
  if (los) return pl_los;
  return std::max(pl_los, 22.4 + 35.3 * ld + 21.3 * lf - 0.3 * (ue_height_m - 1.5));
}

double shadowing_sigma_db(Profile profile, bool los) {
  if (profile == Profile::UMa) return los ? 4.0 : 6.0;
  return los ? 4.0 : 7.8;
}

double correlation_distance_m(Profile profile) { return profile == Profile::UMa ? 37.0 : 13.0; }

// ---------------------------------------------------------------------------
// Shadowing field

ShadowingField::ShadowingField(std::uint64_t seed, std::uint64_t field_id, Profile profile, Rect extent,
                               double max_step_m)
    : ShadowingField(seed, field_id, correlation_distance_m(profile), extent, max_step_m) {
  profile_ = profile;
}

ShadowingField::ShadowingField(std::uint64_t seed, std::uint64_t field_id, double corr_m, Rect extent,
                               double max_step_m)
    : extent_(extent) {
  if (!(corr_m > 0.0) || !(max_step_m > 0.0)) throw std::invalid_argument("shadowing field needs positive scales");
  step_ = corr_m / std::ceil(corr_m / max_step_m);
  nx_ = static_cast<int>(std::ceil((extent.x1 - extent.x0) / step_)) + 1;
  ny_ = static_cast<int>(std::ceil((extent.y1 - extent.y0) / step_)) + 1;
  grid_.resize(static_cast<std::size_t>(nx_) * ny_);

  RngStream rng(seed, RngPurpose::shadowing, field_id);
  for (double& v : grid_) v = rng.normal();

  // First-order autoregression along each axis keeps unit variance and gives
  // correlation rho^lag = exp(-distance / corr_m) per axis.
  const double rho = std::exp(-step_ / corr_m);
  const double innov = std::sqrt(1.0 - rho * rho);
  for (int iy = 0; iy < ny_; ++iy) {
    double* row = grid_.data() + static_cast<std::size_t>(iy) * nx_;
    for (int ix = 1; ix < nx_; ++ix) row[ix] = rho * row[ix - 1] + innov * row[ix];
  }
  for (int iy = 1; iy < ny_; ++iy) {
    double* row = grid_.data() + static_cast<std::size_t>(iy) * nx_;
    const double* prev = row - nx_;
    for (int ix = 0; ix < nx_; ++ix) row[ix] = rho * prev[ix] + innov * row[ix];
  }
}

double ShadowingField::unit(Vec2 p) const {
  const double fx = std::clamp((p.x - extent_.x0) / step_, 0.0, static_cast<double>(nx_ - 1));
  const double fy = std::clamp((p.y - extent_.y0) / step_, 0.0, static_cast<double>(ny_ - 1));
  const int ix = std::min(static_cast<int>(fx), nx_ - 2 < 0 ? 0 : nx_ - 2);
  const int iy = std::min(static_cast<int>(fy), ny_ - 2 < 0 ? 0 : ny_ - 2);
  const double tx = fx - ix;
  const double ty = fy - iy;
  const int ix1 = std::min(ix + 1, nx_ - 1);
  const int iy1 = std::min(iy + 1, ny_ - 1);
  const double v00 = at_node(ix, iy);
  const double v10 = at_node(ix1, iy);
  const double v01 = at_node(ix, iy1);
  const double v11 = at_node(ix1, iy1);
  return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

// ---------------------------------------------------------------------------
// Link

namespace {

struct Spread {
  double asd;
  double zsd;
  double asa;
  double zsa;
};

// Per-path angle offset standard deviations in degrees.
Spread angle_spread(Profile p, bool los) {
  if (p == Profile::UMa) return los ? Spread{15, 3, 55, 8} : Spread{20, 5, 50, 10};
  return los ? Spread{15, 5, 45, 8} : Spread{25, 7, 50, 10};
}

constexpr double kHalfPi = kPi / 2.0;

Angles offset(Angles base, Angles unit_off, double az_sd_deg, double el_sd_deg) {
  return {wrap_angle(base.az + deg_to_rad(az_sd_deg) * unit_off.az),
          std::clamp(base.el + deg_to_rad(el_sd_deg) * unit_off.el, -kHalfPi, kHalfPi)};
}

std::uint64_t node_key(NodeKind k, int id) {
  return static_cast<std::uint64_t>(k) * 100000ULL + static_cast<std::uint64_t>(id);
}

}  // namespace

Angles geometric_angles(const Vec3& from, const Vec3& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dz = to.z - from.z;
  return {std::atan2(dy, dx), std::atan2(dz, std::hypot(dx, dy))};
}

double heading_angle(Heading h) {
  const Vec2 v = heading_vector(h);
  return std::atan2(v.y, v.x);
}

Link::Link(NodeKind kind_a, int id_a, NodeKind kind_b, int id_b, const ArrayConfig& panel_a,
           const ArrayConfig& panel_b, const ChannelParams& params, std::uint64_t seed)
    : kind_a_(kind_a),
      kind_b_(kind_b),
      id_a_(id_a),
      id_b_(id_b),
      profile_(assign_profile(kind_a, kind_b)),
      panel_a_(panel_a),
      panel_b_(panel_b),
      paths_(params.path_count),
      rbs_(params.rb_count),
      beams_a_(panel_a.size()),
      beams_b_(panel_b.size()),
      k_factor_(db_to_lin(params.rician_k_db)),
      carrier_hz_(params.carrier_hz),
      rb_bw_(params.rb_bandwidth_hz) {
  if (paths_ < 1) throw ConfigError("channel.paths must be >= 1");
  if (rbs_ < 1) throw ConfigError("radio.rb_count must be >= 1");
  RngStream rng(seed, RngPurpose::paths, node_key(kind_a, id_a), node_key(kind_b, id_b));
  dep_off_.resize(paths_);
  arr_off_.resize(paths_);
  weight_.resize(paths_);
  phase0_.resize(paths_);
  delay_.resize(paths_);
  for (int l = 0; l < paths_; ++l) {
    dep_off_[l] = {rng.normal(), rng.normal()};
    arr_off_[l] = {rng.normal(), rng.normal()};
    weight_[l] = -std::log(1.0 - rng.uniform());
    phase0_[l] = rng.uniform(0.0, 2.0 * kPi);
    delay_[l] = rng.uniform(0.0, params.max_scatter_delay_s);
  }
  rb_phase_.resize(static_cast<std::size_t>(paths_) * rbs_);
  for (double& ph : rb_phase_) ph = rng.uniform(0.0, 2.0 * kPi);

  dep_.resize(paths_);
  arr_.resize(paths_);
  power_.assign(paths_, 0.0);
  base_.assign(static_cast<std::size_t>(paths_) * rbs_, 0.0);
  doppler_.assign(paths_, 0.0);
  step_.assign(paths_, 1.0);
  rot_.assign(paths_, 1.0);
  fa_.assign(static_cast<std::size_t>(paths_) * beams_a_, 0.0);
  fb_.assign(static_cast<std::size_t>(paths_) * beams_b_, 0.0);
  gram_ = Eigen::MatrixXcd::Zero(paths_, paths_);
}

void Link::refresh(const LinkGeometry& g) {
  const bool los_changed = !refreshed_ || g.los != los_;
  los_ = g.los;
  const double dx = g.b.x - g.a.x;
  const double dy = g.b.y - g.a.y;
  const double dz = g.b.z - g.a.z;
  d3d_ = std::sqrt(dx * dx + dy * dy + dz * dz);
  pathloss_db_ = ncrsim::pathloss_db(profile_, los_, d3d_, carrier_hz_ / 1e9, g.ue_height_m);
  shadowing_db_ = g.shadowing_db;
  large_scale_lin_ = db_to_lin(-(pathloss_db_ + shadowing_db_));

  const Angles los_dep = geometric_angles(g.a, g.b);
  const Angles los_arr = geometric_angles(g.b, g.a);
  const Spread s = angle_spread(profile_, los_);
  for (int l = 0; l < paths_; ++l) {
    if (los_ && l == 0) {
      dep_[l] = los_dep;
      arr_[l] = los_arr;
    } else {
      dep_[l] = offset(los_dep, dep_off_[l], s.asd, s.zsd);
      arr_[l] = offset(los_arr, arr_off_[l], s.asa, s.zsa);
    }
  }

  if (los_changed) {
    double scatter = 0.0;
    for (int l = los_ ? 1 : 0; l < paths_; ++l) scatter += weight_[l];
    const double los_fraction = los_ ? (paths_ == 1 ? 1.0 : k_factor_ / (k_factor_ + 1.0)) : 0.0;
    for (int l = 0; l < paths_; ++l) {
      if (los_ && l == 0)
        power_[l] = los_fraction;
      else
        power_[l] = (1.0 - los_fraction) * weight_[l] / scatter;
    }
    for (int l = 0; l < paths_; ++l) {
      const double amp = std::sqrt(power_[l]);
      for (int r = 0; r < rbs_; ++r) {
        // LOS links get a linear phase ramp over frequency; NLOS links get
        // independent phases per RB.
        const double ph = los_ ? phase0_[l] - 2.0 * kPi * (l == 0 ? 0.0 : delay_[l]) * (r * rb_bw_)
                               : rb_phase_[idx(l, r)];
        base_[idx(l, r)] = std::polar(amp, ph);
      }
    }
    gram_.setZero();
    for (int r = 0; r < rbs_; ++r)
      for (int l = 0; l < paths_; ++l)
        for (int m = 0; m < paths_; ++m) gram_(l, m) += base_[idx(l, r)] * std::conj(base_[idx(m, r)]);
    gram_ /= static_cast<double>(rbs_);
  }

  for (int l = 0; l < paths_; ++l) {
    dft_beam_factors(panel_a_, dep_[l], std::span<cd>(fa_.data() + static_cast<std::size_t>(l) * beams_a_, beams_a_));
    dft_beam_factors(panel_b_, arr_[l], std::span<cd>(fb_.data() + static_cast<std::size_t>(l) * beams_b_, beams_b_));
  }
  refreshed_ = true;
  step_dt_ = -1.0;
}

void Link::set_velocity(double speed_mps, double heading_rad) {
  const double nu_max = speed_mps * carrier_hz_ / kSpeedOfLight;
  for (int l = 0; l < paths_; ++l)
    doppler_[l] = nu_max * std::cos(arr_[l].az - heading_rad) * std::cos(arr_[l].el);
  step_dt_ = -1.0;
}

void Link::advance(double dt_s) {
  if (dt_s != step_dt_) {
    for (int l = 0; l < paths_; ++l) step_[l] = std::polar(1.0, 2.0 * kPi * doppler_[l] * dt_s);
    step_dt_ = dt_s;
  }
  for (int l = 0; l < paths_; ++l)
    if (doppler_[l] != 0.0) rot_[l] *= step_[l];
}

Eigen::MatrixXcd Link::current_gram() const {
  Eigen::MatrixXcd m(paths_, paths_);
  for (int l = 0; l < paths_; ++l)
    for (int k = 0; k < paths_; ++k) m(l, k) = rot_[l] * gram_(l, k) * std::conj(rot_[k]);
  return m;
}

double Link::wideband_gain(int ba, int bb) const {
  const Eigen::MatrixXcd m = current_gram();
  Eigen::VectorXcd x(paths_);
  for (int l = 0; l < paths_; ++l)
    x(l) = fa_[static_cast<std::size_t>(l) * beams_a_ + ba] * fb_[static_cast<std::size_t>(l) * beams_b_ + bb];
  // x^T M conj(x)
  const cd v = (x.transpose() * m * x.conjugate())(0, 0);
  return std::max(v.real(), 0.0) * large_scale_lin_;
}

void Link::wideband_gains_a(int bb, std::vector<double>& out) const {
  const Eigen::MatrixXcd m = current_gram();
  out.assign(beams_a_, 0.0);
  Eigen::VectorXcd x(paths_);
  for (int b = 0; b < beams_a_; ++b) {
    for (int l = 0; l < paths_; ++l)
      x(l) = fa_[static_cast<std::size_t>(l) * beams_a_ + b] * fb_[static_cast<std::size_t>(l) * beams_b_ + bb];
    const cd v = (x.transpose() * m * x.conjugate())(0, 0);
    out[b] = std::max(v.real(), 0.0) * large_scale_lin_;
  }
}

Eigen::MatrixXcd Link::rb_channel(int rb) const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(panel_b_.size(), panel_a_.size());
  for (int l = 0; l < paths_; ++l) {
    const double ga = db_to_lin(element_gain_db(panel_a_, dep_[l]));
    const double gb = db_to_lin(element_gain_db(panel_b_, arr_[l]));
    const Eigen::VectorXcd aa = array_response(panel_a_, dep_[l]);
    const Eigen::VectorXcd ab = array_response(panel_b_, arr_[l]);
    h += coefficient(l, rb) * std::sqrt(ga * gb) * ab * aa.transpose();
  }
  return h;
}

double effective_gain_db(const Link& link, const Eigen::VectorXcd& tx_weights, const Eigen::VectorXcd& rx_weights,
                         int rb, bool reverse) {
  const Eigen::MatrixXcd h = reverse ? Eigen::MatrixXcd(link.rb_channel(rb).transpose()) : link.rb_channel(rb);
  if (tx_weights.size() != h.cols() || rx_weights.size() != h.rows())
    throw std::invalid_argument("effective_gain_db: weight size does not match the link's arrays");
  const cd y = rx_weights.dot(h * tx_weights.conjugate());
  return lin_to_db(std::norm(y) * link.large_scale_lin());
}

// ---------------------------------------------------------------------------
// Deployment

NodePanels make_panels(const ScenarioConfig& cfg, double downtilt_rad) {
  NodePanels p;
  for (const GnbPlacement& g : cfg.gnbs) p.gnb.push_back(make_panel(g.azimuth_rad, downtilt_rad));
  for (const NcrPlacement& n : cfg.ncrs) {
    const GnbPlacement& g = cfg.gnbs.at(n.controlling_gnb);
    const Angles to_gnb = geometric_angles(lift(n.position, n.height_m), lift(g.position, g.height_m));
    // The backhaul panel looks straight at its controller.
    p.ncr_gnb_side.push_back(make_panel(n.gnb_side_azimuth_rad, -to_gnb.el));
    p.ncr_ue_side.push_back(make_panel(n.ue_side_azimuth_rad, downtilt_rad));
  }
  return p;
}

ChannelModel::ChannelModel(const ScenarioConfig& cfg, const NodePanels& panels, const ChannelParams& params,
                           std::uint64_t seed)
    : cfg_(cfg),
      gnbs_(static_cast<int>(cfg.gnbs.size())),
      ncrs_(static_cast<int>(cfg.ncrs.size())),
      ues_(cfg.ue_count) {
  const Rect ext = cfg.layout.bounds();
  for (int g = 0; g < gnbs_; ++g) gnb_fields_.emplace_back(seed, static_cast<std::uint64_t>(g), Profile::UMa, ext);
  for (int n = 0; n < ncrs_; ++n)
    ncr_fields_.emplace_back(seed, 1000ULL + static_cast<std::uint64_t>(n), Profile::UMi, ext);

  gnb_ue_.reserve(static_cast<std::size_t>(gnbs_) * ues_);
  for (int g = 0; g < gnbs_; ++g)
    for (int u = 0; u < ues_; ++u)
      gnb_ue_.emplace_back(NodeKind::gnb, g, NodeKind::ue, u, panels.gnb[g], panels.ue, params, seed);
  ncr_ue_.reserve(static_cast<std::size_t>(ncrs_) * ues_);
  for (int n = 0; n < ncrs_; ++n)
    for (int u = 0; u < ues_; ++u)
      ncr_ue_.emplace_back(NodeKind::ncr, n, NodeKind::ue, u, panels.ncr_ue_side[n], panels.ue, params, seed);
  gnb_ncr_.reserve(static_cast<std::size_t>(gnbs_) * ncrs_);
  for (int g = 0; g < gnbs_; ++g) {
    for (int n = 0; n < ncrs_; ++n) {
      gnb_ncr_.emplace_back(NodeKind::gnb, g, NodeKind::ncr, n, panels.gnb[g], panels.ncr_gnb_side[n], params, seed);
      const GnbPlacement& gp = cfg.gnbs[g];
      const NcrPlacement& np = cfg.ncrs[n];
      LinkGeometry geo;
      geo.a = lift(gp.position, gp.height_m);
      geo.b = lift(np.position, np.height_m);
      geo.los = !segment_blocked(geo.a, geo.b, cfg.layout);
      geo.shadowing_db = gnb_fields_[g].sample(np.position, geo.los);
      geo.ue_height_m = np.height_m;
      gnb_ncr(g, n).refresh(geo);
    }
  }
}

void ChannelModel::refresh_ue(int u, const UeMobilityState& s) {
  const Vec3 ue = lift(s.position, s.height_m);
  for (int g = 0; g < gnbs_; ++g) {
    const GnbPlacement& gp = cfg_.gnbs[g];
    LinkGeometry geo;
    geo.a = lift(gp.position, gp.height_m);
    geo.b = ue;
    geo.los = !segment_blocked(geo.a, geo.b, cfg_.layout);
    geo.shadowing_db = gnb_fields_[g].sample(s.position, geo.los);
    geo.ue_height_m = s.height_m;
    gnb_ue(g, u).refresh(geo);
  }
  for (int n = 0; n < ncrs_; ++n) {
    const NcrPlacement& np = cfg_.ncrs[n];
    LinkGeometry geo;
    geo.a = lift(np.position, np.height_m);
    geo.b = ue;
    geo.los = !segment_blocked(geo.a, geo.b, cfg_.layout);
    geo.shadowing_db = ncr_fields_[n].sample(s.position, geo.los);
    geo.ue_height_m = s.height_m;
    ncr_ue(n, u).refresh(geo);
  }
  set_ue_velocity(u, s);
}

void ChannelModel::set_ue_velocity(int u, const UeMobilityState& s) {
  const double h = heading_angle(s.heading);
  for (int g = 0; g < gnbs_; ++g) gnb_ue(g, u).set_velocity(s.speed_mps, h);
  for (int n = 0; n < ncrs_; ++n) ncr_ue(n, u).set_velocity(s.speed_mps, h);
}

void ChannelModel::advance(double dt_s) {
  for (Link& l : gnb_ue_) l.advance(dt_s);
  for (Link& l : ncr_ue_) l.advance(dt_s);
}

}  // namespace ncrsim
