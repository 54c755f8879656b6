#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ncrsim/antenna.hpp"
#include "ncrsim/scenario.hpp"

namespace ncrsim {

enum class Profile { UMa, UMi };
enum class NodeKind { gnb, ncr, ue };

const char* to_string(Profile p);
const char* to_string(NodeKind k);

/// gNB-{NCR,UE} links are UMa, NCR-UE links are UMi, in either direction.
Profile assign_profile(NodeKind tx, NodeKind rx);

/// Distances below 1 m are clamped (with a one-time warning on stderr).
double pathloss_db(Profile profile, bool los, double d3d_m, double fc_ghz, double ue_height_m);
double free_space_loss_db(double d3d_m, double fc_ghz);
/// Number of clamped path-loss evaluations so far (process wide).
std::uint64_t pathloss_clamp_count();

double shadowing_sigma_db(Profile profile, bool los);
double correlation_distance_m(Profile profile);

/// Zero-mean unit-variance Gaussian field with separable exponential
/// correlation, generated on a regular grid and sampled bilinearly. The grid
/// step is the largest value <= max_step_m that divides the correlation
/// distance, so the grid holds a sample exactly one correlation length apart.
class ShadowingField {
 public:
  ShadowingField() = default;
  ShadowingField(std::uint64_t seed, std::uint64_t field_id, Profile profile, Rect extent,
                 double max_step_m = 5.0);
  ShadowingField(std::uint64_t seed, std::uint64_t field_id, double correlation_distance_m,
                 Rect extent, double max_step_m = 5.0);

  double unit(Vec2 p) const;
  /// Shadowing in dB; the sigma follows the profile and LOS state.
  double sample(Vec2 p, bool los) const { return shadowing_sigma_db(profile_, los) * unit(p); }

  double step() const { return step_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double at_node(int ix, int iy) const { return grid_[static_cast<std::size_t>(iy) * nx_ + ix]; }
  Vec2 node_position(int ix, int iy) const { return {extent_.x0 + ix * step_, extent_.y0 + iy * step_}; }

 private:
  Profile profile_ = Profile::UMa;
  Rect extent_{};
  double step_ = 5.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> grid_;
};

struct ChannelParams {
  int path_count = 6;
  double rician_k_db = 10.0;
  double carrier_hz = 28e9;
  double rb_bandwidth_hz = 720e3;
  int rb_count = 66;
  double max_scatter_delay_s = 200e-9;
};

/// Large-scale inputs of a link refresh.
struct LinkGeometry {
  Vec3 a;  // infrastructure end (gNB, or NCR for access links)
  Vec3 b;  // the other end (UE, or NCR for backhaul links)
  bool los = true;
  double shadowing_db = 0.0;
  double ue_height_m = 1.5;
};

/// One bidirectional link. End `a` is the infrastructure node; the same
/// object serves both transmission directions.
///
/// Random angle offsets, scatter powers, delays and per-RB phases are drawn
/// once at construction; `refresh` re-anchors them to the current geometry.
/// The per-RB coefficient of path l at time t is base(l, r) * exp(j theta_l),
/// where theta_l accumulates 2 pi nu_l dt.
class Link {
 public:
  Link(NodeKind kind_a, int id_a, NodeKind kind_b, int id_b, const ArrayConfig& panel_a,
       const ArrayConfig& panel_b, const ChannelParams& params, std::uint64_t seed);

  void refresh(const LinkGeometry& g);
  /// Sets the Doppler of every path from the b-end velocity (0 for static links).
  void set_velocity(double speed_mps, double heading_rad);
  void advance(double dt_s);

  Profile profile() const { return profile_; }
  NodeKind kind_a() const { return kind_a_; }
  NodeKind kind_b() const { return kind_b_; }
  int id_a() const { return id_a_; }
  int id_b() const { return id_b_; }
  bool los() const { return los_; }
  double distance_m() const { return d3d_; }
  double pathloss_db() const { return pathloss_db_; }
  double shadowing_db() const { return shadowing_db_; }
  double large_scale_lin() const { return large_scale_lin_; }
  int path_count() const { return paths_; }
  int rb_count() const { return rbs_; }
  int beams_a() const { return beams_a_; }
  int beams_b() const { return beams_b_; }
  double path_power(int l) const { return power_[l]; }
  Angles departure(int l) const { return dep_[l]; }
  Angles arrival(int l) const { return arr_[l]; }
  double doppler_hz(int l) const { return doppler_[l]; }

  /// Small-scale coefficient of path l on RB r at the current time.
  cd coefficient(int l, int rb) const { return base_[idx(l, rb)] * rot_[l]; }

  /// Linear gain including path loss and shadowing for beam ba at end a and
  /// beam bb at end b on one RB.
  double gain(int ba, int bb, int rb) const {
    cd acc = 0.0;
    const cd* fa = fa_.data() + ba;
    const cd* fb = fb_.data() + bb;
    for (int l = 0; l < paths_; ++l)
      acc += base_[idx(l, rb)] * rot_[l] * fa[l * beams_a_] * fb[l * beams_b_];
    return std::norm(acc) * large_scale_lin_;
  }

  /// RB-averaged linear gain for a beam pair (reference-signal measurement).
  double wideband_gain(int ba, int bb) const;
  /// Wideband gains for every beam of end a with beam bb fixed at end b.
  void wideband_gains_a(int bb, std::vector<double>& out) const;

  /// Dense per-RB channel, b-by-a, element patterns included, large-scale excluded.
  Eigen::MatrixXcd rb_channel(int rb) const;

  const ArrayConfig& panel_a() const { return panel_a_; }
  const ArrayConfig& panel_b() const { return panel_b_; }

 private:
  std::size_t idx(int l, int rb) const { return static_cast<std::size_t>(l) * rbs_ + rb; }
  Eigen::MatrixXcd current_gram() const;

  NodeKind kind_a_;
  NodeKind kind_b_;
  int id_a_;
  int id_b_;
  Profile profile_;
  ArrayConfig panel_a_;
  ArrayConfig panel_b_;
  int paths_;
  int rbs_;
  int beams_a_;
  int beams_b_;
  double k_factor_;
  double carrier_hz_;
  double rb_bw_;

  // Per-link draws.
  std::vector<Angles> dep_off_;
  std::vector<Angles> arr_off_;
  std::vector<double> weight_;
  std::vector<double> phase0_;
  std::vector<double> delay_;
  std::vector<double> rb_phase_;

  // Large-scale state.
  bool refreshed_ = false;
  bool los_ = false;
  double d3d_ = 0.0;
  double pathloss_db_ = 0.0;
  double shadowing_db_ = 0.0;
  double large_scale_lin_ = 0.0;
  std::vector<Angles> dep_;
  std::vector<Angles> arr_;
  std::vector<double> power_;
  std::vector<cd> base_;
  Eigen::MatrixXcd gram_;  // RB average of base_r base_r^H

  // Small-scale evolution.
  std::vector<double> doppler_;
  std::vector<cd> step_;  // per-slot rotor increment
  std::vector<cd> rot_;
  double step_dt_ = -1.0;

  // Beam factors per path, path-major.
  std::vector<cd> fa_;
  std::vector<cd> fb_;
};

/// 10 log10(|w_rx^H H_rb conj(w_tx)|^2 * 10^(-(PL+SF)/10)), floored at -200 dB.
/// A transmitter precodes with the conjugate of its codebook beam, so a beam
/// has the same pattern in both directions. By default end a transmits;
/// `reverse` makes end b the transmitter (H^T).
double effective_gain_db(const Link& link, const Eigen::VectorXcd& tx_weights,
                         const Eigen::VectorXcd& rx_weights, int rb, bool reverse = false);

/// Antenna panels of one deployment.
struct NodePanels {
  std::vector<ArrayConfig> gnb;
  std::vector<ArrayConfig> ncr_gnb_side;
  std::vector<ArrayConfig> ncr_ue_side;
  ArrayConfig ue = make_single_omni();
};

NodePanels make_panels(const ScenarioConfig& cfg, double downtilt_rad);

/// Every link of a deployment plus the per-transmitter shadowing fields.
class ChannelModel {
 public:
  ChannelModel(const ScenarioConfig& cfg, const NodePanels& panels, const ChannelParams& params,
               std::uint64_t seed);

  int gnb_count() const { return gnbs_; }
  int ncr_count() const { return ncrs_; }
  int ue_count() const { return ues_; }

  Link& gnb_ue(int g, int u) { return gnb_ue_[static_cast<std::size_t>(g) * ues_ + u]; }
  Link& ncr_ue(int n, int u) { return ncr_ue_[static_cast<std::size_t>(n) * ues_ + u]; }
  Link& gnb_ncr(int g, int n) { return gnb_ncr_[static_cast<std::size_t>(g) * ncrs_ + n]; }
  const Link& gnb_ue(int g, int u) const { return gnb_ue_[static_cast<std::size_t>(g) * ues_ + u]; }
  const Link& ncr_ue(int n, int u) const { return ncr_ue_[static_cast<std::size_t>(n) * ues_ + u]; }
  const Link& gnb_ncr(int g, int n) const { return gnb_ncr_[static_cast<std::size_t>(g) * ncrs_ + n]; }

  const ShadowingField& gnb_field(int g) const { return gnb_fields_[g]; }
  const ShadowingField& ncr_field(int n) const { return ncr_fields_[n]; }

  /// Large-scale refresh of every link that ends at UE u.
  void refresh_ue(int u, const UeMobilityState& s);
  /// Doppler update for every link of UE u.
  void set_ue_velocity(int u, const UeMobilityState& s);
  /// Advances the small-scale phase of all UE links.
  void advance(double dt_s);

 private:
  ScenarioConfig cfg_;
  int gnbs_;
  int ncrs_;
  int ues_;
  std::vector<ShadowingField> gnb_fields_;
  std::vector<ShadowingField> ncr_fields_;
  std::vector<Link> gnb_ue_;
  std::vector<Link> ncr_ue_;
  std::vector<Link> gnb_ncr_;
};

Angles geometric_angles(const Vec3& from, const Vec3& to);
double heading_angle(Heading h);

}  // namespace ncrsim
