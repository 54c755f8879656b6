#include "ncrsim/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ncrsim/common.hpp"

namespace ncrsim {

void ArrayConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("antenna array needs at least one element");
  if (!(element_spacing_wavelengths > 0.0)) throw ConfigError("antenna element spacing must be > 0");
  if (pattern == ElementPattern::omni && max_element_gain_dbi != 0.0)
    throw ConfigError("omni element must have 0 dBi gain");
}

ArrayConfig make_panel(double boresight_azimuth, double downtilt) {
  ArrayConfig c;
  c.boresight_azimuth = boresight_azimuth;
  c.downtilt = downtilt;
  return c;
}

ArrayConfig make_single_omni() {
  ArrayConfig c;
  c.rows = 1;
  c.cols = 1;
  c.max_element_gain_dbi = 0.0;
  c.pattern = ElementPattern::omni;
  return c;
}

Eigen::Vector3d direction_vector(Angles a) {
  return {std::cos(a.el) * std::cos(a.az), std::cos(a.el) * std::sin(a.az), std::sin(a.el)};
}

Angles to_local(const ArrayConfig& cfg, Angles global) {
  const double ca = std::cos(cfg.boresight_azimuth);
  const double sa = std::sin(cfg.boresight_azimuth);
  const double cb = std::cos(cfg.downtilt);
  const double sb = std::sin(cfg.downtilt);
  const Eigen::Vector3d x{cb * ca, cb * sa, -sb};
  const Eigen::Vector3d y{-sa, ca, 0.0};
  const Eigen::Vector3d z{sb * ca, sb * sa, cb};
  const Eigen::Vector3d d = direction_vector(global);
  return {std::atan2(d.dot(y), d.dot(x)), std::asin(std::clamp(d.dot(z), -1.0, 1.0))};
}

double element_gain_db(ElementPattern pattern, double azimuth_off, double elevation_off,
                       double max_gain_dbi) {
  if (pattern == ElementPattern::omni) return 0.0;
  const double el = rad_to_deg(elevation_off) / 65.0;
  const double az = rad_to_deg(azimuth_off) / 65.0;
  const double av = -std::min(12.0 * el * el, 30.0);
  const double ah = -std::min(12.0 * az * az, 30.0);
  return max_gain_dbi - std::min(-(av + ah), 30.0);
}

double element_gain_db(const ArrayConfig& cfg, Angles global) {
  if (cfg.pattern == ElementPattern::omni) return 0.0;
  const Angles l = to_local(cfg, global);
  return element_gain_db(cfg.pattern, l.az, l.el, cfg.max_element_gain_dbi);
}

Eigen::VectorXcd array_response_local(const ArrayConfig& cfg, Angles local) {
  const double k = 2.0 * kPi * cfg.element_spacing_wavelengths;
  const double u = std::sin(local.el);
  const double v = std::sin(local.az) * std::cos(local.el);
  Eigen::VectorXcd a(cfg.size());
  for (int m = 0; m < cfg.rows; ++m)
    for (int n = 0; n < cfg.cols; ++n) a(m * cfg.cols + n) = std::polar(1.0, k * (m * u + n * v));
  return a;
}

Eigen::VectorXcd array_response(const ArrayConfig& cfg, Angles global) {
  return array_response_local(cfg, to_local(cfg, global));
}

BeamCodebook build_dft_codebook(const ArrayConfig& cfg) {
  cfg.validate();
  const int n = cfg.size();
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd w(n, n);
  for (int kr = 0; kr < cfg.rows; ++kr) {
    for (int kc = 0; kc < cfg.cols; ++kc) {
      const int b = kr * cfg.cols + kc;
      for (int m = 0; m < cfg.rows; ++m) {
        for (int c = 0; c < cfg.cols; ++c) {
          const double ph = 2.0 * kPi *
                            (static_cast<double>(m * kr) / cfg.rows + static_cast<double>(c * kc) / cfg.cols);
          w(m * cfg.cols + c, b) = std::polar(norm, ph);
        }
      }
    }
  }
  return {cfg.rows, cfg.cols, std::move(w)};
}

namespace {

// (1/sqrt(len)) * sum_i exp(j i (x - 2 pi k / len)) for every k.
void axis_factors(int len, double x, cd* out) {
  const double norm = 1.0 / std::sqrt(static_cast<double>(len));
  for (int k = 0; k < len; ++k) {
    const double step = x - 2.0 * kPi * k / len;
    cd acc = 0.0;
    for (int i = 0; i < len; ++i) acc += std::polar(1.0, i * step);
    out[k] = acc * norm;
  }
}

}  // namespace

void dft_beam_factors(const ArrayConfig& cfg, Angles global, std::span<cd> out) {
  if (static_cast<int>(out.size()) != cfg.size())
    throw std::invalid_argument("beam factor buffer does not match the array size");
  const Angles l = to_local(cfg, global);
  const double amp =
      cfg.pattern == ElementPattern::omni
          ? 1.0
          : std::sqrt(db_to_lin(element_gain_db(cfg.pattern, l.az, l.el, cfg.max_element_gain_dbi)));
  const double k = 2.0 * kPi * cfg.element_spacing_wavelengths;
  std::vector<cd> rf(cfg.rows);
  std::vector<cd> cf(cfg.cols);
  axis_factors(cfg.rows, k * std::sin(l.el), rf.data());
  axis_factors(cfg.cols, k * std::sin(l.az) * std::cos(l.el), cf.data());
  for (int kr = 0; kr < cfg.rows; ++kr)
    for (int kc = 0; kc < cfg.cols; ++kc) out[kr * cfg.cols + kc] = amp * rf[kr] * cf[kc];
}

double beam_gain_db(const Eigen::VectorXcd& w, const Eigen::VectorXcd& h) {
  if (w.size() != h.size()) throw std::invalid_argument("beam_gain_db: weight/channel size mismatch");
  return lin_to_db(std::norm(w.dot(h)));
}

double beam_gain_db(const Eigen::VectorXcd& w_rx, const Eigen::MatrixXcd& h, const Eigen::VectorXcd& w_tx) {
  if (w_rx.size() != h.rows() || w_tx.size() != h.cols())
    throw std::invalid_argument("beam_gain_db: weight/channel size mismatch");
  const cd y = w_rx.dot(h * w_tx);  // Eigen's dot conjugates the left operand
  return lin_to_db(std::norm(y));
}

int argmax_beam(std::span<const double> gains) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(gains.size()); ++i)
    if (gains[i] > gains[best]) best = i;
  return best;
}

}  // namespace ncrsim
