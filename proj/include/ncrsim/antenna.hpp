#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace ncrsim {

using cd = std::complex<double>;

/// Direction as (azimuth, elevation) in radians. Elevation is positive above
/// the horizon; azimuth is counter-clockwise from +x.
struct Angles {
  double az = 0.0;
  double el = 0.0;
};

enum class ElementPattern { tri3d, omni };

struct ArrayConfig {
  int rows = 8;
  int cols = 8;
  double element_spacing_wavelengths = 0.5;
  double boresight_azimuth = 0.0;
  double downtilt = 0.0;  // positive tilts boresight below the horizon
  double max_element_gain_dbi = 8.0;
  ElementPattern pattern = ElementPattern::tri3d;

  int size() const { return rows * cols; }
  void validate() const;
};

ArrayConfig make_panel(double boresight_azimuth, double downtilt);
ArrayConfig make_single_omni();

/// Unit vector for a global direction.
Eigen::Vector3d direction_vector(Angles a);
/// Global direction as seen in the array's own frame.
Angles to_local(const ArrayConfig& cfg, Angles global);

double element_gain_db(ElementPattern pattern, double azimuth_off, double elevation_off,
                       double max_gain_dbi = 8.0);
double element_gain_db(const ArrayConfig& cfg, Angles global);

/// Unit-magnitude planar-array response for a global direction, indexed
/// m * cols + n with m along the vertical axis.
Eigen::VectorXcd array_response(const ArrayConfig& cfg, Angles global);
Eigen::VectorXcd array_response_local(const ArrayConfig& cfg, Angles local);

class BeamCodebook {
 public:
  BeamCodebook() = default;
  BeamCodebook(int rows, int cols, Eigen::MatrixXcd weights)
      : rows_(rows), cols_(cols), weights_(std::move(weights)) {}

  int size() const { return static_cast<int>(weights_.cols()); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::VectorXcd beam(int id) const { return weights_.col(id); }
  const Eigen::MatrixXcd& weights() const { return weights_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  Eigen::MatrixXcd weights_;  // one unit-norm beam per column
};

/// Kronecker product of per-axis DFT vectors; beam id = kr * cols + kc.
BeamCodebook build_dft_codebook(const ArrayConfig& cfg);

/// w_b^H a(dir) scaled by the element amplitude, for every DFT beam b.
/// Uses the per-axis factorization, so it costs rows + cols sums instead of
/// rows * cols per beam. `out` must hold cfg.size() values.
void dft_beam_factors(const ArrayConfig& cfg, Angles global, std::span<cd> out);

/// 10 log10 |w^H h|^2, floored.
double beam_gain_db(const Eigen::VectorXcd& w, const Eigen::VectorXcd& h);
/// 10 log10 |w_rx^H H w_tx|^2, floored. H is rx-by-tx.
double beam_gain_db(const Eigen::VectorXcd& w_rx, const Eigen::MatrixXcd& h,
                    const Eigen::VectorXcd& w_tx);

/// Index of the largest value; the lowest index wins ties.
int argmax_beam(std::span<const double> gains);

}  // namespace ncrsim
