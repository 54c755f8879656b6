#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ncrsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

// Anything at or below this is reported as "no signal".
inline constexpr double kFloorDb = -200.0;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

inline double lin_to_db(double lin) {
  if (!(lin > 0.0)) return kFloorDb;
  return std::max(10.0 * std::log10(lin), kFloorDb);
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

/// Invalid or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while the simulation is running; the CLI maps it to exit code 3.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction { dl, ul };

inline const char* to_string(Direction d) { return d == Direction::dl ? "DL" : "UL"; }

}  // namespace ncrsim
