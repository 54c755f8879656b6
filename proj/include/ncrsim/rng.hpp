#pragma once

#include <cstdint>
#include <limits>

namespace ncrsim {

// Every random draw in the simulator belongs to exactly one purpose. Streams
// for different purposes never share state, so switching a feature on or off
// (e.g. adding repeaters) leaves the draws of unrelated entities untouched.
enum class RngPurpose : std::uint64_t {
  spawn = 1,
  mobility = 2,
  shadowing = 3,
  paths = 4,
  test = 99,
};

std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator keyed by (seed, purpose, up to three entity ids).
///
/// Draw i of a stream is mix64(key + (i + 1) * golden), so any stream can be
/// rebuilt in isolation from its key alone. Satisfies
/// UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, RngPurpose purpose, std::uint64_t a = 0, std::uint64_t b = 0,
            std::uint64_t c = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }
  result_type next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, two uniforms per call, no cached spare).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ncrsim
