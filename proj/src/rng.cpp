#include "ncrsim/rng.hpp"

#include <cmath>

#include "ncrsim/common.hpp"

namespace ncrsim {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  // SplitMix64 finalizer.
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RngStream::RngStream(std::uint64_t seed, RngPurpose purpose, std::uint64_t a, std::uint64_t b,
                     std::uint64_t c) {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * kGolden));
  k = mix64(k ^ mix64(a + 1));
  k = mix64(k ^ mix64(b + 2));
  k = mix64(k ^ mix64(c + 3));
  key_ = k;
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace ncrsim
