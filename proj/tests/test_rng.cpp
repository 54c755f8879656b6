#include <cmath>
#include <vector>

#include "doctest.h"
#include "ncrsim/rng.hpp"

using namespace ncrsim;

TEST_CASE("streams with the same key replay the same draws") {
  RngStream a(7, RngPurpose::mobility, 3);
  RngStream b(7, RngPurpose::mobility, 3);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("purpose and entity ids separate streams") {
  RngStream a(7, RngPurpose::mobility, 3);
  RngStream b(7, RngPurpose::spawn, 3);
  RngStream c(7, RngPurpose::mobility, 4);
  RngStream d(8, RngPurpose::mobility, 3);
  const auto x = a();
  CHECK(x != b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("uniform and normal moments") {
  RngStream r(1, RngPurpose::test);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("draw i depends only on the key and the counter") {
  RngStream r(11, RngPurpose::paths, 1, 2, 3);
  std::vector<std::uint64_t> seq;
  for (int i = 0; i < 5; ++i) seq.push_back(r());
  CHECK(r.counter() == 5);
  const std::uint64_t golden = 0x9E3779B97F4A7C15ull;
  for (int i = 0; i < 5; ++i) CHECK(seq[i] == mix64(r.key() + (static_cast<std::uint64_t>(i) + 1) * golden));
}
