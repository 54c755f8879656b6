#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ncrsim/ncr.hpp"

using namespace ncrsim;

TEST_CASE("gain cap") {
  for (double in = -120.0; in <= 10.0; in += 0.5) {
    const ForwardResult f = capped_gain(in, 90.0, 33.0);
    CHECK(f.effective_gain_db == std::min(90.0, 33.0 - in));
    CHECK(f.output_power_dbm <= 33.0);
  }
  CHECK(capped_gain(-60.0, 90.0, 33.0).effective_gain_db == 90.0);
  CHECK(capped_gain(-50.0, 90.0, 33.0).effective_gain_db == 83.0);
}

TEST_CASE("repeater is OFF by default") {
  NcrState s;
  s.set_slot(0);
  CHECK_FALSE(s.on());
  CHECK_FALSE(mt_beam_indication(s, 0).has_value());
  CHECK_THROWS_AS(forward_gain_db(s, -50.0), SimError);
}

TEST_CASE("periodic SCI") {
  SideControlInfo p{SciKind::periodic, 10, 0, {{2, 3, 7}}};
  NcrState s = apply_sci(NcrState{}, p);
  for (std::int64_t t = 0; t < 40; ++t) {
    const auto b = s.access_beam(t);
    const std::int64_t k = t % 10;
    CHECK(b.has_value() == (k >= 2 && k < 5));
    if (b) CHECK(*b == 7);
  }
}

TEST_CASE("dynamic overrides semi-persistent overrides periodic") {
  NcrState s;
  s = apply_sci(s, {SciKind::periodic, 4, 0, {{0, 4, 1}}});
  s = apply_sci(s, {SciKind::semi_persistent, 8, 0, {{0, 2, 2}}});
  s = apply_sci(s, {SciKind::dynamic, 1, 100, {{1, 1, 3}}});
  CHECK(*s.access_beam(0) == 2);
  CHECK(*s.access_beam(3) == 1);
  CHECK(*s.access_beam(101) == 3);
  CHECK(*s.access_beam(102) == 1);
  s = apply_sci(s, {SciKind::dynamic, 1, 0, {}});
  CHECK(*s.access_beam(101) == 1);
}

TEST_CASE("invalid SCI is rejected and leaves the state alone") {
  NcrState s = apply_sci(NcrState{}, {SciKind::periodic, 10, 0, {{0, 2, 5}}});
  CHECK_THROWS_AS(apply_sci(s, {SciKind::periodic, 10, 0, {{0, 3, 1}, {2, 2, 1}}}), ConfigError);
  CHECK_THROWS_AS(apply_sci(s, {SciKind::periodic, 10, 0, {{8, 3, 1}}}), ConfigError);
  CHECK_THROWS_AS(apply_sci(s, {SciKind::periodic, 10, 0, {{0, 0, 1}}}), ConfigError);
  CHECK_THROWS_AS(apply_sci(s, {SciKind::periodic, 10, 0, {{0, 1, 64}}}), ConfigError);
  CHECK(*s.access_beam(1) == 5);
}

TEST_CASE("beam indication and noise") {
  NcrState s = apply_sci(NcrState{}, {SciKind::periodic, 2, 0, {{0, 2, 9}}});
  s.set_backhaul_beam(4);
  const auto dl = mt_beam_indication(s, 0);
  const auto ul = mt_beam_indication(s, 1);
  REQUIRE(dl);
  REQUIRE(ul);
  CHECK(dl->access_beam == 9);
  CHECK(dl->backhaul_beam == 4);
  CHECK(dl->rx_panel == Panel::gnb_side);
  CHECK(ul->rx_panel == Panel::ue_side);
  CHECK(thermal_noise_dbm(720e3, 9.0) == doctest::Approx(-174.0 + 10.0 * std::log10(720e3) + 9.0));
  s.set_slot(0);
  s.set_effective_gain_db(80.0);
  CHECK(amplified_noise_dbm(s, 9.0, 720e3) == doctest::Approx(thermal_noise_dbm(720e3, 9.0) + 80.0));
}
