#include <cmath>
#include <vector>

#include "doctest.h"
#include "ncrsim/common.hpp"
#include "ncrsim/scenario.hpp"

using namespace ncrsim;

TEST_CASE("grid partitions the extent") {
  GridLayout g;
  CHECK(g.pitch() == 140.0);
  double blocks = 0.0, streets = 0.0, walks = 0.0;
  for (const Rect& r : g.blocks()) blocks += r.area();
  for (const Rect& r : g.streets()) streets += r.area();
  for (const Corridor& c : g.sidewalk_corridors()) walks += c.rect.area();
  const Rect b = g.bounds();
  CHECK(blocks + streets + walks == doctest::Approx(b.area()));
  CHECK(blocks == doctest::Approx(9 * 120.0 * 120.0));
  CHECK(walks == doctest::Approx(9 * (126.0 * 126.0 - 120.0 * 120.0)));

  CHECK(g.classify({63.0, 63.0}) == Zone::block);
  CHECK(g.classify({1.5, 63.0}) == Zone::sidewalk);
  CHECK(g.classify({133.0, 63.0}) == Zone::street);
  CHECK(g.classify({-5.0, 63.0}) == Zone::outside);
}

TEST_CASE("sidewalk corridors do not overlap") {
  GridLayout g;
  const auto cs = g.sidewalk_corridors();
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const Rect& a = cs[i].rect;
      const Rect& b = cs[j].rect;
      const double ox = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
      const double oy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
      CHECK_FALSE((ox > 1e-9 && oy > 1e-9));
    }
}

TEST_CASE("segment blocking is symmetric and ignores grazing") {
  GridLayout g;
  const Rect c = g.block(1, 1);
  RngStream r(3, RngPurpose::test);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a{r.uniform(0, g.extent()), r.uniform(0, g.extent()), 1.5};
    const Vec3 b{r.uniform(0, g.extent()), r.uniform(0, g.extent()), 25.0};
    CHECK(segment_blocked(a, b, g) == segment_blocked(b, a, g));
  }
  CHECK(segment_blocked({c.x0 - 1, c.center().y, 1.5}, {c.x1 + 1, c.center().y, 1.5}, g));
  CHECK_FALSE(segment_blocked({c.x0, c.y0 - 5, 1.5}, {c.x0, c.y1 + 5, 1.5}, g));
  CHECK_FALSE(segment_blocked({c.x0 - 1.5, c.y0 - 50, 1.5}, {c.x0 - 1.5, c.y1 + 50, 1.5}, g));
}

TEST_CASE("scenario shapes") {
  const ScenarioConfig a = build_scenario(ScenarioId::A, true);
  const ScenarioConfig b = build_scenario(ScenarioId::B, true);
  const ScenarioConfig off = build_scenario(ScenarioId::A, false);
  CHECK(a.gnbs.size() == 2);
  CHECK(a.ncrs.size() == 2);
  CHECK(b.gnbs.size() == 4);
  CHECK(b.ncrs.size() == 4);
  CHECK(off.ncrs.empty());
  CHECK_NOTHROW(validate_scenario(a));
  CHECK_NOTHROW(validate_scenario(b));
  for (const auto& n : b.ncrs) {
    REQUIRE(n.controlling_gnb >= 0);
    REQUIRE(n.controlling_gnb < 4);
    const Vec3 gp = lift(b.gnbs[n.controlling_gnb].position, b.gnbs[n.controlling_gnb].height_m);
    CHECK_FALSE(segment_blocked(gp, lift(n.position, n.height_m), b.layout));
  }
}

TEST_CASE("placement overrides") {
  PlacementOverrides o{{"gnb.0.y", 150.0}, {"ncr.1.ue_side_azimuth_deg", 90.0}};
  const ScenarioConfig a = build_scenario(ScenarioId::A, true, &o);
  CHECK(a.gnbs[0].position.y == 150.0);
  PlacementOverrides bad{{"gnb.0.x", 60.0}};
  CHECK_THROWS_AS(build_scenario(ScenarioId::A, true, &bad), ConfigError);
  CHECK(a.ncrs[1].ue_side_azimuth_rad == doctest::Approx(kPi / 2));
}

TEST_CASE("turn probabilities") {
  auto p = turn_probabilities({true, true, true});
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.2));
  CHECK(p[2] == doctest::Approx(0.2));
  p = turn_probabilities({true, false, true});
  CHECK(p[0] == doctest::Approx(0.75));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == doctest::Approx(0.25));
  p = turn_probabilities({false, true, false});
  CHECK(p[1] == doctest::Approx(1.0));

  RngStream r(5, RngPurpose::test);
  int counts[3] = {0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(draw_turn({true, true, true}, r.uniform()))];
  CHECK(counts[0] / double(n) == doctest::Approx(0.6).epsilon(0.02));
  CHECK(counts[1] / double(n) == doctest::Approx(0.2).epsilon(0.04));
}

TEST_CASE("mobility stays on the sidewalk ring and keeps its speed") {
  const ScenarioConfig cfg = build_scenario(ScenarioId::A, true);
  auto ues = spawn_ues(cfg, 9);
  REQUIRE(ues.size() == 72);
  for (int u = 0; u < 72; ++u) {
    RngStream rng(9, RngPurpose::mobility, u);
    UeMobilityState s = ues[u];
    const auto ring = cfg.layout.ring_of(s.position);
    double travelled = 0.0;
    for (int t = 0; t < 4000; ++t) {
      const UeMobilityState n = step_ue(s, 0.25, cfg.layout, rng);
      REQUIRE(cfg.layout.on_sidewalk(n.position, 1e-9));
      CHECK(cfg.layout.ring_of(n.position) == ring);
      travelled += std::abs(n.position.x - s.position.x) + std::abs(n.position.y - s.position.y);
      s = n;
    }
    CHECK(travelled <= 4000 * 0.25 * cfg.ue_speed_mps + 1e-6);
  }
}

TEST_CASE("spawn is area weighted across corridors") {
  GridLayout g;
  const auto cs = g.sidewalk_corridors();
  const int n = 20000;
  const auto ues = spawn_ues(cs, n, 2, 1.0, 1.5);
  std::vector<int> hits(cs.size(), 0);
  double total = 0.0;
  for (const auto& c : cs) total += c.rect.area();
  for (const auto& u : ues)
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (cs[i].rect.contains(u.position)) {
        ++hits[i];
        break;
      }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double e = n * cs[i].rect.area() / total;
    chi2 += (hits[i] - e) * (hits[i] - e) / e;
  }
  // 35 degrees of freedom; the 0.999 quantile is about 66.6.
  CHECK(chi2 < 66.6);

  const auto few = spawn_ues(cs, 10, 2, 1.0, 1.5);
  for (int i = 0; i < 10; ++i) {
    CHECK(few[i].position.x == ues[i].position.x);
    CHECK(few[i].position.y == ues[i].position.y);
  }
}
