#include <cmath>
#include <vector>

#include "doctest.h"
#include "ncrsim/channel.hpp"
#include "ncrsim/common.hpp"

using namespace ncrsim;

TEST_CASE("path loss reference values") {
  // LOS at 100 m, 28 GHz.
  const double lf = 20.0 * std::log10(28.0);
  CHECK(pathloss_db(Profile::UMa, true, 100.0, 28.0, 1.5) == doctest::Approx(28.0 + 44.0 + lf));
  CHECK(pathloss_db(Profile::UMi, true, 100.0, 28.0, 1.5) == doctest::Approx(32.4 + 42.0 + lf));
  CHECK(pathloss_db(Profile::UMa, false, 100.0, 28.0, 1.5) == doctest::Approx(13.54 + 78.16 + lf));
  CHECK(pathloss_db(Profile::UMi, false, 100.0, 28.0, 1.5) ==
        doctest::Approx(22.4 + 70.6 + 21.3 * std::log10(28.0)));
  // NLOS never beats LOS.
  for (double d = 1.0; d < 1000.0; d *= 1.3) {
    CHECK(pathloss_db(Profile::UMa, false, d, 28.0, 1.5) >= pathloss_db(Profile::UMa, true, d, 28.0, 1.5));
    CHECK(pathloss_db(Profile::UMi, false, d, 28.0, 1.5) >= pathloss_db(Profile::UMi, true, d, 28.0, 1.5));
  }
  const auto before = pathloss_clamp_count();
  CHECK(pathloss_db(Profile::UMi, true, 0.2, 28.0, 1.5) == pathloss_db(Profile::UMi, true, 1.0, 28.0, 1.5));
  CHECK(pathloss_clamp_count() == before + 1);
}

TEST_CASE("profile assignment") {
  CHECK(assign_profile(NodeKind::gnb, NodeKind::ue) == Profile::UMa);
  CHECK(assign_profile(NodeKind::ue, NodeKind::gnb) == Profile::UMa);
  CHECK(assign_profile(NodeKind::gnb, NodeKind::ncr) == Profile::UMa);
  CHECK(assign_profile(NodeKind::ncr, NodeKind::ue) == Profile::UMi);
  CHECK(assign_profile(NodeKind::ue, NodeKind::ncr) == Profile::UMi);
}

TEST_CASE("shadowing field statistics") {
  const Rect ext{0.0, 0.0, 2000.0, 2000.0};
  double s = 0.0, s2 = 0.0, c = 0.0, cn = 0.0;
  int n = 0;
  for (std::uint64_t id = 0; id < 4; ++id) {
    const ShadowingField f(21, id, 37.0, ext, 5.0);
    CHECK(f.step() * std::round(37.0 / f.step()) == doctest::Approx(37.0));
    const int lag = static_cast<int>(std::round(37.0 / f.step()));
    for (int iy = 0; iy < f.ny(); ++iy)
      for (int ix = 0; ix < f.nx(); ++ix) {
        const double v = f.at_node(ix, iy);
        s += v;
        s2 += v * v;
        ++n;
        if (ix + lag < f.nx()) {
          c += v * f.at_node(ix + lag, iy);
          ++cn;
        }
      }
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 0.05);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.06));
  CHECK(c / cn == doctest::Approx(std::exp(-1.0)).epsilon(0.15));

  const ShadowingField f(21, 0, Profile::UMi, ext);
  CHECK(f.unit(f.node_position(3, 4)) == doctest::Approx(f.at_node(3, 4)));
  CHECK(f.sample(f.node_position(3, 4), false) == doctest::Approx(7.8 * f.at_node(3, 4)));
}

namespace {

Link make_link(NodeKind kb, const ArrayConfig& pa, const ArrayConfig& pb, bool los) {
  ChannelParams cp;
  Link l(NodeKind::gnb, 0, kb, 0, pa, pb, cp, 17);
  LinkGeometry g;
  g.a = {0.0, 0.0, 25.0};
  g.b = {120.0, 40.0, kb == NodeKind::ue ? 1.5 : 10.0};
  g.los = los;
  g.shadowing_db = 2.5;
  l.refresh(g);
  l.set_velocity(0.83, 0.7);
  l.advance(0.25e-3 * 37);
  return l;
}

}  // namespace

TEST_CASE("factored gain matches the dense per-RB channel") {
  const ArrayConfig pa = make_panel(0.2, deg_to_rad(12.0));
  const ArrayConfig pu = make_single_omni();
  const ArrayConfig pn = make_panel(kPi + 0.3, 0.0);
  const BeamCodebook ca = build_dft_codebook(pa);
  const BeamCodebook cu = build_dft_codebook(pu);
  const BeamCodebook cn = build_dft_codebook(pn);

  for (bool los : {true, false}) {
    const Link ue = make_link(NodeKind::ue, pa, pu, los);
    for (int rb : {0, 17, 65})
      for (int b = 0; b < 64; b += 7) {
        const double fast = lin_to_db(ue.gain(b, 0, rb));
        CHECK(fast == doctest::Approx(effective_gain_db(ue, ca.beam(b), cu.beam(0), rb)).epsilon(1e-9));
        // Reciprocity: the reverse direction sees the same gain.
        CHECK(fast == doctest::Approx(effective_gain_db(ue, cu.beam(0), ca.beam(b), rb, true)).epsilon(1e-9));
      }
    const Link bh = make_link(NodeKind::ncr, pa, pn, los);
    for (int b = 0; b < 64; b += 9)
      for (int c = 0; c < 64; c += 11)
        CHECK(lin_to_db(bh.gain(b, c, 5)) ==
              doctest::Approx(effective_gain_db(bh, ca.beam(b), cn.beam(c), 5)).epsilon(1e-9));
  }
}

TEST_CASE("wideband gain is the RB average") {
  const Link l = make_link(NodeKind::ue, make_panel(0.2, 0.2), make_single_omni(), true);
  for (int b : {0, 5, 40}) {
    double s = 0.0;
    for (int r = 0; r < l.rb_count(); ++r) s += l.gain(b, 0, r);
    CHECK(l.wideband_gain(b, 0) == doctest::Approx(s / l.rb_count()).epsilon(1e-9));
  }
  std::vector<double> all;
  l.wideband_gains_a(0, all);
  REQUIRE(all.size() == 64);
  CHECK(all[5] == doctest::Approx(l.wideband_gain(5, 0)).epsilon(1e-9));
}

TEST_CASE("large-scale loss enters linearly") {
  const Link l = make_link(NodeKind::ue, make_panel(0.2, 0.2), make_single_omni(), true);
  CHECK(lin_to_db(l.large_scale_lin()) == doctest::Approx(-(l.pathloss_db() + l.shadowing_db())));
  CHECK(l.distance_m() == doctest::Approx(std::sqrt(120.0 * 120.0 + 40.0 * 40.0 + 23.5 * 23.5)));
}

TEST_CASE("channel model links stay reciprocal in geometry") {
  const ScenarioConfig sc = build_scenario(ScenarioId::A, true);
  const NodePanels panels = make_panels(sc, deg_to_rad(12.0));
  ChannelParams cp;
  ChannelModel ch(sc, panels, cp, 3);
  const auto ues = spawn_ues(sc, 3);
  for (int u = 0; u < 5; ++u) ch.refresh_ue(u, ues[u]);
  for (int u = 0; u < 5; ++u) {
    const Link& l = ch.gnb_ue(0, u);
    const bool blocked =
        segment_blocked(lift(sc.gnbs[0].position, sc.gnbs[0].height_m), lift(ues[u].position, 1.5), sc.layout);
    CHECK(l.los() == !blocked);
  }
}
