#include <cmath>
#include <vector>

#include "doctest.h"
#include "ncrsim/common.hpp"
#include "ncrsim/phy.hpp"

using namespace ncrsim;

TEST_CASE("MCS table and selection") {
  const McsTable t = McsTable::standard();
  REQUIRE(t.size() == 16);
  CHECK(t.efficiency(0) == 0.1523);
  CHECK(t.efficiency(15) == 5.5547);
  for (int i = 0; i < 16; ++i)
    CHECK(t.threshold_db(i) == doctest::Approx(3.0 + 10.0 * std::log10(std::exp2(t.efficiency(i)) - 1.0)));
  CHECK(select_mcs(t, -50.0) == kOutage);
  CHECK(select_mcs(t, t.threshold_db(0)) == 0);
  CHECK(select_mcs(t, std::nextafter(t.threshold_db(7), -1e9)) == 6);
  CHECK(select_mcs(t, 60.0) == 15);
  for (double s = -20.0; s < 40.0; s += 0.37) {
    const int m = select_mcs(t, s);
    if (m >= 0) CHECK(t.threshold_db(m) <= s);
    if (m + 1 < t.size()) CHECK(t.threshold_db(m + 1) > s);
  }
}

TEST_CASE("transport block size") {
  const McsTable t = McsTable::standard();
  CHECK(tb_bits(t, kOutage, 10) == 0);
  CHECK(tb_bits(t, 3, 0) == 0);
  CHECK(tb_bits(t, 15, 66) == static_cast<std::int64_t>(std::floor(5.5547 * 66 * 12 * 14)));
  CHECK(tb_bits(t, 0, 1) == 25);
}

TEST_CASE("radio budget") {
  RadioParams p;
  CHECK(p.gnb_rb_dbm() == doctest::Approx(35.0 - 10.0 * std::log10(66.0)));
  CHECK(p.gnb_re_dbm() == doctest::Approx(35.0 - 10.0 * std::log10(792.0)));
  CHECK(p.rb_noise_dbm() == doctest::Approx(-174.0 + 10.0 * std::log10(720e3) + 9.0));
  CHECK(p.carrier_noise_dbm() == doctest::Approx(p.rb_noise_dbm() + 10.0 * std::log10(66.0)));
  CHECK(rsrp_forwarded_dbm(-80.0, 10.0, 70.0, 5.0) == -80.0 + 85.0);
  CHECK(rsrp_direct_dbm(-80.0, -100.0) == -180.0);
}

namespace {

// Fixed per-pair gains, flat over RBs.
struct TableView final : GainView {
  int gnbs = 1, ncrs = 0, ues = 1;
  std::vector<double> gu, nu, gn;
  double gnb_ue(int g, int u, int) const override { return gu[g * ues + u]; }
  double ncr_ue(int n, int u, int) const override { return nu[n * ues + u]; }
  double gnb_ncr(int g, int n, int) const override { return gn[g * ncrs + n]; }
};

}  // namespace

TEST_CASE("UL direct SINR sits 11 dB below DL on a reciprocal link") {
  RadioParams p;
  TableView v;
  v.gu = {db_to_lin(-110.0)};
  for (Direction d : {Direction::dl, Direction::ul}) {
    SlotAllocation a(d, 1, 66);
    a.add({0, 0, -1, 0, 66, d == Direction::ul ? db_to_lin(p.ue_rb_dbm()) : 0.0});
    const SlotContext ctx = prepare_slot(a, v, p, {});
    const double s = sinr(ctx, a.grants[0]).sinr_db();
    if (d == Direction::dl)
      CHECK(s == doctest::Approx(35.0 - 10.0 * std::log10(66.0) - 110.0 - p.rb_noise_dbm()));
    else
      CHECK(s == doctest::Approx(35.0 - 10.0 * std::log10(66.0) - 110.0 - p.rb_noise_dbm() - 11.0));
  }
}

TEST_CASE("two-hop budget against a hand computation") {
  RadioParams p;
  TableView v;
  v.ncrs = 1;
  v.gu = {db_to_lin(-150.0)};
  v.gn = {db_to_lin(-75.0)};
  v.nu = {db_to_lin(-80.0)};
  SlotAllocation a(Direction::dl, 1, 66);
  a.add({0, 0, 0, 0, 66, 0.0});
  const std::vector<char> on{1};
  const std::vector<int> ctrl{0};
  const SlotContext ctx = prepare_slot(a, v, p, on, ctrl);

  const double rb_in = p.gnb_rb_dbm() - 75.0;
  const double total_in = 10.0 * std::log10(66.0 * db_to_lin(rb_in) + db_to_lin(p.carrier_noise_dbm()));
  const double g = std::min(90.0, 33.0 - total_in);
  CHECK(ctx.ncrs[0].gain_db == doctest::Approx(g));
  const double sig = db_to_lin(rb_in + g - 80.0);
  const double amp = db_to_lin(p.rb_noise_dbm() + g - 80.0);
  const double direct = db_to_lin(p.gnb_rb_dbm() - 150.0);
  const double expect = sig / (amp + db_to_lin(p.rb_noise_dbm()));
  const SinrComponents c = sinr_dl(ctx, a.grants[0]);
  CHECK(c.sinr_db() == doctest::Approx(lin_to_db(expect)).epsilon(1e-9));
  // Forwarded UEs do not combine the direct path.
  CHECK(c.signal == doctest::Approx(sig).epsilon(1e-12));
  CHECK(direct > 0.0);
}

TEST_CASE("grant collisions are refused") {
  SlotAllocation a(Direction::dl, 2, 66);
  a.add({0, 0, -1, 0, 30, 0.0});
  a.add({1, 1, -1, 0, 66, 0.0});
  CHECK_THROWS_AS(a.add({2, 0, -1, 29, 5, 0.0}), SimError);
  CHECK_THROWS_AS(a.add({2, 0, -1, 60, 7, 0.0}), SimError);
  CHECK(a.grants.size() == 2);
}
