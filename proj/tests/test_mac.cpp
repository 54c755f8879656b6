#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "ncrsim/mac.hpp"

using namespace ncrsim;

TEST_CASE("TDD pattern and sweep timing") {
  CHECK(tdd_direction(0) == Direction::dl);
  CHECK(tdd_direction(1) == Direction::ul);
  CHECK(tdd_direction(1000) == Direction::dl);
  CHECK(sweep_due(SweepKind::backhaul, 0, 0));
  CHECK_FALSE(sweep_due(SweepKind::backhaul, 80, 0));
  CHECK(sweep_due(SweepKind::access, 160, 80));
  CHECK_FALSE(sweep_due(SweepKind::access, 161, 80));
}

TEST_CASE("RB split") {
  CHECK(split_rbs(3, 66) == std::vector<int>{22, 22, 22});
  CHECK(split_rbs(4, 66) == std::vector<int>{17, 17, 16, 16});
  CHECK(split_rbs(8, 66) == std::vector<int>{9, 9, 8, 8, 8, 8, 8, 8});
  CHECK(split_rbs(0, 66).empty());
  for (int k = 1; k <= 66; ++k) {
    const auto s = split_rbs(k, 66);
    CHECK(std::accumulate(s.begin(), s.end(), 0) == 66);
    CHECK(*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()) <= 1);
  }
}

TEST_CASE("round robin cycles through every candidate") {
  RoundRobin rr(10);
  const std::vector<int> cand{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<int> served(10, 0);
  for (int t = 0; t < 50; ++t) {
    const auto c = rr.schedule(Direction::dl, cand, 3, 66);
    REQUIRE(c.size() == 3);
    int start = 0;
    for (const auto& ch : c) {
      CHECK(ch.rb_start == start);
      start += ch.rb_len;
      ++served[ch.ue];
    }
    CHECK(start == 66);
    const auto [lo, hi] = std::minmax_element(served.begin(), served.end());
    CHECK(*hi - *lo <= 1);
  }
  // UL order is independent.
  const auto ul = rr.schedule(Direction::ul, cand, 2, 66);
  CHECK(ul[0].ue == 0);
  CHECK(ul[1].ue == 1);
}

TEST_CASE("one access beam per repeater and slot") {
  RoundRobin rr(6);
  const std::vector<int> cand{0, 1, 2, 3, 4, 5};
  const std::vector<int> groups{-1, 0, 0, -1, 1, 0};
  const std::vector<int> beams{0, 5, 5, 0, 2, 6};
  auto c = rr.schedule(Direction::dl, cand, 8, 66, groups, beams);
  // UE 5 would need a second beam on repeater 0; selection stops before it.
  std::vector<int> ids;
  for (const auto& ch : c) ids.push_back(ch.ue);
  CHECK(ids == std::vector<int>{0, 1, 2, 3, 4});
  c = rr.schedule(Direction::dl, cand, 8, 66, groups, beams);
  CHECK(c.front().ue == 5);
}

TEST_CASE("association") {
  std::vector<RsrpCandidate> c{{0, -1, -90.0}, {1, -1, -85.0}, {1, 0, -80.0}, {0, 1, -80.0}};
  Association a = associate(3, c, 7);
  CHECK(a.ue == 3);
  CHECK(a.valid_from_slot == 7);
  CHECK(a.serving_gnb == 0);
  CHECK(a.ncr == 1);
  c = {{0, -1, -80.0}, {0, 0, -80.0}};
  a = associate(0, c, 0);
  CHECK(a.ncr == -1);
  c = {{0, -1, -150.0}, {1, 0, -141.0}};
  CHECK(associate(0, c, 0).outage());
}

TEST_CASE("CBR traffic and warm-up accounting") {
  TrafficQueues q(2);
  for (std::int64_t s = 0; s < 8; ++s) q.step_traffic(s);
  CHECK(q.backlog(0, Direction::dl) == 2 * 3072);
  CHECK(q.counted_arrivals(0, Direction::dl) == 0);
  auto d = q.deliver(0, Direction::dl, 1000);
  CHECK(d.bits == 1000);
  CHECK(d.counted_bits == 0);
  q.mark_warmup_end();
  CHECK(q.backlog(0, Direction::dl) == 0);
  q.step_traffic(8);
  CHECK(q.counted_arrivals(0, Direction::dl) == 3072);
  d = q.deliver(0, Direction::dl, 100000);
  CHECK(d.bits == 3072);
  CHECK(d.counted_bits == d.bits);
  CHECK(q.backlog(0, Direction::dl) == 0);
  CHECK(q.delivered(0, Direction::dl) == 1000 + 3072);
  CHECK(q.backlog(1, Direction::ul) == 3072);
}
