#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "plmod/angle.hpp"

using namespace plmod;

TEST_CASE("angle basics and parsing") {
  CHECK(Angle(2, 6) == Angle(1, 3));
  CHECK(Angle(7, 3) == Angle(1, 3));
  CHECK(Angle(-1, 3) == Angle(2, 3));
  CHECK(Angle::parse("5/6").str() == "5/6");
  CHECK(Angle::parse("0").str() == "0/1");
  CHECK_THROWS_AS(Angle::parse("3/"), std::invalid_argument);
  CHECK_THROWS_AS(Angle::parse("x/2"), std::invalid_argument);
  CHECK_THROWS_AS(Angle(1, 0), std::invalid_argument);
}

TEST_CASE("angle_mulD") {
  CHECK(angle_mulD(Angle(1, 3), 2) == Angle(2, 3));
  CHECK(angle_mulD(Angle(2, 3), 2) == Angle(1, 3));
  CHECK(angle_mulD(Angle(9, 26), 3) == Angle(1, 26));
}

TEST_CASE("orbit_period basics") {
  CHECK(orbit_period(Angle(1, 3), 2).period == 2);
  CHECK(orbit_period(Angle(1, 3), 2).preperiod == 0);
  CHECK(orbit_period(Angle(1, 7), 2).period == 3);
  CHECK(orbit_period(Angle(1, 26), 3).period == 3);
  CHECK(orbit_period(Angle(0, 1), 2).period == 1);
  // 1/2 under doubling: preperiodic to 0
  auto ao = orbit_period(Angle(1, 2), 2);
  CHECK(ao.preperiod == 1);
  CHECK(ao.period == 1);
  // 1/12 under doubling: 1/12 -> 1/6 -> 1/3 -> 2/3 -> 1/3
  ao = orbit_period(Angle(1, 12), 2);
  CHECK(ao.preperiod == 2);
  CHECK(ao.period == 2);
}

TEST_CASE("orbit_period agrees with brute-force walks, q <= 600") {
  for (int D : {2, 3}) {
    for (std::int64_t q = 1; q <= 600; ++q) {
      for (std::int64_t p = 0; p < q; ++p) {
        Angle a(p, q);
        if (a.den != q) continue;  // only reduced p/q once
        // brute force: walk until a previously seen angle repeats
        std::map<std::pair<std::int64_t, std::int64_t>, int> seen;
        Angle cur = a;
        int step = 0;
        while (!seen.count({cur.num, cur.den})) {
          seen[{cur.num, cur.den}] = step++;
          cur = angle_mulD(cur, D);
        }
        int first = seen[{cur.num, cur.den}];
        AngleOrbit ao = orbit_period(a, D);
        CHECK(ao.preperiod == first);
        CHECK(ao.period == step - first);
      }
    }
  }
}

TEST_CASE("period is invariant along the orbit") {
  for (int D : {2, 3}) {
    for (auto theta : {Angle(3, 7), Angle(2, 5), Angle(1, 9)}) {
      AngleOrbit ao = orbit_period(theta, D);
      if (ao.preperiod != 0) continue;
      Angle cur = theta;
      for (int k = 0; k < ao.period; ++k) cur = angle_mulD(cur, D);
      CHECK(cur == theta);
    }
  }
}

TEST_CASE("wedge arcs: membership and disjointness") {
  CombCut c{Angle(1, 3), Angle(2, 3)};
  CHECK(c.arc_contains(Angle(1, 2)));
  CHECK(!c.arc_contains(Angle(3, 4)));
  CHECK(!c.arc_contains(Angle(1, 3)));  // boundary is not interior

  // wrap-around arc (2/3, 1/3)
  CombCut w{Angle(2, 3), Angle(1, 3)};
  CHECK(w.arc_contains(Angle(0, 1)));
  CHECK(w.arc_contains(Angle(3, 4)));
  CHECK(!w.arc_contains(Angle(1, 2)));

  CHECK(wedges_pairwise_disjoint({c}));
  CHECK(!wedges_pairwise_disjoint({CombCut{Angle(0, 1), Angle(1, 4)}, CombCut{Angle(1, 8), Angle(3, 8)}}));
  CHECK(wedges_pairwise_disjoint({CombCut{Angle(0, 1), Angle(1, 4)}, CombCut{Angle(1, 2), Angle(3, 4)}}));
  // nested arcs overlap
  CHECK(!wedges_pairwise_disjoint({CombCut{Angle(0, 1), Angle(1, 2)}, CombCut{Angle(1, 8), Angle(1, 4)}}));
  // disjointness is invariant under rotating the list
  std::vector<CombCut> cuts{CombCut{Angle(0, 1), Angle(1, 8)}, CombCut{Angle(1, 4), Angle(3, 8)},
                            CombCut{Angle(1, 2), Angle(5, 8)}};
  bool base = wedges_pairwise_disjoint(cuts);
  for (int rot = 1; rot < 3; ++rot) {
    std::rotate(cuts.begin(), cuts.begin() + 1, cuts.end());
    CHECK(wedges_pairwise_disjoint(cuts) == base);
  }
}

TEST_CASE("degenerate cut has empty wedge") {
  CombCut d{Angle(1, 3), Angle(1, 3)};
  CHECK(d.degenerate());
  CHECK(!d.arc_contains(Angle(1, 2)));
}

TEST_CASE("enumerate_cut_candidates") {
  CHECK(enumerate_cut_candidates(2, 1).empty());

  auto p22 = enumerate_cut_candidates(2, 2);
  REQUIRE(p22.size() == 1);
  CHECK(p22[0].first == Angle(1, 3));
  CHECK(p22[0].second == Angle(2, 3));

  auto p31 = enumerate_cut_candidates(3, 1);
  REQUIRE(p31.size() == 1);
  CHECK(p31[0].first == Angle(0, 1));
  CHECK(p31[0].second == Angle(1, 2));

  // the candidate set is invariant under the xD action on pairs
  auto p23 = enumerate_cut_candidates(2, 3);
  auto key = [](const std::pair<Angle, Angle>& pr) {
    Angle a = pr.first, b = pr.second;
    if (b < a) std::swap(a, b);
    return std::array<std::int64_t, 4>{a.num, a.den, b.num, b.den};
  };
  std::vector<std::array<std::int64_t, 4>> keys;
  for (const auto& pr : p23) keys.push_back(key(pr));
  for (const auto& pr : p23) {
    auto img = key({angle_mulD(pr.first, 2), angle_mulD(pr.second, 2)});
    CHECK(std::find(keys.begin(), keys.end(), img) != keys.end());
  }
}

TEST_CASE("wake_to_dynamic_angles") {
  auto [a, b] = wake_to_dynamic_angles(Angle(0, 1), Angle(0, 1));
  CHECK(a == Angle(1, 3));
  CHECK(b == Angle(2, 3));
  std::tie(a, b) = wake_to_dynamic_angles(Angle(1, 2), Angle(1, 2));
  CHECK(a == Angle(5, 6));
  CHECK(b == Angle(1, 6));
  std::tie(a, b) = wake_to_dynamic_angles(Angle(1, 4), Angle(3, 4));
  CHECK(a == Angle(7, 12));
  CHECK(b == Angle(5, 12));
}

TEST_CASE("cut cycle invariance") {
  CombCutCycle zc;
  zc.degree = 2;
  zc.period = 2;
  zc.cuts = {CombCut{Angle(1, 3), Angle(2, 3)}};
  CHECK(zc.is_invariant());  // {1/3,2/3} maps to {2/3,1/3}... as a set of angles

  CombCutCycle bad;
  bad.degree = 2;
  bad.period = 3;
  bad.cuts = {CombCut{Angle(1, 7), Angle(2, 7)}};
  CHECK(!bad.is_invariant());
}

TEST_CASE("candidate enumeration budget guard") {
  CHECK_THROWS(enumerate_cut_candidates(2, 40));  // 2^40 - 1 over the denominator cap
}
