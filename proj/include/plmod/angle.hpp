#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plmod {

// Rational angle p/q mod 1, always reduced, 0 <= p < q. All arithmetic is
// exact in 64-bit integers (128-bit intermediates).
struct Angle {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Angle() = default;
  Angle(std::int64_t p, std::int64_t q);  // reduces mod 1

  bool operator==(const Angle& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Angle& o) const { return !(*this == o); }
  bool operator<(const Angle& o) const;  // as points of [0,1)

  double value() const { return double(num) / double(den); }
  std::string str() const;                       // "p/q"
  static Angle parse(const std::string& text);   // throws on malformed input
};

Angle angle_add(Angle a, Angle b);
Angle angle_mulD(Angle theta, int D);

struct AngleOrbit {
  std::int64_t preperiod = 0;  // 0 iff theta is periodic
  std::int64_t period = 1;
};

// Exact (pre)period of theta under multiplication by D.
AngleOrbit orbit_period(Angle theta, int D);

// Open circular arc swept counterclockwise from thetaR to thetaL; empty when
// the cut is degenerate (thetaR == thetaL).
struct CombCut {
  Angle thetaR;
  Angle thetaL;

  bool degenerate() const { return thetaR == thetaL; }
  // strict interior membership of the wedge arc
  bool arc_contains(Angle theta) const;
};

bool arcs_overlap(const CombCut& a, const CombCut& b);
bool wedges_pairwise_disjoint(const std::vector<CombCut>& cuts);

struct CombCutCycle {
  std::vector<CombCut> cuts;
  int degree = 2;   // D
  int period = 1;   // s, period of any boundary angle under xD

  // set-level invariance of the cut family under xD
  bool is_invariant() const;
};

// All unordered pairs of distinct angles with denominator dividing D^s - 1
// and exact period s under xD. Throws if D^s - 1 exceeds den_cap or if more
// than pair_cap pairs exist.
std::vector<std::pair<Angle, Angle>> enumerate_cut_candidates(
    int D, int s, std::size_t pair_cap = 100000, std::int64_t den_cap = 1 << 22);

// Wake angles -> the dynamic-plane pair (theta1 + 1/3, theta2 + 2/3).
std::pair<Angle, Angle> wake_to_dynamic_angles(Angle theta1, Angle theta2);

}  // namespace plmod
