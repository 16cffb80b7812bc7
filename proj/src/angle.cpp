#include "plmod/angle.hpp"

#include <array>
#include <map>
#include <numeric>
#include <stdexcept>

namespace plmod {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

i64 mod_pos(i128 a, i64 m) {
  i128 r = a % m;
  if (r < 0) r += m;
  return static_cast<i64>(r);
}

}  // namespace

Angle::Angle(i64 p, i64 q) {
  if (q <= 0) throw std::invalid_argument("Angle: denominator must be positive");
  p = mod_pos(p, q);
  i64 g = std::gcd(p, q);
  num = p / g;
  den = q / g;
}

bool Angle::operator<(const Angle& o) const {
  return i128(num) * o.den < i128(o.num) * den;
}

std::string Angle::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Angle Angle::parse(const std::string& text) {
  std::size_t slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      std::size_t pos = 0;
      i64 p = std::stoll(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing characters");
      return Angle(p, 1);
    }
    std::size_t pos = 0;
    i64 p = std::stoll(text.substr(0, slash), &pos);
    if (pos != slash) throw std::invalid_argument("bad numerator");
    std::string den_part = text.substr(slash + 1);
    i64 q = std::stoll(den_part, &pos);
    if (pos != den_part.size()) throw std::invalid_argument("bad denominator");
    return Angle(p, q);
  } catch (const std::exception&) {
    throw std::invalid_argument("Angle::parse: malformed angle '" + text + "'");
  }
}

Angle angle_add(Angle a, Angle b) {
  i64 g = std::gcd(a.den, b.den);
  i64 lcm = a.den / g * b.den;
  i128 p = i128(a.num) * (lcm / a.den) + i128(b.num) * (lcm / b.den);
  return Angle(mod_pos(p, lcm), lcm);
}

Angle angle_mulD(Angle theta, int D) {
  if (D < 2) throw std::invalid_argument("angle_mulD: D must be >= 2");
  return Angle(mod_pos(i128(theta.num) * D, theta.den), theta.den);
}

AngleOrbit orbit_period(Angle theta, int D) {
  if (D < 2) throw std::invalid_argument("orbit_period: D must be >= 2");
  // Strip factors of q shared with D: q_k = q / gcd(q, D^k) stabilizes at the
  // D-coprime part q'; the number of steps is the preperiod, and the period
  // is the multiplicative order of D mod q'.
  i64 q = theta.den;
  i64 pre = 0;
  for (;;) {
    i64 g = std::gcd(q, i64(D));
    if (g == 1) break;
    q /= g;
    ++pre;
  }
  if (q == 1) {
    // eventually lands on angle 0, fixed
    return AngleOrbit{pre, 1};
  }
  // the order depends on (q', D) only; cache it so exhaustive sweeps over
  // numerators stay linear
  thread_local std::map<std::pair<i64, int>, i64> ord_cache;
  auto key = std::make_pair(q, D);
  auto it = ord_cache.find(key);
  if (it != ord_cache.end()) return AngleOrbit{pre, it->second};
  i64 x = mod_pos(D, q);
  i64 s = 1;
  while (x != 1) {
    x = mod_pos(i128(x) * D, q);
    ++s;
    if (s > q) throw std::logic_error("orbit_period: order walk failed");
  }
  if (ord_cache.size() > (1u << 20)) ord_cache.clear();
  ord_cache.emplace(key, s);
  return AngleOrbit{pre, s};
}

bool CombCut::arc_contains(Angle theta) const {
  if (degenerate()) return false;
  // circular position of theta relative to thetaR, measured ccw
  auto diff_less = [](const Angle& a, const Angle& b, const Angle& base) {
    // compare (a - base) mod 1 < (b - base) mod 1 exactly
    auto frac = [&base](const Angle& x) {
      i64 lcm_g = std::gcd(x.den, base.den);
      i64 lcm = x.den / lcm_g * base.den;
      i128 v = i128(x.num) * (lcm / x.den) - i128(base.num) * (lcm / base.den);
      i128 m = lcm;
      i128 r = v % m;
      if (r < 0) r += m;
      return std::pair<i128, i64>(r, lcm);
    };
    auto [ra, la] = frac(a);
    auto [rb, lb] = frac(b);
    return ra * lb < rb * la;
  };
  if (theta == thetaR || theta == thetaL) return false;
  return diff_less(theta, thetaL, thetaR);
}

bool arcs_overlap(const CombCut& a, const CombCut& b) {
  if (a.degenerate() || b.degenerate()) return false;
  return a.arc_contains(b.thetaR) || a.arc_contains(b.thetaL) ||
         b.arc_contains(a.thetaR) || b.arc_contains(a.thetaL) ||
         (a.thetaR == b.thetaR && a.thetaL == b.thetaL);
}

bool wedges_pairwise_disjoint(const std::vector<CombCut>& cuts) {
  for (std::size_t i = 0; i < cuts.size(); ++i)
    for (std::size_t j = i + 1; j < cuts.size(); ++j)
      if (arcs_overlap(cuts[i], cuts[j])) return false;
  return true;
}

bool CombCutCycle::is_invariant() const {
  // cuts compare as unordered ray pairs: the dynamics may swap the two rays
  // landing at a vertex
  auto key = [](Angle a, Angle b) {
    if (b < a) std::swap(a, b);
    return std::array<i64, 4>{a.num, a.den, b.num, b.den};
  };
  std::vector<std::array<i64, 4>> have;
  for (const CombCut& c : cuts) have.push_back(key(c.thetaR, c.thetaL));
  for (const CombCut& c : cuts) {
    auto img = key(angle_mulD(c.thetaR, degree), angle_mulD(c.thetaL, degree));
    bool found = false;
    for (const auto& k : have)
      if (k == img) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

std::vector<std::pair<Angle, Angle>> enumerate_cut_candidates(int D, int s,
                                                              std::size_t pair_cap,
                                                              std::int64_t den_cap) {
  if (s < 1) throw std::invalid_argument("enumerate_cut_candidates: s must be >= 1");
  i128 m = 1;
  for (int k = 0; k < s; ++k) {
    m *= D;
    if (m - 1 > den_cap) throw std::runtime_error("enumerate_cut_candidates: denominator budget exceeded");
  }
  i64 M = static_cast<i64>(m - 1);  // >= 1 since D >= 2
  std::vector<Angle> uniq;
  for (i64 p = 0; p < std::max<i64>(M, 1); ++p) {
    Angle a(p, M);
    AngleOrbit ao = orbit_period(a, D);
    if (ao.preperiod == 0 && ao.period == s) uniq.push_back(a);
  }
  std::vector<std::pair<Angle, Angle>> pairs;
  for (std::size_t i = 0; i < uniq.size(); ++i)
    for (std::size_t j = i + 1; j < uniq.size(); ++j) {
      pairs.emplace_back(uniq[i], uniq[j]);
      if (pairs.size() > pair_cap)
        throw std::runtime_error("enumerate_cut_candidates: pair budget exceeded");
    }
  return pairs;
}

std::pair<Angle, Angle> wake_to_dynamic_angles(Angle theta1, Angle theta2) {
  return {angle_add(theta1, Angle(1, 3)), angle_add(theta2, Angle(2, 3))};
}

}  // namespace plmod
