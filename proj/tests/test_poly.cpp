#include <doctest.h>

#include <cmath>
#include <random>

#include "plmod/poly.hpp"

using namespace plmod;

namespace {
Poly quadratic(double c_re, double c_im = 0.0) {
  return Poly({cplx(c_re, c_im), cplx(0.0), cplx(1.0)});
}
Poly cubic_lb(cplx lambda, cplx b) { return Poly({cplx(0.0), lambda, b, cplx(1.0)}); }
}  // namespace

TEST_CASE("eval: hand arithmetic") {
  CHECK(quadratic(-1.0).eval(cplx(2.0)) == cplx(3.0));
  CHECK(Poly({0, 0, 0, 1}).eval(cplx(0, 1)) == cplx(0, -1));
  // lambda z + b z^2 + z^3 at z=1: 0.5 + 1 + 1 = 2.5
  CHECK(cubic_lb(cplx(0.5), cplx(1.0)).eval(cplx(1.0)) == cplx(2.5));
}

TEST_CASE("iterate: symbolic composition") {
  Poly z2({0, 0, 1});
  Poly it3 = z2.iterate(3);
  CHECK(it3.degree() == 8);
  for (int k = 0; k < 8; ++k) CHECK(it3.coeffs()[k] == cplx(0.0));
  CHECK(it3.coeffs()[8] == cplx(1.0));

  // (z^2-1)^2 - 1 = z^4 - 2 z^2
  Poly basilica = quadratic(-1.0);
  Poly b2 = basilica.iterate(2);
  CHECK(b2.degree() == 4);
  CHECK(b2.coeffs()[0] == cplx(0.0));
  CHECK(b2.coeffs()[2] == cplx(-2.0));
  CHECK(b2.coeffs()[4] == cplx(1.0));

  Poly z3({0, 0, 0, 1});
  CHECK(z3.iterate(2).degree() == 9);

  CHECK_THROWS(z2.iterate(20, 4096));
}

TEST_CASE("critical points") {
  auto c1 = critical_points(quadratic(0.25));
  REQUIRE(c1.size() == 1);
  CHECK(std::abs(c1[0]) < 1e-12);

  // 3z^2 + 2z + 0.5 roots: (-1 +- i sqrt(0.5))/3
  auto c2 = critical_points(cubic_lb(cplx(0.5), cplx(1.0)));
  REQUIRE(c2.size() == 2);
  cplx expect1 = (cplx(-1.0) + cplx(0.0, std::sqrt(0.5))) / 3.0;
  cplx expect2 = std::conj(expect1);
  double d = std::min(std::abs(c2[0] - expect1) + std::abs(c2[1] - expect2),
                      std::abs(c2[0] - expect2) + std::abs(c2[1] - expect1));
  CHECK(d < 1e-10);

  auto c3 = critical_points(Poly({0, 0, 0, 1}));  // z^3 -> double root at 0
  REQUIRE(c3.size() == 2);
  CHECK(std::abs(c3[0]) < 1e-6);
  CHECK(std::abs(c3[1]) < 1e-6);
}

TEST_CASE("aberth handles high degree") {
  // z^100 - 1: hundredth roots of unity
  std::vector<cplx> c(101, cplx(0.0));
  c[0] = cplx(-1.0);
  c[100] = cplx(1.0);
  auto roots = poly_roots(Poly(c));
  REQUIRE(roots.size() == 100);
  for (const cplx& r : roots) {
    CHECK(std::abs(std::abs(r) - 1.0) < 1e-9);
    CHECK(std::abs(Poly(c).eval(r)) < 1e-8);
  }
}

TEST_CASE("green potential: closed forms") {
  Poly z2({0, 0, 1});
  CHECK(green_potential(z2, cplx(2.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(green_potential(z2, cplx(0.5)) == 0.0);

  // brute-force oracle for z^2 - 1 at z = 10: log|P^n| / 2^n for large n
  Poly basilica = quadratic(-1.0);
  cplx w(10.0);
  int n = 0;
  while (std::abs(w) < 1e120) {
    w = basilica.eval(w);
    ++n;
  }
  double oracle = std::log(std::abs(w)) / std::pow(2.0, n);
  CHECK(green_potential(basilica, cplx(10.0)) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("green potential: functional equation G(P(z)) = D G(z)") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (const Poly& p : {quadratic(-1.0), quadratic(0.3, 0.4), cubic_lb(cplx(0.5), cplx(1.0))}) {
    int tested = 0;
    std::uniform_real_distribution<double> rad(0.8, 6.0);
    for (int i = 0; i < 4000 && tested < 1000; ++i) {
      cplx z = std::polar(rad(rng), ang(rng));
      double g = green_potential(p, z);
      if (g < 0.01 || g > 5.0) continue;
      ++tested;
      double gp = green_potential(p, p.eval(z));
      CHECK(std::abs(gp - p.degree() * g) < 1e-8);
    }
    CHECK(tested == 1000);
  }
}

TEST_CASE("boettcher: conjugacy and identity cases") {
  Poly z2({0, 0, 1});
  cplx z(3.0, 1.0);
  CHECK(std::abs(boettcher_near_infinity(z2, z) - z) < 1e-12);

  Poly z3({0, 0, 0, 1});
  CHECK(std::abs(boettcher_near_infinity(z3, cplx(0.0, 3.0)) - cplx(0.0, 3.0)) < 1e-12);

  Poly basilica = quadratic(-1.0);
  cplx w(100.0, 0.0);
  cplx phi = boettcher_near_infinity(basilica, w);
  cplx phiP = boettcher_near_infinity(basilica, basilica.eval(w));
  CHECK(std::abs(phiP - phi * phi) < 1e-9 * std::abs(phi * phi));
}

TEST_CASE("boettcher: functional equation on random sample") {
  Poly basilica = quadratic(-1.0);
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> re(-8.0, 8.0), im(-8.0, 8.0);
  int tested = 0;
  while (tested < 200) {
    cplx z(re(rng), im(rng));
    if (green_potential(basilica, z) <= 1.05) continue;
    ++tested;
    cplx phi = boettcher_near_infinity(basilica, z);
    cplx phiP = boettcher_near_infinity(basilica, basilica.eval(z), 1.0);
    CHECK(std::abs(phiP - phi * phi) < 1e-9 * std::abs(phi * phi));
  }
  CHECK_THROWS_AS((void)boettcher_near_infinity(basilica, cplx(0.1, 0.1)), std::domain_error);
}

TEST_CASE("periodic points: basilica fixed points") {
  Poly basilica = quadratic(-1.0);
  auto orbits = find_periodic_points(basilica, 1);
  REQUIRE(orbits.size() == 2);
  double s5 = std::sqrt(5.0);
  for (const auto& o : orbits) {
    REQUIRE(o.period == 1);
    double re = o.points[0].real();
    bool is_beta = std::abs(re - (1.0 + s5) / 2.0) < 1e-9;
    bool is_alpha = std::abs(re - (1.0 - s5) / 2.0) < 1e-9;
    CHECK((is_beta || is_alpha));
    CHECK(o.kind == OrbitKind::repelling);
    CHECK(std::abs(o.multiplier - 2.0 * o.points[0]) < 1e-9);
  }
}

TEST_CASE("periodic points: z^2 period 2") {
  Poly z2({0, 0, 1});
  auto orbits = find_periodic_points(z2, 2);
  // roots of z^4 - z: 0 (attracting), 1 (repelling), period-2 pair with multiplier 4
  int n1 = 0, n2 = 0;
  for (const auto& o : orbits) {
    if (o.period == 1) {
      ++n1;
      if (std::abs(o.points[0]) < 1e-9) CHECK(o.kind == OrbitKind::attracting);
      if (std::abs(o.points[0] - cplx(1.0)) < 1e-9) {
        CHECK(o.kind == OrbitKind::repelling);
        CHECK(std::abs(o.multiplier - cplx(2.0)) < 1e-9);
      }
    } else {
      ++n2;
      CHECK(o.period == 2);
      CHECK(std::abs(o.multiplier - cplx(4.0)) < 1e-9);
      for (const cplx& pt : o.points)
        CHECK(std::abs(pt - std::exp(cplx(0, 2.0 * M_PI / 3.0))) *
                  std::abs(pt - std::exp(cplx(0, -2.0 * M_PI / 3.0))) <
              1e-8);
    }
  }
  CHECK(n1 == 2);
  CHECK(n2 == 1);
}

TEST_CASE("periodic points: orbit closes and multiplier is orbit-invariant") {
  Poly p = quadratic(-1.76);
  auto orbits = find_periodic_points(p, 3);
  int count_period3 = 0;
  for (const auto& o : orbits) {
    // orbit points map cyclically
    for (std::size_t i = 0; i < o.points.size(); ++i) {
      cplx nxt = p.eval(o.points[i]);
      CHECK(std::abs(nxt - o.points[(i + 1) % o.points.size()]) < 1e-7);
    }
    if (o.period != 3) continue;
    ++count_period3;
    // multiplier computed at each point of the orbit agrees
    for (const cplx& start : o.points) {
      cplx mult(1.0), w = start;
      for (int k = 0; k < 3; ++k) {
        mult *= p.eval_deriv(w);
        w = p.eval(w);
      }
      CHECK(std::abs(mult - o.multiplier) < 1e-9 * std::abs(o.multiplier));
    }
  }
  CHECK(count_period3 == 2);  // one attracting cycle, one repelling cycle
}

TEST_CASE("fixed point count equals degree") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    int D = 2 + trial % 4;
    std::vector<cplx> c(D + 1);
    for (int i = 0; i < D; ++i) c[i] = cplx(u(rng), u(rng));
    c[D] = cplx(1.0);
    Poly p(std::move(c));
    auto orbits = find_periodic_points(p, 1);
    std::size_t total = 0;
    for (const auto& o : orbits) total += o.points.size();
    CHECK(total == static_cast<std::size_t>(D));
  }
}

TEST_CASE("classification tolerances") {
  CHECK(classify_multiplier(cplx(1.0000001, 0)) == OrbitKind::repelling);
  CHECK(classify_multiplier(cplx(1.0 + 1e-10, 0)) == OrbitKind::parabolic);
  CHECK(classify_multiplier(cplx(-1.0)) == OrbitKind::parabolic);  // (-1)^2 = 1
  CHECK(classify_multiplier(std::polar(1.0, 0.123456)) == OrbitKind::indifferent_irrational);
  CHECK(classify_multiplier(cplx(1.5)) == OrbitKind::repelling);
  CHECK(classify_multiplier(cplx(0.2, 0.1)) == OrbitKind::attracting);
}

TEST_CASE("monicized conjugation") {
  // p(z) = 2z^2 + 1 -> conjugate by z -> kz with k = 1/2
  Poly p({cplx(1.0), cplx(0.0), cplx(2.0)});
  auto [q, k] = p.monicized();
  CHECK(q.is_monic());
  // q = s^{-1} o p o s must hold: q(z) = p(kz)/k
  for (cplx z : {cplx(0.3, 0.2), cplx(-1.0, 0.5)}) {
    CHECK(std::abs(q.eval(z) - p.eval(k * z) / k) < 1e-12);
  }
}
