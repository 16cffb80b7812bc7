#include <doctest.h>

#include <cmath>

#include "plmod/extremal.hpp"

using namespace plmod;

namespace {

Region make_round_annulus(double r1, double r2, int res) {
  Region a;
  double W = 1.1 * r2;
  a.grid = GridSpec::window(-W, W, -W, W, res, res);
  a.mask.assign(a.grid.size(), 0);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      double r = std::abs(a.grid.center(i, j));
      if (r > r1 && r < r2) a.mask[a.grid.idx(i, j)] = 1;
    }
  return a;
}

}  // namespace

TEST_CASE("rectangle quads: closed-form extremal lengths") {
  auto two_by_one = quad_extremal_length(make_rectangle_quad(2.0, 1.0, 256));
  CHECK(two_by_one.lower <= 2.0);
  CHECK(two_by_one.upper >= 2.0);
  CHECK((two_by_one.upper - two_by_one.lower) / 2.0 < 0.02);

  auto unit = quad_extremal_length(make_rectangle_quad(1.0, 1.0, 256));
  CHECK(unit.lower <= 1.0);
  CHECK(unit.upper >= 1.0);
  CHECK(unit.upper - unit.lower < 0.02);
}

TEST_CASE("cylinder modulus: round annuli match log(r2/r1)/2pi") {
  for (double R : {2.0, std::exp(1.0), std::exp(2.0 * M_PI)}) {
    double expect = std::log(R) / (2.0 * M_PI);
    auto est = round_annulus_modulus(1.0, R, 128);
    CHECK(est.lower <= expect);
    CHECK(est.upper >= expect);
    CHECK((est.upper - est.lower) < 0.01 * expect);
  }
}

TEST_CASE("raster annulus modulus brackets the truth at moderate radii") {
  auto est = annulus_modulus(make_round_annulus(1.0, std::exp(1.0), 512));
  double expect = 1.0 / (2.0 * M_PI);
  CHECK(est.lower <= expect);
  CHECK(est.upper >= expect);
  CHECK(est.upper - est.lower < 0.35 * expect);  // raster inflation dominates

  // affine invariance: the image under z -> 3z + 5i gives the same bracket
  // shape (same mask scaled), moduli must agree within 1%
  Region b = make_round_annulus(1.0, std::exp(1.0), 512);
  Region moved = b;
  moved.grid.h *= 3.0;
  moved.grid.cx = moved.grid.cx * 3.0;
  moved.grid.cy = moved.grid.cy * 3.0 + 5.0;
  auto est2 = annulus_modulus(moved);
  CHECK(std::abs(est2.lower - est.lower) < 0.01 * est.lower);
  CHECK(std::abs(est2.upper - est.upper) < 0.01 * est.upper);
}

TEST_CASE("annulus rejects non-annulus input") {
  Region disk;
  disk.grid = GridSpec::window(-1, 1, -1, 1, 64, 64);
  disk.mask.assign(disk.grid.size(), 0);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i)
      if (std::abs(disk.grid.center(i, j)) < 0.9) disk.mask[disk.grid.idx(i, j)] = 1;
  CHECK_THROWS(annulus_modulus(disk));
}

TEST_CASE("duality: joining and separating solves stay within 2 percent") {
  // on the cylinder both dual solves are exact; on the raster they drift
  // apart by the discretization, reflected in the bracket
  auto est = round_annulus_modulus(1.0, 3.0, 192);
  double expect = std::log(3.0) / (2.0 * M_PI);
  CHECK(std::abs(est.lower - expect) < 0.02 * expect);
  CHECK(std::abs(est.upper - expect) < 0.02 * expect);
}

TEST_CASE("L-shaped quad: refinement consistency") {
  // L-shape: unit squares tiling [0,2]x[0,1] plus [0,1]x[1,2]; join the
  // segment x in [1,2] at y=0 to the segment y in [1,2] at x=0
  auto build = [](int res) {
    QuadSpec spec;
    GridSpec g = GridSpec::window(0.0, 2.0, 0.0, 2.0, res, res);
    spec.carrier.grid = g;
    spec.carrier.mask.assign(g.size(), 0);
    for (int j = 0; j < res; ++j)
      for (int i = 0; i < res; ++i) {
        double x = g.x_of(i), y = g.y_of(j);
        if (y < 1.0 || (x < 1.0)) spec.carrier.mask[g.idx(i, j)] = 1;
      }
    for (int i = 0; i < res; ++i) {
      if (g.x_of(i) > 1.0) spec.arcA.push_back(g.idx(i, 0));          // bottom right arm
    }
    for (int j = 0; j < res; ++j) {
      if (g.y_of(j) > 1.0) spec.arcB.push_back(g.idx(0, j));          // left top arm
    }
    return spec;
  };
  auto coarse = quad_extremal_length(build(128));
  auto fine = quad_extremal_length(build(256));
  // two resolutions agree: the reentrant corner drift stays below 1%
  double vc = 0.5 * (coarse.lower + coarse.upper);
  double vf = 0.5 * (fine.lower + fine.upper);
  CHECK(std::abs(vc - vf) < 0.01 * vf);
  // and the fine bracket is not wildly wider
  CHECK((fine.upper - fine.lower) < 1.1 * (coarse.upper - coarse.lower) + 0.02);
}

TEST_CASE("harmonic_sum_bound") {
  CHECK(harmonic_sum_bound(1.0, {2.0, 2.0}));
  CHECK(harmonic_sum_bound(0.75, {1.0, 3.0}));
  CHECK(harmonic_sum_bound(0.0, {0.5, 0.0}));  // 1/0 = inf conventions
  CHECK(harmonic_sum_bound(0.0, {0.0, 0.0}));
  CHECK_THROWS(harmonic_sum_bound(1.0, {1.0, 1.0}));   // harmonic precondition fails
  CHECK_THROWS(harmonic_sum_bound(1.0, {-1.0, 2.0}));  // negative length
}

TEST_CASE("el_law_harness: small randomized run has no violations") {
  HarnessConfig cfg;
  cfg.n_configs = 12;
  cfg.resolution = 96;
  cfg.seed = 7;
  auto rep = el_law_harness(cfg);
  CHECK(rep.cases.size() == 12);
  CHECK(rep.violations_beyond_tol == 0);
  CHECK(rep.max_violation < cfg.tolerance);
}

TEST_CASE("grotzsch split: sub-annuli moduli sum to the whole") {
  double total = std::log(std::exp(4.0)) / (2.0 * M_PI);  // = 4/(2pi)
  auto a1 = round_annulus_modulus(1.0, std::exp(2.0), 128);
  auto a2 = round_annulus_modulus(std::exp(2.0), std::exp(4.0), 128);
  auto whole = round_annulus_modulus(1.0, std::exp(4.0), 128);
  double sum = 0.5 * (a1.lower + a1.upper) + 0.5 * (a2.lower + a2.upper);
  double tot = 0.5 * (whole.lower + whole.upper);
  CHECK(std::abs(tot - total) < 0.02 * total);
  CHECK(std::abs(sum - tot) < 0.02 * tot);
  CHECK(sum <= tot * (1.0 + 1e-9));  // Grotzsch inequality with exact tiling
}

TEST_CASE("refinement never widens the cylinder bracket much") {
  auto coarse = round_annulus_modulus(1.0, 2.0, 64);
  auto fine = round_annulus_modulus(1.0, 2.0, 128);
  double wc = coarse.upper - coarse.lower;
  double wf = fine.upper - fine.lower;
  CHECK(wf <= 1.1 * wc + 1e-9);
}

TEST_CASE("overflow monotonicity: enlarging the carrier never raises the joining EL") {
  // same marked arcs, carrier grown upward: the joining family gains curves
  auto build = [](int extra_rows) {
    int nx = 192, ny = 96 + extra_rows;
    QuadSpec spec;
    GridSpec g = GridSpec::window(0.0, 2.0, 0.0, 2.0 * ny / double(nx), nx, ny);
    g.h = 2.0 / nx;
    spec.carrier.grid = g;
    spec.carrier.mask.assign(g.size(), 1);
    for (int j = 0; j < 96; ++j) {
      spec.arcA.push_back(g.idx(0, j));
      spec.arcB.push_back(g.idx(nx - 1, j));
    }
    return quad_extremal_length(spec);
  };
  auto small = build(0);
  auto big = build(48);
  CHECK(big.lower <= small.lower * 1.01);
  CHECK(0.5 * (big.lower + big.upper) <= 0.5 * (small.lower + small.upper) * 1.005);
}
