#include <doctest.h>

#include <cmath>

#include "plmod/poly.hpp"
#include "plmod/ray.hpp"
#include "plmod/region.hpp"

using namespace plmod;

namespace {
const Poly z2({0, 0, 1});
const Poly z3({0, 0, 0, 1});
const Poly basilica({cplx(-1.0), cplx(0.0), cplx(1.0)});
}  // namespace

TEST_CASE("grid spec symmetry") {
  GridSpec g = GridSpec::window(-2.0, 2.0, -2.0, 2.0, 128, 128);
  for (int i = 0; i < 128; ++i) {
    CHECK(g.x_of(i) == -g.x_of(127 - i));  // exact negation
  }
  CHECK(g.in_bounds(0, 0));
  CHECK(!g.in_bounds(-1, 5));
}

TEST_CASE("equipotential: z^2 at t = log 2 is the disk of radius 2") {
  auto eq = equipotential_region(z2, std::log(2.0), 256);
  CHECK(!eq.disconnected);
  const Region& r = eq.region;
  int wrong = 0;
  for (int j = 0; j < r.grid.ny; ++j)
    for (int i = 0; i < r.grid.nx; ++i) {
      cplx z = r.grid.center(i, j);
      bool inside_disk = std::abs(z) < 2.0;
      bool in_mask = r.mask[r.grid.idx(i, j)] != 0;
      if (inside_disk != in_mask && std::abs(std::abs(z) - 2.0) > r.grid.h) ++wrong;
    }
  CHECK(wrong == 0);  // cell-accurate away from the circle
}

TEST_CASE("equipotential: z^3 radius 8, basilica contains the interval") {
  auto eq = equipotential_region(z3, std::log(8.0), 256);
  const Region& r = eq.region;
  CHECK(r.contains(cplx(7.9, 0.0)));
  CHECK(r.contains(cplx(0.0, -7.9)));
  CHECK(!r.contains(cplx(8.2, 0.0)));

  auto eb = equipotential_region(basilica, 1.0, 256);
  CHECK(eb.region.contains(cplx(1.62, 0.0)));
  CHECK(eb.region.contains(cplx(-1.62, 0.0)));
}

TEST_CASE("pullback: z^2 disk4 -> disk2, z^3 disk8 -> disk2") {
  Region disk4;
  disk4.grid = GridSpec::window(-4.5, 4.5, -4.5, 4.5, 512, 512);
  disk4.mask.assign(disk4.grid.size(), 0);
  for (int j = 0; j < 512; ++j)
    for (int i = 0; i < 512; ++i)
      if (std::abs(disk4.grid.center(i, j)) < 4.0) disk4.mask[disk4.grid.idx(i, j)] = 1;

  Region pre = pullback_component(z2, disk4, cplx(0.0));
  int wrong = 0;
  for (int j = 0; j < 512; ++j)
    for (int i = 0; i < 512; ++i) {
      cplx z = pre.grid.center(i, j);
      bool inside = std::abs(z) < 2.0;
      bool mask = pre.mask[pre.grid.idx(i, j)] != 0;
      if (inside != mask && std::abs(std::abs(z) - 2.0) > 3.0 * pre.grid.h) ++wrong;
    }
  CHECK(wrong == 0);

  Region disk8;
  disk8.grid = GridSpec::window(-8.5, 8.5, -8.5, 8.5, 512, 512);
  disk8.mask.assign(disk8.grid.size(), 0);
  for (int j = 0; j < 512; ++j)
    for (int i = 0; i < 512; ++i)
      if (std::abs(disk8.grid.center(i, j)) < 8.0) disk8.mask[disk8.grid.idx(i, j)] = 1;
  Region pre3 = pullback_component(z3, disk8, cplx(0.0));
  CHECK(pre3.contains(cplx(1.9, 0.0)));
  CHECK(!pre3.contains(cplx(2.2, 0.0)));
}

TEST_CASE("pullback functoriality: preimage of {G<t} is {G<t/D} within 2 cells") {
  double t = 1.0;
  auto eq = equipotential_region(basilica, t, 512);
  Region pre = pullback_component(basilica, eq.region, cplx(0.0));
  auto inner = equipotential_region(basilica, t / 2.0, 512, eq.region.grid);
  // Hausdorff distance via distance transforms
  auto dt_pre = distance_to_exterior(pre.grid, pre.mask);
  auto dt_inner = distance_to_exterior(inner.region.grid, inner.region.mask);
  double dmax = 0.0;
  for (std::size_t c = 0; c < pre.mask.size(); ++c) {
    if (pre.mask[c] && !inner.region.mask[c]) dmax = std::max(dmax, 1.0);  // pre should sit inside
    if (inner.region.mask[c] && !pre.mask[c]) dmax = std::max(dmax, double(dt_inner[c]));
  }
  // the conservative interior test erodes by Lip*h in the image, which costs
  // about two cells of one-sided Hausdorff slack on the preimage side
  CHECK(dmax <= 3.0);
  CHECK(dt_pre.size() == dt_inner.size());
}

TEST_CASE("pl_degree on exact preimages") {
  auto mkdisk = [](double R, double W, int res) {
    Region r;
    r.grid = GridSpec::window(-W, W, -W, W, res, res);
    r.mask.assign(r.grid.size(), 0);
    for (int j = 0; j < res; ++j)
      for (int i = 0; i < res; ++i)
        if (std::abs(r.grid.center(i, j)) < R) r.mask[r.grid.idx(i, j)] = 1;
    return r;
  };
  Region u0 = mkdisk(4.0, 4.5, 384);
  Region u1 = mkdisk(2.0, 4.5, 384);
  CHECK(pl_degree(z2, u1, u0) == 2);

  Region u0c = mkdisk(8.0, 8.5, 384);
  Region u1c = mkdisk(2.0, 8.5, 384);
  CHECK(pl_degree(z3, u1c, u0c) == 3);

  // degree-1 restriction of z^2 near the fixed point 1: small disk around 1
  Region small;
  small.grid = GridSpec::window(-0.5, 2.5, -1.5, 1.5, 384, 384);
  small.mask.assign(small.grid.size(), 0);
  Region big = small;
  for (int j = 0; j < 384; ++j)
    for (int i = 0; i < 384; ++i) {
      cplx z = small.grid.center(i, j);
      if (std::abs(std::log(z)) < 0.2) small.mask[small.grid.idx(i, j)] = 1;
      if (std::abs(std::log(z)) < 0.4) big.mask[big.grid.idx(i, j)] = 1;
    }
  CHECK(pl_degree(z2, small, big) == 1);
}

TEST_CASE("containment margin") {
  Region outer, inner;
  outer.grid = inner.grid = GridSpec::window(-2.0, 2.0, -2.0, 2.0, 200, 200);
  outer.mask.assign(outer.grid.size(), 0);
  inner.mask.assign(inner.grid.size(), 0);
  for (int j = 0; j < 200; ++j)
    for (int i = 0; i < 200; ++i) {
      double r = std::abs(outer.grid.center(i, j));
      if (r < 1.8) outer.mask[outer.grid.idx(i, j)] = 1;
      if (r < 1.0) inner.mask[inner.grid.idx(i, j)] = 1;
    }
  double m = containment_margin(inner, outer);
  CHECK(m > 0.7);
  CHECK(m < 0.9);
}

TEST_CASE("truncate_by_wedges: basilica alpha cut separates beta side") {
  auto res = common_landing(basilica, Angle(1, 3), Angle(2, 3), 1e-5);
  REQUIRE(res.status == CommonLandingStatus::ok);
  GeoCut cut = *res.cut;
  // orient the wedge away from the basepoint 0
  if (in_wedge(cut, cplx(0.0))) {
    std::swap(cut.comb.thetaR, cut.comb.thetaL);
    std::swap(cut.traceR, cut.traceL);
  }
  CHECK(!in_wedge(cut, cplx(0.0)));
  // beta fixed point sits on the far side of the alpha cut from -beta' side...
  // the wedge away from 0 contains the -beta endpoint (landing of ray 1/2)
  double beta = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(in_wedge(cut, cplx(-beta)));
  CHECK(!in_wedge(cut, cplx(beta)));

  auto eq = equipotential_region(basilica, 0.5, 384);
  Region u0 = truncate_by_wedges(eq.region, {cut}, 0.3, cplx(0.0));
  CHECK(u0.contains(cplx(0.0)));
  CHECK(u0.contains(cplx(beta)) == eq.region.contains(cplx(beta)));
  CHECK(!u0.contains(cplx(-beta)));
  // cells in the wedge within the clearance of the vertex survive
  cplx alpha = cut.vertex;
  cplx near_vertex_in_wedge = alpha + cplx(-0.05, 0.0);
  if (in_wedge(cut, near_vertex_in_wedge)) CHECK(u0.contains(near_vertex_in_wedge));

  // empty cut list: unchanged
  Region same = truncate_by_wedges(eq.region, {}, 0.3, cplx(0.0));
  CHECK(same.mask == eq.region.mask);

  // clearance at least the region diameter: unchanged
  Region degen = truncate_by_wedges(eq.region, {cut}, 50.0, cplx(0.0));
  CHECK(degen.mask == eq.region.mask);
}

TEST_CASE("core component: nonempty at the basilica alpha cut, stable under refinement") {
  auto res = common_landing(basilica, Angle(1, 3), Angle(2, 3), 1e-5);
  REQUIRE(res.status == CommonLandingStatus::ok);
  GeoCut cut = *res.cut;
  if (in_wedge(cut, cplx(0.0))) {
    std::swap(cut.comb.thetaR, cut.comb.thetaL);
    std::swap(cut.traceR, cut.traceL);
  }
  auto mkdisk = [&](int res_n) {
    Region r;
    r.grid = GridSpec::window(-2.0, 2.0, -2.0, 2.0, res_n, res_n);
    r.mask.assign(r.grid.size(), 0);
    for (int j = 0; j < res_n; ++j)
      for (int i = 0; i < res_n; ++i)
        if (std::abs(r.grid.center(i, j)) < 1.9) r.mask[r.grid.idx(i, j)] = 1;
    return r;
  };
  Region u_coarse = mkdisk(256), u_fine = mkdisk(512);
  CoreComponent cc = core_component(cut, u_coarse);
  REQUIRE(!cc.empty);
  CHECK(cc.region.cell_count() > 0);
  CoreComponent cf = core_component(cut, u_fine);
  REQUIRE(!cf.empty);
  // areas agree up to boundary cells
  double a1 = cc.region.area(), a2 = cf.region.area();
  double tol = 4.0 * (cc.region.perimeter() * cc.region.grid.h + cf.region.perimeter() * cf.region.grid.h);
  CHECK(std::abs(a1 - a2) < tol);

  // vertex on the boundary: error
  Region off = u_coarse;
  off.grid.cx += 3.0;  // shift window so the vertex is outside
  CHECK_THROWS(core_component(cut, off));

  // degenerate cut: empty region
  GeoCut degen;
  degen.degenerate = true;
  CHECK(core_component(degen, u_coarse).empty);
}

TEST_CASE("paralegal_check verdicts") {
  auto res = common_landing(basilica, Angle(1, 3), Angle(2, 3), 1e-5);
  REQUIRE(res.status == CommonLandingStatus::ok);
  GeoCut cut = *res.cut;
  if (in_wedge(cut, cplx(0.0))) {
    std::swap(cut.comb.thetaR, cut.comb.thetaL);
    std::swap(cut.traceR, cut.traceL);
  }

  // U1 = a disk that contains the vertex but no critical point in the core
  Region u1;
  u1.grid = GridSpec::window(-2.0, 2.0, -2.0, 2.0, 384, 384);
  u1.mask.assign(u1.grid.size(), 0);
  for (int j = 0; j < 384; ++j)
    for (int i = 0; i < 384; ++i)
      if (std::abs(u1.grid.center(i, j) - cut.vertex) < 0.5) u1.mask[u1.grid.idx(i, j)] = 1;
  auto rep = paralegal_check(basilica, {cut}, u1);
  CHECK(rep.verdict == ParalegalVerdict::paralegal);

  // overlapping wedges: combinatorial rejection
  GeoCut c2 = cut;
  c2.comb = CombCut{Angle(1, 4), Angle(3, 4)};  // overlaps (1/3, 2/3)... nested
  auto rep2 = paralegal_check(basilica, {cut, c2}, u1);
  CHECK(rep2.verdict == ParalegalVerdict::not_wedges);

  // critical point inside the core component: place U1 around the critical point 0
  // with a synthetic cut whose wedge covers it
  GeoCut flipped = cut;
  std::swap(flipped.comb.thetaR, flipped.comb.thetaL);
  std::swap(flipped.traceR, flipped.traceL);  // wedge now contains 0
  Region u1b;
  u1b.grid = u1.grid;
  u1b.mask.assign(u1b.grid.size(), 0);
  for (int j = 0; j < 384; ++j)
    for (int i = 0; i < 384; ++i)
      if (std::abs(u1b.grid.center(i, j) - cut.vertex) < 0.8) u1b.mask[u1b.grid.idx(i, j)] = 1;
  auto rep3 = paralegal_check(basilica, {flipped}, u1b);
  CHECK(rep3.verdict == ParalegalVerdict::not_critical);
}

TEST_CASE("region png-style mask helpers") {
  Region r;
  r.grid = GridSpec::window(0.0, 1.0, 0.0, 1.0, 16, 16);
  r.mask.assign(r.grid.size(), 1);
  CHECK(r.cell_count() == 256);
  CHECK(r.perimeter() == doctest::Approx(4.0).epsilon(1e-12));
  auto loops = r.boundary_polylines();
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() == 64);  // 4 * 16 corner steps
}
