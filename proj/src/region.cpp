#include "plmod/region.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>

#include "plmod/parallel.hpp"

namespace plmod {

GridSpec GridSpec::window(double x0, double x1, double y0, double y1, int nx, int ny) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.cx = (x0 + x1) / 2.0;
  g.cy = (y0 + y1) / 2.0;
  g.h = std::max((x1 - x0) / nx, (y1 - y0) / ny);
  return g;
}

std::size_t Region::cell_count() const {
  std::size_t n = 0;
  for (std::uint8_t b : mask) n += b;
  return n;
}

double Region::perimeter() const {
  std::size_t faces = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!mask[grid.idx(i, j)]) continue;
      if (!at(i - 1, j)) ++faces;
      if (!at(i + 1, j)) ++faces;
      if (!at(i, j - 1)) ++faces;
      if (!at(i, j + 1)) ++faces;
    }
  return double(faces) * grid.h;
}

std::vector<int> label_components(const GridSpec& g, const std::vector<std::uint8_t>& mask,
                                  int& n_components) {
  std::vector<int> label(mask.size(), 0);
  n_components = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || label[start]) continue;
    ++n_components;
    label[start] = n_components;
    queue.push_back(start);
    while (!queue.empty()) {
      std::size_t c = queue.front();
      queue.pop_front();
      int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int ni = i + di[k], nj = j + dj[k];
        if (!g.in_bounds(ni, nj)) continue;
        std::size_t nc = g.idx(ni, nj);
        if (mask[nc] && !label[nc]) {
          label[nc] = n_components;
          queue.push_back(nc);
        }
      }
    }
  }
  return label;
}

std::vector<float> distance_to_exterior(const GridSpec& g, const std::vector<std::uint8_t>& mask) {
  const float INF = 1e30f;
  std::vector<float> d(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) d[i] = mask[i] ? INF : 0.0f;
  const float C1 = 1.0f, C2 = 1.41421356f;
  // forward pass
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (d[c] == 0.0f) continue;
      float best = d[c];
      auto relax = [&](int ni, int nj, float w) {
        float nb = g.in_bounds(ni, nj) ? d[g.idx(ni, nj)] : 0.0f;  // outside = exterior
        best = std::min(best, nb + w);
      };
      relax(i - 1, j, C1);
      relax(i, j - 1, C1);
      relax(i - 1, j - 1, C2);
      relax(i + 1, j - 1, C2);
      d[c] = best;
    }
  // backward pass
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = g.nx - 1; i >= 0; --i) {
      std::size_t c = g.idx(i, j);
      if (d[c] == 0.0f) continue;
      float best = d[c];
      auto relax = [&](int ni, int nj, float w) {
        float nb = g.in_bounds(ni, nj) ? d[g.idx(ni, nj)] : 0.0f;
        best = std::min(best, nb + w);
      };
      relax(i + 1, j, C1);
      relax(i, j + 1, C1);
      relax(i + 1, j + 1, C2);
      relax(i - 1, j + 1, C2);
      d[c] = best;
    }
  return d;
}

Region keep_component_containing(const Region& r, cplx z) {
  int i = r.grid.i_of(z.real()), j = r.grid.j_of(z.imag());
  if (!r.grid.in_bounds(i, j) || !r.mask[r.grid.idx(i, j)])
    throw std::runtime_error("keep_component_containing: point not in region");
  int ncomp = 0;
  auto label = label_components(r.grid, r.mask, ncomp);
  int keep = label[r.grid.idx(i, j)];
  Region out;
  out.grid = r.grid;
  out.mask.assign(r.mask.size(), 0);
  for (std::size_t c = 0; c < r.mask.size(); ++c) out.mask[c] = (label[c] == keep) ? 1 : 0;
  return out;
}

Region fill_small_holes(const Region& r, std::size_t max_cells) {
  std::vector<std::uint8_t> comp(r.mask.size());
  for (std::size_t c = 0; c < r.mask.size(); ++c) comp[c] = r.mask[c] ? 0 : 1;
  int nc = 0;
  auto lbl = label_components(r.grid, comp, nc);
  std::vector<std::size_t> size(nc + 1, 0);
  std::vector<char> touches_frame(nc + 1, 0);
  for (int j = 0; j < r.grid.ny; ++j)
    for (int i = 0; i < r.grid.nx; ++i) {
      int l = lbl[r.grid.idx(i, j)];
      if (!l) continue;
      ++size[l];
      if (i == 0 || j == 0 || i == r.grid.nx - 1 || j == r.grid.ny - 1) touches_frame[l] = 1;
    }
  Region out = r;
  for (std::size_t c = 0; c < r.mask.size(); ++c) {
    int l = lbl[c];
    if (l && !touches_frame[l] && size[l] <= max_cells) out.mask[c] = 1;
  }
  return out;
}

EquipotentialResult equipotential_region(const Poly& p, double t, int resolution,
                                         std::optional<GridSpec> grid_override) {
  if (t <= 0.0) throw std::invalid_argument("equipotential_region: t must be positive");
  GridSpec g;
  if (grid_override) {
    g = *grid_override;
  } else {
    // bounding box of {G < t}: anchor a box at the critical orbits (inside
    // K_P when it is connected), then grow it until the level set fits
    double R = p.escape_radius();
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto absorb = [&](cplx z) {
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    };
    absorb(cplx(0.0));
    for (cplx c : critical_points(p)) {
      cplx z = c;
      for (int k = 0; k < 24 && std::abs(z) <= R; ++k) {
        absorb(z);
        z = p.eval(z);
      }
    }
    double pad = 0.25 * (x1 - x0 + y1 - y0) + 0.5;
    x0 -= pad; x1 += pad; y0 -= pad; y1 += pad;
    for (int round = 0; round < 12; ++round) {
      GridSpec probe = GridSpec::window(x0, x1, y0, y1, 256, 256);
      double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
      for (int j = 0; j < probe.ny; ++j)
        for (int i = 0; i < probe.nx; ++i) {
          cplx z = probe.center(i, j);
          if (green_potential(p, z) < t) {
            bx0 = std::min(bx0, z.real());
            bx1 = std::max(bx1, z.real());
            by0 = std::min(by0, z.imag());
            by1 = std::max(by1, z.imag());
          }
        }
      if (bx0 > bx1) throw std::runtime_error("equipotential_region: empty at probe resolution");
      bool touches = bx0 < x0 + 2.5 * probe.h || bx1 > x1 - 2.5 * probe.h ||
                     by0 < y0 + 2.5 * probe.h || by1 > y1 - 2.5 * probe.h;
      if (!touches) {
        double fpad = 2.0 * probe.h + 4.0 * (bx1 - bx0) / resolution;
        x0 = bx0 - fpad; x1 = bx1 + fpad; y0 = by0 - fpad; y1 = by1 + fpad;
        break;
      }
      double grow = 0.5 * (x1 - x0);
      x0 -= grow; x1 += grow; y0 -= grow; y1 += grow;
    }
    g = GridSpec::window(x0, x1, y0, y1, resolution, resolution);
  }
  Region r;
  r.grid = g;
  r.mask.assign(g.size(), 0);
  parallel_for(g.ny, [&](std::size_t j) {
    for (int i = 0; i < g.nx; ++i) {
      cplx z = g.center(i, static_cast<int>(j));
      if (green_potential(p, z) < t) r.mask[g.idx(i, static_cast<int>(j))] = 1;
    }
  });
  int ncomp = 0;
  label_components(g, r.mask, ncomp);
  return EquipotentialResult{std::move(r), ncomp != 1};
}

namespace {

// Closed polygon tracing the wedge boundary: down ray R, through the vertex,
// back up ray L, closed by an arc through the wedge sector at large radius.
std::vector<cplx> wedge_polygon(const GeoCut& cut) {
  if (cut.degenerate) return {};
  std::vector<cplx> poly;
  const auto& R = cut.traceR.points;
  const auto& L = cut.traceL.points;
  if (R.empty() || L.empty()) return {};
  poly.insert(poly.end(), R.begin(), R.end());
  poly.push_back(cut.vertex);
  poly.insert(poly.end(), L.rbegin(), L.rend());
  // arc from direction thetaL to thetaR traversing the wedge sector
  double rad = 1.2 * std::max(std::abs(R.front()), std::abs(L.front()));
  double aR = cut.comb.thetaR.value(), aL = cut.comb.thetaL.value();
  double span = aL - aR;
  while (span <= 0) span += 1.0;  // ccw arc length from R to L
  int steps = std::max(8, static_cast<int>(span * 360));
  for (int k = 0; k <= steps; ++k) {
    double a = aL - span * double(k) / steps;  // from L back to R through the sector
    poly.push_back(std::polar(rad, 2.0 * M_PI * a));
  }
  return poly;
}

bool point_in_polygon(const std::vector<cplx>& poly, cplx z) {
  bool inside = false;
  std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    double yi = poly[i].imag(), yj = poly[j].imag();
    double xi = poly[i].real(), xj = poly[j].real();
    if ((yi > z.imag()) != (yj > z.imag())) {
      double xc = xi + (z.imag() - yi) / (yj - yi) * (xj - xi);
      if (z.real() < xc) inside = !inside;
    }
  }
  return inside;
}

// scanline rasterization of the polygon interior on the grid
std::vector<std::uint8_t> polygon_mask(const std::vector<cplx>& poly, const GridSpec& g) {
  std::vector<std::uint8_t> mask(g.size(), 0);
  if (poly.empty()) return mask;
  std::size_t n = poly.size();
  for (int j = 0; j < g.ny; ++j) {
    double y = g.y_of(j);
    std::vector<double> xs;
    for (std::size_t i = 0, k = n - 1; i < n; k = i++) {
      double yi = poly[i].imag(), yk = poly[k].imag();
      if ((yi > y) != (yk > y)) {
        double xi = poly[i].real(), xk = poly[k].real();
        xs.push_back(xi + (y - yi) / (yk - yi) * (xk - xi));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t s = 0; s + 1 < xs.size(); s += 2) {
      int i0 = std::max(0, g.i_of(xs[s] + g.h * 0.5));
      int i1 = std::min(g.nx - 1, g.i_of(xs[s + 1] - g.h * 0.5));
      // include cells whose center lies in [xs[s], xs[s+1]]
      for (int i = i0; i <= i1; ++i)
        if (g.x_of(i) >= xs[s] && g.x_of(i) <= xs[s + 1]) mask[g.idx(i, j)] = 1;
    }
  }
  return mask;
}

}  // namespace

bool in_wedge(const GeoCut& cut, cplx z) {
  if (cut.degenerate) return false;
  return point_in_polygon(wedge_polygon(cut), z);
}

std::vector<std::uint8_t> wedge_mask_for(const GeoCut& cut, const GridSpec& g) {
  if (cut.degenerate) return std::vector<std::uint8_t>(g.size(), 0);
  return polygon_mask(wedge_polygon(cut), g);
}

Region truncate_by_wedges(const Region& U, const std::vector<GeoCut>& cuts,
                          const std::vector<double>& clearances, cplx basepoint) {
  if (clearances.size() != cuts.size())
    throw std::invalid_argument("truncate_by_wedges: one clearance per cut required");
  Region out = U;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const GeoCut& cut = cuts[k];
    if (cut.degenerate) continue;
    auto wmask = polygon_mask(wedge_polygon(cut), U.grid);
    for (int j = 0; j < U.grid.ny; ++j)
      for (int i = 0; i < U.grid.nx; ++i) {
        std::size_t c = U.grid.idx(i, j);
        if (!out.mask[c] || !wmask[c]) continue;
        if (std::abs(U.grid.center(i, j) - cut.vertex) > clearances[k]) out.mask[c] = 0;
      }
  }
  int bi = out.grid.i_of(basepoint.real()), bj = out.grid.j_of(basepoint.imag());
  if (!out.grid.in_bounds(bi, bj) || !out.mask[out.grid.idx(bi, bj)])
    throw std::runtime_error("truncate_by_wedges: basepoint disconnected or removed");
  return keep_component_containing(out, basepoint);
}

Region truncate_by_wedges(const Region& U, const std::vector<GeoCut>& cuts, double clearance,
                          cplx basepoint) {
  return truncate_by_wedges(U, cuts, std::vector<double>(cuts.size(), clearance), basepoint);
}

double cut_clearance(const GeoCut& cut, double t_over_D, double floor_clearance) {
  double d = floor_clearance;
  for (const RayTrace* tr : {&cut.traceR, &cut.traceL}) {
    for (std::size_t k = 0; k + 1 < tr->levels.size(); ++k) {
      if (tr->levels[k] >= t_over_D && tr->levels[k + 1] <= t_over_D) {
        d = std::max(d, 1.3 * std::abs(tr->points[k] - cut.vertex));
        break;
      }
    }
  }
  return d;
}

Region pullback_component(const Poly& p, const Region& U0, cplx basepoint) {
  const GridSpec& g = U0.grid;
  if (!U0.contains(p.eval(basepoint)))
    throw std::runtime_error("pullback_component: image of basepoint not in U0");
  auto dt = distance_to_exterior(g, U0.mask);
  auto inside_eroded = [&](cplx w, double lip_cells) {
    int i = g.i_of(w.real()), j = g.j_of(w.imag());
    if (!g.in_bounds(i, j)) return false;
    std::size_t c = g.idx(i, j);
    if (!U0.mask[c]) return false;
    return double(dt[c]) - 0.5 > lip_cells;
  };
  Region pre;
  pre.grid = g;
  pre.mask.assign(g.size(), 0);
  const double half = g.h / 2.0;
  parallel_for(g.ny, [&](std::size_t jj) {
    int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      cplx z = g.center(i, j);
      // every point of the cell lies within h/2 of a sample point, so the
      // image-side erosion needs |p'| h/2 with a safety factor for curvature
      double lip = 1.25 * 0.5 * std::abs(p.eval_deriv(z));  // in cell units
      bool ok = inside_eroded(p.eval(z), lip);
      for (int k = 0; k < 4 && ok; ++k) {
        cplx corner = z + cplx((k & 1) ? half : -half, (k & 2) ? half : -half);
        ok = inside_eroded(p.eval(corner), lip);
      }
      if (ok) pre.mask[g.idx(i, j)] = 1;
    }
  });
  return keep_component_containing(pre, basepoint);
}

double containment_margin(const Region& U1, const Region& U0) {
  auto dt = distance_to_exterior(U0.grid, U0.mask);
  double margin = 1e300;
  const GridSpec& g = U1.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!U1.mask[g.idx(i, j)]) continue;
      bool bdry = !U1.at(i - 1, j) || !U1.at(i + 1, j) || !U1.at(i, j - 1) || !U1.at(i, j + 1);
      if (!bdry) continue;
      margin = std::min(margin, double(dt[g.idx(i, j)]));
    }
  return (margin == 1e300 ? 0.0 : margin * g.h);
}

int pl_degree(const Poly& p, const Region& U1, const Region& U0, int n_samples,
              std::uint64_t seed) {
  auto dt0 = distance_to_exterior(U0.grid, U0.mask);
  auto dt1 = distance_to_exterior(U1.grid, U1.mask);
  float max_dt = 0.0f;
  for (std::size_t c = 0; c < U0.mask.size(); ++c) max_dt = std::max(max_dt, dt0[c]);
  float deep_thresh = std::max(4.0f, 0.3f * max_dt);
  std::vector<std::size_t> deep;
  for (std::size_t c = 0; c < U0.mask.size(); ++c)
    if (U0.mask[c] && dt0[c] > deep_thresh) deep.push_back(c);
  if (deep.empty()) throw std::runtime_error("pl_degree: carrier too thin for sampling");

  // roots within 1.5 cells of the U1 boundary are raster-ambiguous; count
  // them into a per-sample interval [lo, hi] and intersect across samples
  auto count_interval = [&](cplx w, int& lo, int& hi) {
    std::vector<cplx> coeffs = p.coeffs();
    coeffs[0] -= w;
    auto roots = poly_roots(Poly(std::move(coeffs)));
    lo = 0;
    hi = 0;
    for (const cplx& r : roots) {
      int i = U1.grid.i_of(r.real()), j = U1.grid.j_of(r.imag());
      bool inside_eroded = false, inside_dilated = false;
      if (U1.grid.in_bounds(i, j)) {
        std::size_t rc = U1.grid.idx(i, j);
        inside_eroded = U1.mask[rc] && dt1[rc] >= 2.0f;
      }
      for (int dj = -1; dj <= 1 && !inside_dilated; ++dj)
        for (int di = -1; di <= 1 && !inside_dilated; ++di)
          if (U1.at(i + di, j + dj)) inside_dilated = true;
      if (inside_eroded) ++lo;
      if (inside_dilated) ++hi;
    }
  };

  std::mt19937_64 rng(seed);
  int lo_all = 0, hi_all = p.degree();
  for (int s = 0; s < n_samples; ++s) {
    std::size_t c = deep[rng() % deep.size()];
    cplx w = U0.grid.center(static_cast<int>(c % U0.grid.nx), static_cast<int>(c / U0.grid.nx));
    int lo = 0, hi = 0;
    count_interval(w, lo, hi);
    lo_all = std::max(lo_all, lo);
    hi_all = std::min(hi_all, hi);
    if (lo_all > hi_all)
      throw std::runtime_error("pl_degree: inconsistent preimage counts (region too coarse)");
  }
  int crit_inside = 0;
  for (const cplx& cp : critical_points(p))
    if (U1.contains(cp)) ++crit_inside;
  int d;
  if (lo_all == hi_all)
    d = lo_all;
  else if (crit_inside + 1 >= lo_all && crit_inside + 1 <= hi_all)
    d = crit_inside + 1;  // Riemann-Hurwitz settles the raster ambiguity
  else
    throw std::runtime_error("pl_degree: inconsistent preimage counts (region too coarse)");
  if (d >= 2 && crit_inside != d - 1)
    throw std::runtime_error("pl_degree: critical point count does not match degree");
  return d;
}

CoreComponent core_component(const GeoCut& cut, const Region& U) {
  if (cut.degenerate) return CoreComponent{Region{U.grid, std::vector<std::uint8_t>(U.grid.size(), 0)}, true};
  if (!U.contains(cut.vertex)) throw std::runtime_error("core_component: vertex not inside region");
  const GridSpec& g = U.grid;
  auto wmask = polygon_mask(wedge_polygon(cut), g);
  std::vector<std::uint8_t> carrier(g.size(), 0);
  for (std::size_t c = 0; c < carrier.size(); ++c) carrier[c] = (wmask[c] && U.mask[c]) ? 1 : 0;

  // seeds on a small ring just inside the wedge near the vertex
  std::vector<std::size_t> seeds;
  for (int ring = 3; ring <= 6 && seeds.empty(); ++ring) {
    for (int k = 0; k < 64; ++k) {
      cplx z = cut.vertex + std::polar(double(ring) * g.h, 2.0 * M_PI * k / 64.0);
      int i = g.i_of(z.real()), j = g.j_of(z.imag());
      if (g.in_bounds(i, j) && carrier[g.idx(i, j)]) seeds.push_back(g.idx(i, j));
    }
  }
  if (seeds.empty()) return CoreComponent{Region{g, std::vector<std::uint8_t>(g.size(), 0)}, true};

  std::vector<std::uint8_t> fill(g.size(), 0);
  std::deque<std::size_t> queue(seeds.begin(), seeds.end());
  for (std::size_t s : seeds) fill[s] = 1;
  while (!queue.empty()) {
    std::size_t c = queue.front();
    queue.pop_front();
    int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int ni = i + di[k], nj = j + dj[k];
      if (!g.in_bounds(ni, nj)) continue;
      std::size_t nc = g.idx(ni, nj);
      if (carrier[nc] && !fill[nc]) {
        fill[nc] = 1;
        queue.push_back(nc);
      }
    }
  }
  return CoreComponent{Region{g, std::move(fill)}, false};
}

std::string to_string(ParalegalVerdict v) {
  switch (v) {
    case ParalegalVerdict::paralegal: return "paralegal";
    case ParalegalVerdict::not_wedges: return "not_paralegal(wedges)";
    case ParalegalVerdict::not_critical: return "not_paralegal(critical)";
    case ParalegalVerdict::not_univalent: return "not_paralegal(univalent)";
    case ParalegalVerdict::unresolved: return "unresolved";
  }
  return "?";
}

ParalegalReport paralegal_check(const Poly& p, const std::vector<GeoCut>& cuts, const Region& U1) {
  std::vector<CombCut> combs;
  for (const GeoCut& c : cuts) combs.push_back(c.comb);
  if (!wedges_pairwise_disjoint(combs))
    return {ParalegalVerdict::not_wedges, -1, "wedge arcs overlap"};

  std::vector<cplx> crit = critical_points(p);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    CoreComponent core = core_component(cuts[k], U1);
    if (core.empty) {
      if (cuts[k].degenerate) continue;
      return {ParalegalVerdict::unresolved, static_cast<int>(k), "core component not resolved at this h"};
    }
    for (const cplx& cp : crit)
      if (core.region.contains(cp))
        return {ParalegalVerdict::not_critical, static_cast<int>(k),
                "critical point inside core component"};

    // univalence proxy: preimage counts of deep sample points in the core
    auto dt = distance_to_exterior(core.region.grid, core.region.mask);
    std::vector<std::size_t> deep;
    for (std::size_t c = 0; c < core.region.mask.size(); ++c)
      if (core.region.mask[c] && dt[c] > 2.0f) deep.push_back(c);
    std::mt19937_64 rng(17);
    int samples = std::min<std::size_t>(8, deep.size());
    for (int s = 0; s < samples; ++s) {
      std::size_t c = deep[rng() % deep.size()];
      cplx w = p.eval(core.region.grid.center(static_cast<int>(c % core.region.grid.nx),
                                              static_cast<int>(c / core.region.grid.nx)));
      std::vector<cplx> coeffs = p.coeffs();
      coeffs[0] -= w;
      int inside = 0;
      for (const cplx& r : poly_roots(Poly(std::move(coeffs))))
        if (core.region.contains(r)) ++inside;
      if (inside > 1)
        return {ParalegalVerdict::not_univalent, static_cast<int>(k),
                "multiple preimages of a sample inside the core component"};
    }
  }
  return {ParalegalVerdict::paralegal, -1, ""};
}

std::vector<std::vector<cplx>> Region::boundary_polylines() const {
  // boundary faces chained into closed loops, interior on the left
  std::map<std::pair<long long, long long>, std::pair<long long, long long>> next;
  auto corner = [&](int i, int j) { return std::pair<long long, long long>(i, j); };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!mask[grid.idx(i, j)]) continue;
      // corners: (i,j) bottom-left of cell in corner units
      if (!at(i, j - 1)) next[corner(i, j)] = corner(i + 1, j);          // bottom, rightwards
      if (!at(i + 1, j)) next[corner(i + 1, j)] = corner(i + 1, j + 1);  // right, upwards
      if (!at(i, j + 1)) next[corner(i + 1, j + 1)] = corner(i, j + 1);  // top, leftwards
      if (!at(i - 1, j)) next[corner(i, j + 1)] = corner(i, j);          // left, downwards
    }
  std::vector<std::vector<cplx>> loops;
  auto to_z = [&](const std::pair<long long, long long>& c) {
    return cplx(grid.cx + (2.0 * c.first - grid.nx) * grid.h / 2.0,
                grid.cy + (2.0 * c.second - grid.ny) * grid.h / 2.0);
  };
  while (!next.empty()) {
    auto start = next.begin()->first;
    std::vector<cplx> loop;
    auto cur = start;
    do {
      loop.push_back(to_z(cur));
      auto it = next.find(cur);
      if (it == next.end()) break;
      auto nxt = it->second;
      next.erase(it);
      cur = nxt;
    } while (cur != start);
    if (loop.size() >= 4) loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace plmod
