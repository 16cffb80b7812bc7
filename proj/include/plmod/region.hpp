#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plmod/poly.hpp"
#include "plmod/ray.hpp"

namespace plmod {

// Uniform raster over a rectangle. Cell centers are computed with an
// integer-symmetric formula so windows centered at 0 raster exactly
// symmetrically under z -> -z.
struct GridSpec {
  double cx = 0.0, cy = 0.0;  // window center
  double h = 1.0;             // cell size
  int nx = 0, ny = 0;

  double x_of(int i) const { return cx + (2 * i + 1 - nx) * (h / 2.0); }
  double y_of(int j) const { return cy + (2 * j + 1 - ny) * (h / 2.0); }
  cplx center(int i, int j) const { return cplx(x_of(i), y_of(j)); }
  int i_of(double x) const { return static_cast<int>(std::floor((x - cx) / h + nx / 2.0)); }
  int j_of(double y) const { return static_cast<int>(std::floor((y - cy) / h + ny / 2.0)); }
  bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  std::size_t idx(int i, int j) const { return std::size_t(j) * nx + i; }
  std::size_t size() const { return std::size_t(nx) * ny; }

  static GridSpec window(double x0, double x1, double y0, double y1, int nx, int ny);
};

struct Region {
  GridSpec grid;
  std::vector<std::uint8_t> mask;  // 1 = interior cell

  bool at(int i, int j) const { return grid.in_bounds(i, j) && mask[grid.idx(i, j)]; }
  bool contains(cplx z) const { return at(grid.i_of(z.real()), grid.j_of(z.imag())); }
  std::size_t cell_count() const;
  double area() const { return double(cell_count()) * grid.h * grid.h; }
  // number of interior/exterior adjacency faces times h
  double perimeter() const;

  // closed boundary polylines (marching squares on cell corners)
  std::vector<std::vector<cplx>> boundary_polylines() const;
};

// connected component labels of the true cells (4-connectivity); 0 = not set
std::vector<int> label_components(const GridSpec& g, const std::vector<std::uint8_t>& mask,
                                  int& n_components);

// distance transform in cell units: for true cells, L2-ish (chamfer 1/1.41)
// distance to the nearest false-or-outside cell center
std::vector<float> distance_to_exterior(const GridSpec& g, const std::vector<std::uint8_t>& mask);

Region keep_component_containing(const Region& r, cplx z);

// Fills bounded complement components of at most max_cells cells (raster
// noise), leaving genuine holes alone.
Region fill_small_holes(const Region& r, std::size_t max_cells);

// cells with G(center) < t; flags.disconnected set when the result has more
// than one component (K_P disconnected or t below resolution)
struct EquipotentialResult {
  Region region;
  bool disconnected = false;
};
EquipotentialResult equipotential_region(const Poly& p, double t, int resolution,
                                         std::optional<GridSpec> grid_override = {});

// Removes the far part (farther than clearance from the cut vertex) of every
// wedge from U, then keeps the component of the basepoint. Throws if the
// basepoint lands in a removed cell.
Region truncate_by_wedges(const Region& U, const std::vector<GeoCut>& cuts, double clearance,
                          cplx basepoint);
Region truncate_by_wedges(const Region& U, const std::vector<GeoCut>& cuts,
                          const std::vector<double>& clearances, cplx basepoint);

// Clearance for an invariant cut: the pullback of the truncated region hugs
// the rays wherever their potential is below t/D, so the kept collar must
// reach the ray points at that level.
double cut_clearance(const GeoCut& cut, double t_over_D, double floor_clearance);

// Side test against a traced cut: true if z lies in the wedge of the cut
// (region bounded by the two ray traces, on the wedge-arc side).
bool in_wedge(const GeoCut& cut, cplx z);

// Rasterized wedge membership over a grid (scanline fill of the wedge
// polygon); much cheaper than per-point in_wedge for full-grid sweeps.
std::vector<std::uint8_t> wedge_mask_for(const GeoCut& cut, const GridSpec& g);

// Component of p^{-1}(U0) containing the basepoint, conservative cell test.
Region pullback_component(const Poly& p, const Region& U0, cplx basepoint);

struct PLRestriction {
  Poly p;            // the map restricted (often an iterate)
  Region U0, U1;
  int degree = 1;
  cplx basepoint{0.0};
  double margin = 0.0;  // min distance between boundary of U1 and of U0
};

// Degree via preimage counts of sample points, cross-checked against
// 1 + #critical points in U1. Throws on inconsistent counts.
int pl_degree(const Poly& p, const Region& U1, const Region& U0, int n_samples = 12,
              std::uint64_t seed = 2024);

double containment_margin(const Region& U1, const Region& U0);

struct CoreComponent {
  Region region;
  bool empty = false;
};

// Component of wedge(cut) intersected with U adjacent to both rays at the
// vertex. Throws if the vertex is not inside U.
CoreComponent core_component(const GeoCut& cut, const Region& U);

enum class ParalegalVerdict { paralegal, not_wedges, not_critical, not_univalent, unresolved };

std::string to_string(ParalegalVerdict v);

struct ParalegalReport {
  ParalegalVerdict verdict = ParalegalVerdict::unresolved;
  int failing_cut = -1;
  std::string detail;
};

// (i) wedge arcs pairwise disjoint (exact), (ii) no critical point of p in
// any core component of wedge cap U1, (iii) preimage counts of samples in
// each core component <= 1.
ParalegalReport paralegal_check(const Poly& p, const std::vector<GeoCut>& cuts, const Region& U1);

}  // namespace plmod
