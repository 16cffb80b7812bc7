#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plmod/region.hpp"

namespace plmod {

struct ModulusEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double h = 0.0;
  std::string method;
};

// Explicit resistor network. Edge extremal length of the path family joining
// the source attachments to the sink attachments equals the effective
// resistance; the solver reports a certified bracket for the discrete value
// (Dirichlet bound from the approximate potential, Thomson bound from a
// conservation-repaired unit flow).
struct ResistorNetwork {
  int n_nodes = 0;
  struct Edge {
    int a, b;
    double cond;
  };
  std::vector<Edge> edges;
  std::vector<std::pair<int, double>> source_attach;  // node, conductance
  std::vector<std::pair<int, double>> sink_attach;
  std::vector<double> initial_guess;  // optional potential seed
};

struct ResistanceBracket {
  double lower = 0.0;
  double upper = 0.0;
};

ResistanceBracket effective_resistance(const ResistorNetwork& net, double cg_tol = 1e-10);

// Modulus of a rasterized topological annulus via the dual pair of grid
// extremal-length problems (joining family vs once-crossing winding family).
// Brackets are inflated by 4 h perimeter / area for the raster boundary.
// Throws if the region is not an annulus (one bounded complement component).
ModulusEstimate annulus_modulus(const Region& A);

// Round annulus r1 < |z| < r2 measured on the conformally equivalent
// cylinder grid (exact chart); bracket width is solver tolerance only.
ModulusEstimate round_annulus_modulus(double r1, double r2, int n_angular = 256);

struct QuadSpec {
  Region carrier;
  std::vector<std::size_t> arcA;  // cell indices along the first marked arc
  std::vector<std::size_t> arcB;
};

// Extremal length of curves joining the two marked arcs inside the carrier,
// bracketed against the dual (complementary-arc) problem.
ModulusEstimate quad_extremal_length(const QuadSpec& spec);

// Axis-aligned rectangle quad, marked arcs = the two sides at x = 0 and
// x = width; EL = width / height in the continuum.
QuadSpec make_rectangle_quad(double width, double height, int cells_x);

// Sum rule oracle from the harmonic-mean step: with sum(1/ell_i) = 1/ell
// (conventions 1/0 = inf, 1/inf = 0), checks sum(ell_i) >= m^2 ell - slack.
// Throws if the harmonic precondition fails by more than 1e-12.
bool harmonic_sum_bound(double ell, const std::vector<double>& ells, double slack = 1e-12);

struct HarnessConfig {
  int n_configs = 100;
  std::uint64_t seed = 1;
  int resolution = 160;
  double tolerance = 0.02;
};

struct HarnessCase {
  std::string kind;
  double violation = 0.0;  // relative law violation, 0 when the law holds
  double deviation = 0.0;  // relative distance from the equality case when applicable
};

struct HarnessReport {
  std::vector<HarnessCase> cases;
  double max_violation = 0.0;
  int violations_beyond_tol = 0;
};

// Randomized parallel-law / series-law / Grotzsch configurations on
// reference shapes.
HarnessReport el_law_harness(const HarnessConfig& cfg);

}  // namespace plmod
