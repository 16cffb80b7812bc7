#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plmod/angle.hpp"
#include "plmod/poly.hpp"

namespace plmod {

enum class RayStatus { landed, unresolved, escaped_branch };

struct RayTrace {
  Angle angle;
  std::vector<double> levels;  // decreasing potentials t_k > 0
  std::vector<cplx> points;    // G(points[k]) = levels[k]
  RayStatus status = RayStatus::unresolved;
  std::optional<cplx> landing;
  bool parabolic_hint = false;  // tail stalled with geometric step decay
};

struct TraceOptions {
  double t_min = 1e-8;
  int steps_per_halving = 24;
  double tol_land = 1e-7;   // relative to poly scale
  int max_points = 20000;
  int newton_iters = 32;
};

// Point on the external ray R_p(theta) at potential level t, found by Newton
// on the n-th iterate with t*D^n lifted into the reference band. hint seeds
// the Newton iteration (pass the previous ray point when descending).
cplx ray_point_at_level(const Poly& p, Angle theta, double t, std::optional<cplx> hint = {});

// Solve phi_p(z) = exp(T + 2 pi i Theta) for T in the high-potential
// reference band where the telescoping product is reliable.
cplx boettcher_preimage(const Poly& p, double T, double Theta);

RayTrace trace_external_ray(const Poly& p, Angle theta, const TraceOptions& opt = {});

// Cauchy-limit landing estimate, Newton-refined against p^m(z) = z when the
// trace tail sits near a periodic point.
std::optional<cplx> landing_point(const Poly& p, const RayTrace& trace, double tol_land);

struct GeoCut {
  CombCut comb;
  RayTrace traceR;
  RayTrace traceL;
  cplx vertex{0.0};
  cplx vertex_multiplier{0.0};  // (p^m)'(vertex), m = vertex period
  int vertex_period = 1;
  bool degenerate = false;
};

enum class CommonLandingStatus { ok, degenerate, no_common_landing, unresolved_trace };

struct CommonLandingResult {
  CommonLandingStatus status;
  std::optional<GeoCut> cut;
};

// Builds the cut for two ray angles landing at a shared repelling/parabolic
// vertex; symmetric in its two angles.
CommonLandingResult common_landing(const Poly& p, Angle theta1, Angle theta2, double tol,
                                   const TraceOptions& opt = {});

// All angles with denominator dividing D^m - 1 whose rays land within tol of
// a; den_cap guards the enumeration budget.
std::vector<Angle> rays_landing_at(const Poly& p, cplx a, int m, double tol,
                                   std::int64_t den_cap = 1 << 20,
                                   const TraceOptions& opt = {});

std::string ray_trace_csv(const RayTrace& trace);

}  // namespace plmod
