#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plmod/certify.hpp"
#include "plmod/poly.hpp"

namespace plmod {

// f_{lambda,b}(z) = lambda z + b z^2 + z^3, the slice family with fixed
// point 0 of multiplier lambda.
struct CubicParams {
  cplx lambda{0.0};
  cplx b{0.0};
};

Poly cubic_poly(const CubicParams& params);
cplx cubic_eval(const CubicParams& params, cplx z);  // Horner, symmetric under (b,z) -> (-b,-z)

// the two finite critical points, roots of 3z^2 + 2bz + lambda
std::pair<cplx, cplx> cubic_criticals(const CubicParams& params);

// the point different from omega2 with the same image; throws if omega2 is
// not a simple critical point
cplx cocritical_point(const CubicParams& params, cplx omega2);

double cubic_escape_radius(const CubicParams& params);

// both critical orbits stay bounded
bool connectedness_test(const CubicParams& params, int max_iter = 512,
                        std::optional<double> r_esc = {});

// both critical orbits reach the certified contraction disk of the fixed
// point 0 (attracted-to-zero approximation of the principal hyperbolic
// component); requires |lambda| < 1
bool principal_hyperbolic_test(const CubicParams& params, int max_iter = 4096);

struct ParameterRayPoint {
  double level;
  cplx b;
};

struct ParameterRayTrace {
  Angle theta;
  std::vector<ParameterRayPoint> points;
  bool reached_t_min = false;
  bool newton_failed = false;
  cplx landing_estimate{0.0};   // last b (near the locus when reached_t_min)
  cplx landing_extrapolated{0.0};  // Aitken-accelerated tail limit
};

// Trace of the parameter ray: b-values with phi_{f_b}(cocritical(b)) on the
// ray of the given angle, descending the potential by the usual schedule.
// Wake roots are often parabolic, where landing is slow; the extrapolated
// estimate compensates.
ParameterRayTrace parameter_ray(cplx lambda, Angle theta, double t_min = 5e-5,
                                int steps_per_halving = 16);

enum class WakeVerdict { inside, outside, boundary, unresolved };

// Even-odd membership of b in the region bounded by the two parameter rays
// and their common landing point; the wake side is the one not containing
// b = 0. unresolved when the rays do not co-land at this resolution.
WakeVerdict wake_probe(cplx lambda, Angle theta1, Angle theta2, cplx b, double t_min = 5e-5,
                       double landing_tol = 0.2);

struct WakePair {
  Angle theta1, theta2;
  cplx root;
};

// Co-landing parameter-ray pairs discovered among angles with denominator
// <= q_cap (empirical wake scan).
std::vector<WakePair> scan_wakes(cplx lambda, std::int64_t q_cap = 16, double t_min = 5e-5,
                                 double landing_tol = 0.2);

struct RenormAttempt {
  bool ok = false;
  std::string failed_stage;
  std::string message;
  std::optional<WakePair> wake;
  PipelineOutcome pipeline;  // D = 3 certificates when ok
};

// Wake scan -> dynamic cut (theta1 + 1/3, theta2 + 2/3) -> QL restriction at
// basepoint 0 excluding the free critical point.
RenormAttempt immediate_renorm_attempt(const CubicParams& params, const RenormConfig& cfg = {},
                                       std::int64_t q_cap = 16);

// Raster layers over a symmetric window |Re b|, |Im b| <= halfwidth.
// connectedness: 255 in-locus, 0 escaped. principal: 255 in, 0 out,
// 128 undecided (bounded but not converged).
std::vector<std::uint8_t> connectedness_raster(cplx lambda, double halfwidth, int resolution,
                                               int max_iter = 256);
std::vector<std::uint8_t> principal_raster(cplx lambda, double halfwidth, int resolution,
                                           int max_iter = 1024);

}  // namespace plmod
