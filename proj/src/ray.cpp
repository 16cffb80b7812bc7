#include "plmod/ray.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plmod {

// Solve phi_p(zeta) = exp(T + 2 pi i Theta) for T in the reference band
// [t0, D*t0); out there phi is a small perturbation of the identity.
cplx boettcher_preimage(const Poly& p, double T, double Theta) {
  cplx target = std::exp(cplx(T, 2.0 * M_PI * Theta));
  cplx z = target;
  for (int it = 0; it < 48; ++it) {
    cplx phi, dphi;
    boettcher_with_deriv(p, z, phi, dphi);
    cplx step = (phi - target) / dphi;
    z -= step;
    if (std::abs(step) < 1e-14 * std::abs(z)) break;
  }
  return z;
}

namespace {

struct LevelSolver {
  const Poly& p;
  double t0;
  double logD;

  // Newton on p^n(z) = zeta where n lifts t into [t0, D*t0).
  std::optional<cplx> solve(Angle theta, double t, cplx guess, int newton_iters) const {
    int n = 0;
    double T = t;
    Angle Th = theta;
    while (T < t0) {
      T *= p.degree();
      Th = angle_mulD(Th, p.degree());
      ++n;
      if (n > 2048) return std::nullopt;
    }
    double Theta = double(Th.num) / double(Th.den);
    cplx zeta = boettcher_preimage(p, T, Theta);
    cplx z = guess;
    for (int it = 0; it < newton_iters; ++it) {
      // w = p^n(z), dw = (p^n)'(z)
      cplx w = z, dw = cplx(1.0);
      for (int k = 0; k < n; ++k) {
        cplx pv, dv;
        p.eval_both(w, pv, dv);
        dw *= dv;
        w = pv;
        if (std::abs(w) > 1e200) return std::nullopt;
      }
      cplx diff = w - zeta;
      if (dw == cplx(0.0)) return std::nullopt;
      cplx step = diff / dw;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
      z -= step;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) return z;
    }
    // accept if the functional equation residual is small
    cplx w = z;
    for (int k = 0; k < n; ++k) w = p.eval(w);
    if (std::abs(w - zeta) < 1e-8 * (1.0 + std::abs(zeta))) return z;
    return std::nullopt;
  }
};

// Rays land on repelling points only polynomially fast in the potential, so
// a raw descent to t_min rarely meets a tight Cauchy tolerance. The tail is
// asymptotically geometric in the step index; Aitken extrapolation followed
// by Newton against p^m(z) = z recovers the landing point to full precision.
static std::optional<cplx> resolve_periodic_landing_at(const Poly& p, int m,
                                                       const std::vector<cplx>& pts,
                                                       std::size_t last, double scale) {
  if (last < 5) return std::nullopt;
  cplx d1 = pts[last] - pts[last - 1];
  cplx d0 = pts[last - 1] - pts[last - 2];
  if (std::abs(d0) == 0.0) return pts[last];
  double rho = std::abs(d1) / std::abs(d0);
  if (rho > 0.999) return std::nullopt;  // stalled (parabolic-like); do not guess

  cplx dd = d1 - d0;
  cplx est = (std::abs(dd) > 0.0) ? pts[last] - d1 * d1 / dd : pts[last];

  cplx z = est;
  for (int it = 0; it < 64; ++it) {
    cplx w = z, dw = cplx(1.0);
    for (int k = 0; k < m; ++k) {
      cplx pv, dv;
      p.eval_both(w, pv, dv);
      dw *= dv;
      w = pv;
    }
    cplx f = w - z, df = dw - cplx(1.0);
    if (df == cplx(0.0)) return std::nullopt;
    cplx step = f / df;
    z -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
  }
  // the refined point must be consistent with the tail geometry
  double tail_gap = std::abs(d1) / std::max(1e-300, 1.0 - rho);
  if (std::abs(z - pts[last]) > 4.0 * tail_gap + 1e-9 * scale) return std::nullopt;
  if (std::abs(z - pts[last]) > std::abs(z - pts[last - 3]) + 1e-12 * scale)
    return std::nullopt;  // tail not approaching the candidate
  cplx mult = cplx(1.0), w = z;
  for (int k = 0; k < m; ++k) {
    mult *= p.eval_deriv(w);
    w = p.eval(w);
  }
  if (std::abs(mult) < 1.0 - 1e-9) return std::nullopt;  // landing must be repelling/parabolic
  return z;
}

// The descent schedule truncates its final step at t_min, so the geometric
// tail model may only hold after dropping trailing points; try a few ends.
static std::optional<cplx> resolve_periodic_landing(const Poly& p, Angle theta,
                                                    const std::vector<cplx>& pts,
                                                    double scale) {
  AngleOrbit ao = orbit_period(theta, p.degree());
  if (ao.preperiod != 0) return std::nullopt;
  int m = static_cast<int>(ao.period);
  if (pts.size() < 8) return std::nullopt;
  for (std::size_t shift = 1; shift <= 3; ++shift) {
    auto res = resolve_periodic_landing_at(p, m, pts, pts.size() - shift, scale);
    if (res) return res;
  }
  return std::nullopt;
}

}  // namespace

cplx ray_point_at_level(const Poly& p, Angle theta, double t, std::optional<cplx> hint) {
  if (!p.is_monic()) throw std::invalid_argument("ray_point_at_level: polynomial must be monic");
  if (t <= 0.0) throw std::invalid_argument("ray_point_at_level: t must be positive");
  double t0 = 2.0 * std::log(p.escape_radius());
  if (t >= t0) return boettcher_preimage(p, t, theta.value());
  LevelSolver solver{p, t0, std::log(double(p.degree()))};
  if (hint) {
    auto res = solver.solve(theta, t, *hint, 48);
    if (!res) throw std::runtime_error("ray_point_at_level: newton divergence");
    return *res;
  }
  // no seed: descend from the reference band so Newton always starts close
  cplx z = boettcher_preimage(p, t0, theta.value());
  double lvl = t0;
  const double shrink = std::pow(2.0, -1.0 / 8.0);
  while (lvl > t) {
    double next = std::max(lvl * shrink, t);
    auto res = solver.solve(theta, next, z, 48);
    if (!res) throw std::runtime_error("ray_point_at_level: newton divergence");
    z = *res;
    lvl = next;
  }
  return z;
}

RayTrace trace_external_ray(const Poly& p, Angle theta, const TraceOptions& opt) {
  if (!p.is_monic()) throw std::invalid_argument("trace_external_ray: polynomial must be monic");
  if (opt.t_min <= 0.0) throw std::invalid_argument("trace_external_ray: t_min must be positive");
  RayTrace tr;
  tr.angle = theta;

  const double t0 = 2.0 * std::log(p.escape_radius());
  const double shrink = std::pow(2.0, -1.0 / double(opt.steps_per_halving));
  LevelSolver solver{p, t0, std::log(double(p.degree()))};
  const double scale = std::max(1.0, p.escape_radius() / 2.0);

  double t = t0;
  cplx z = boettcher_preimage(p, t0, theta.value());
  tr.levels.push_back(t);
  tr.points.push_back(z);

  while (t > opt.t_min) {
    double t_next = std::max(t * shrink, opt.t_min);
    // branch guard: retry with halved potential steps on Newton failure or
    // on a jump larger than the local step scale
    double reached = t;
    double sub = t_next;
    cplx cur = z;
    bool ok = false;
    int budget = 64;
    while (budget-- > 0) {
      auto res = solver.solve(theta, sub, cur, opt.newton_iters);
      bool accepted = false;
      if (res) {
        double jump = std::abs(*res - cur);
        double local = std::abs(cur) + scale;
        accepted = jump < 0.5 * local;
      }
      if (accepted) {
        cur = *res;
        reached = sub;
        if (sub <= t_next) {
          ok = true;
          break;
        }
        sub = std::max(t_next, sub * shrink);
      } else {
        sub = std::sqrt(sub * reached);  // halve the step toward the level reached
        if (sub >= reached * 0.999999) break;  // step-halving exhausted
      }
    }
    if (!ok) {
      tr.status = RayStatus::escaped_branch;
      return tr;
    }
    z = cur;
    t = t_next;
    tr.levels.push_back(t);
    tr.points.push_back(z);
    if (static_cast<int>(tr.points.size()) > opt.max_points) {
      tr.status = RayStatus::unresolved;
      return tr;
    }

    // early landing: tail of the last 10 points within tol_land
    if (tr.points.size() >= 10) {
      double diam = 0.0;
      std::size_t n = tr.points.size();
      for (std::size_t i = n - 10; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          diam = std::max(diam, std::abs(tr.points[i] - tr.points[j]));
      if (diam < opt.tol_land * scale) {
        tr.status = RayStatus::landed;
        tr.landing = tr.points.back();
        return tr;
      }
    }
  }

  // reached t_min without Cauchy convergence
  std::size_t n = tr.points.size();
  double diam = 0.0;
  for (std::size_t i = n - std::min<std::size_t>(10, n); i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      diam = std::max(diam, std::abs(tr.points[i] - tr.points[j]));
  if (diam < opt.tol_land * scale) {
    tr.status = RayStatus::landed;
    tr.landing = tr.points.back();
    return tr;
  }
  if (auto accel = resolve_periodic_landing(p, theta, tr.points, scale)) {
    tr.status = RayStatus::landed;
    tr.landing = accel;
    return tr;
  }
  tr.status = RayStatus::unresolved;
  // stalled tail with near-unit step decay: flag parabolic proximity
  if (n >= 21) {
    int slow = 0;
    for (std::size_t i = n - 18; i < n; ++i) {
      double s1 = std::abs(tr.points[i] - tr.points[i - 1]);
      double s0 = std::abs(tr.points[i - 1] - tr.points[i - 2]);
      if (s0 > 0 && s1 / s0 > 0.97) ++slow;
    }
    if (slow >= 16) tr.parabolic_hint = true;
  }
  return tr;
}

std::optional<cplx> landing_point(const Poly& p, const RayTrace& trace, double tol_land) {
  if (trace.status != RayStatus::landed || !trace.landing) return std::nullopt;
  cplx est = *trace.landing;
  // Newton refinement against p^m(z) = z for the angle period m
  AngleOrbit ao = orbit_period(trace.angle, p.degree());
  if (ao.preperiod != 0) return est;  // preperiodic landing: keep the Cauchy estimate
  int m = static_cast<int>(ao.period);
  cplx z = est;
  for (int it = 0; it < 64; ++it) {
    cplx w = z, dw = cplx(1.0);
    for (int k = 0; k < m; ++k) {
      cplx pv, dv;
      p.eval_both(w, pv, dv);
      dw *= dv;
      w = pv;
    }
    cplx f = w - z;
    cplx df = dw - cplx(1.0);
    if (df == cplx(0.0)) break;
    cplx step = f / df;
    z -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
  }
  // accept the refinement only if it stays near the estimate
  if (std::abs(z - est) < 16.0 * tol_land * (1.0 + std::abs(est))) return z;
  return est;
}

CommonLandingResult common_landing(const Poly& p, Angle theta1, Angle theta2, double tol,
                                   const TraceOptions& opt) {
  if (theta1 == theta2) {
    GeoCut cut;
    cut.comb = CombCut{theta1, theta2};
    cut.degenerate = true;
    cut.traceR = trace_external_ray(p, theta1, opt);
    cut.traceL = cut.traceR;
    if (cut.traceR.landing) cut.vertex = *cut.traceR.landing;
    return {CommonLandingStatus::degenerate, cut};
  }
  RayTrace tr1 = trace_external_ray(p, theta1, opt);
  RayTrace tr2 = trace_external_ray(p, theta2, opt);
  if (tr1.status != RayStatus::landed || tr2.status != RayStatus::landed)
    return {CommonLandingStatus::unresolved_trace, std::nullopt};
  auto l1 = landing_point(p, tr1, opt.tol_land);
  auto l2 = landing_point(p, tr2, opt.tol_land);
  if (!l1 || !l2) return {CommonLandingStatus::unresolved_trace, std::nullopt};
  if (std::abs(*l1 - *l2) > tol) return {CommonLandingStatus::no_common_landing, std::nullopt};

  GeoCut cut;
  cut.comb = CombCut{theta1, theta2};
  cut.traceR = std::move(tr1);
  cut.traceL = std::move(tr2);
  cut.vertex = (*l1 + *l2) / 2.0;

  // classify the vertex: period divides the angle period
  AngleOrbit ao = orbit_period(theta1, p.degree());
  int m_angle = static_cast<int>(ao.period);
  int m = m_angle;
  for (int d = 1; d <= m_angle; ++d) {
    if (m_angle % d != 0) continue;
    cplx w = cut.vertex;
    for (int k = 0; k < d; ++k) w = p.eval(w);
    if (std::abs(w - cut.vertex) < 1e-5 * (1.0 + std::abs(cut.vertex))) {
      m = d;
      break;
    }
  }
  cut.vertex_period = m;
  cplx w = cut.vertex, mult = cplx(1.0);
  for (int k = 0; k < m; ++k) {
    mult *= p.eval_deriv(w);
    w = p.eval(w);
  }
  cut.vertex_multiplier = mult;
  return {CommonLandingStatus::ok, cut};
}

std::vector<Angle> rays_landing_at(const Poly& p, cplx a, int m, double tol,
                                   std::int64_t den_cap, const TraceOptions& opt) {
  std::int64_t M = 1;
  for (int k = 0; k < m; ++k) {
    M *= p.degree();
    if (M - 1 > den_cap) throw std::runtime_error("rays_landing_at: denominator budget exceeded");
  }
  M -= 1;
  std::vector<Angle> found;
  for (std::int64_t q = 0; q < std::max<std::int64_t>(M, 1); ++q) {
    Angle theta(q, std::max<std::int64_t>(M, 1));
    RayTrace tr = trace_external_ray(p, theta, opt);
    if (tr.status != RayStatus::landed) continue;
    auto lp = landing_point(p, tr, opt.tol_land);
    if (lp && std::abs(*lp - a) < tol) found.push_back(theta);
  }
  return found;
}

std::string ray_trace_csv(const RayTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "level,re,im\n";
  for (std::size_t i = 0; i < trace.points.size(); ++i)
    out << trace.levels[i] << "," << trace.points[i].real() << "," << trace.points[i].imag()
        << "\n";
  return out.str();
}

}  // namespace plmod
