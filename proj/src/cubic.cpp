#include "plmod/cubic.hpp"

#include <algorithm>
#include <cmath>

#include "plmod/parallel.hpp"

namespace plmod {

Poly cubic_poly(const CubicParams& params) {
  return Poly({cplx(0.0), params.lambda, params.b, cplx(1.0)});
}

cplx cubic_eval(const CubicParams& params, cplx z) {
  // z * (lambda + z * (b + z)): every step commutes exactly with the
  // sign conjugacy (b, z) -> (-b, -z) in ieee arithmetic
  return z * (params.lambda + z * (params.b + z));
}

std::pair<cplx, cplx> cubic_criticals(const CubicParams& params) {
  // roots of 3z^2 + 2bz + lambda
  cplx disc = std::sqrt(params.b * params.b - 3.0 * params.lambda);
  cplx w1 = (-params.b + disc) / 3.0;
  cplx w2 = (-params.b - disc) / 3.0;
  return {w1, w2};
}

cplx cocritical_point(const CubicParams& params, cplx omega2) {
  Poly f = cubic_poly(params);
  double scale = 1.0 + std::abs(params.b) + std::abs(params.lambda);
  if (std::abs(f.eval_deriv(omega2)) > 1e-9 * scale)
    throw std::invalid_argument("cocritical_point: omega2 is not a critical point");
  // degenerate double critical point: f - f(omega2) = (z - omega2)^3
  cplx disc = params.b * params.b - 3.0 * params.lambda;
  if (std::abs(disc) < 1e-12 * scale * scale)
    throw std::invalid_argument("cocritical_point: critical point is degenerate (lambda = b^2/3)");
  // f(z) - f(omega2) = (z - omega2)^2 (z - omega2star), Vieta on z^2 terms
  return -params.b - 2.0 * omega2;
}

double cubic_escape_radius(const CubicParams& params) {
  return 2.0 * std::max(1.0, 1.0 + std::abs(params.b) + std::abs(params.lambda));
}

bool connectedness_test(const CubicParams& params, int max_iter, std::optional<double> r_esc) {
  const double R = r_esc.value_or(cubic_escape_radius(params));
  auto [w1, w2] = cubic_criticals(params);
  for (cplx z : {w1, w2}) {
    for (int k = 0; k < max_iter; ++k) {
      if (std::abs(z.real()) > R || std::abs(z.imag()) > R) return false;
      z = cubic_eval(params, z);
    }
    if (std::abs(z.real()) > R || std::abs(z.imag()) > R) return false;
  }
  return true;
}

namespace {

// radius of the certified contraction disk around 0: |f(z)| <= q |z| with
// q = (1+|lambda|)/2 < 1 whenever |z| <= r_lin
double linearization_radius(const CubicParams& params) {
  double lam = std::abs(params.lambda);
  double bb = std::abs(params.b);
  double target = (1.0 - lam) / 2.0;
  // solve r^2 + |b| r = target
  return (-bb + std::sqrt(bb * bb + 4.0 * target)) / 2.0;
}

}  // namespace

bool principal_hyperbolic_test(const CubicParams& params, int max_iter) {
  if (std::abs(params.lambda) >= 1.0)
    throw std::invalid_argument("principal_hyperbolic_test: requires |lambda| < 1");
  const double r_lin = linearization_radius(params);
  const double R = cubic_escape_radius(params);
  auto [w1, w2] = cubic_criticals(params);
  for (cplx z : {w1, w2}) {
    bool captured = false;
    for (int k = 0; k < max_iter; ++k) {
      if (std::abs(z) <= r_lin) {
        captured = true;
        break;
      }
      if (std::abs(z.real()) > R || std::abs(z.imag()) > R) return false;
      z = cubic_eval(params, z);
    }
    if (!captured) return false;
  }
  return true;
}

ParameterRayTrace parameter_ray(cplx lambda, Angle theta, double t_min, int steps_per_halving) {
  if (std::abs(lambda) > 1.0 + 1e-12)
    throw std::invalid_argument("parameter_ray: requires |lambda| <= 1");
  ParameterRayTrace tr;
  tr.theta = theta;

  // Phi_lambda(b) = phi_{f_b}(cocritical(b)). The ray equation is solved in
  // the iterated form f_b^N(cocrit) = psi(exp(3^N t + 2 pi i 3^N theta)) so
  // the boettcher product is only ever evaluated at high potential. omega2
  // is the critical point with the larger green potential (the escaping one).
  auto cocritical = [&](cplx b) -> std::optional<cplx> {
    CubicParams p{lambda, b};
    Poly f = cubic_poly(p);
    auto [w1, w2] = cubic_criticals(p);
    double g1 = green_potential(f, w1), g2 = green_potential(f, w2);
    if (g1 <= 0.0 && g2 <= 0.0) return std::nullopt;  // inside the locus
    cplx omega2 = (g1 >= g2) ? w1 : w2;
    return -b - 2.0 * omega2;
  };

  auto F = [&](cplx b, int N, double T, double Theta) -> std::optional<cplx> {
    auto c = cocritical(b);
    if (!c) return std::nullopt;
    CubicParams p{lambda, b};
    Poly f = cubic_poly(p);
    cplx w = *c;
    for (int k = 0; k < N; ++k) {
      w = cubic_eval(p, w);
      if (std::abs(w) > 1e200) return std::nullopt;
    }
    cplx zeta = boettcher_preimage(f, T, Theta);
    return w - zeta;
  };

  auto newton_solve = [&](double level, cplx guess) -> std::optional<cplx> {
    CubicParams pg{lambda, guess};
    double t_ref = 2.0 * std::log(cubic_escape_radius(pg)) + 2.0;
    int N = 0;
    double T = level;
    Angle Th = theta;
    while (T < t_ref) {
      T *= 3.0;
      Th = angle_mulD(Th, 3);
      ++N;
      if (N > 256) return std::nullopt;
    }
    double Theta = Th.value();
    cplx bb = guess;
    for (int it = 0; it < 40; ++it) {
      auto g = F(bb, N, T, Theta);
      if (!g) return std::nullopt;
      double step_scale = std::abs(bb) + 1.0;
      cplx delta = cplx(1e-7 * step_scale);
      auto gp = F(bb + delta, N, T, Theta);
      auto gm = F(bb - delta, N, T, Theta);
      if (!gp || !gm) return std::nullopt;
      cplx dg = (*gp - *gm) / (2.0 * delta);
      if (dg == cplx(0.0)) return std::nullopt;
      cplx step = *g / dg;
      if (std::abs(step) > 0.3 * step_scale) step *= 0.3 * step_scale / std::abs(step);
      bb -= step;
      if (std::abs(step) < 1e-12 * step_scale) {
        auto resid = F(bb, N, T, Theta);
        if (resid && std::abs(*resid) < 1e-6 * std::exp(T)) return bb;
        return std::nullopt;
      }
    }
    return std::nullopt;
  };

  const double t0_floor = 2.0 * std::log(cubic_escape_radius(CubicParams{lambda, cplx(2.0)})) + 1.0;
  double t = t0_floor;
  // asymptotics: Phi(b) ~ (e/3) b for large |b|, so seed with the inverse
  cplx b = 3.0 * std::exp(cplx(t, 2.0 * M_PI * theta.value())) / M_E;
  const double shrink = std::pow(2.0, -1.0 / double(steps_per_halving));

  auto first = newton_solve(t, b);
  if (!first) {
    tr.newton_failed = true;
    return tr;
  }
  b = *first;
  tr.points.push_back({t, b});

  while (t > t_min) {
    double t_next = std::max(t * shrink, t_min);
    double sub = t_next;
    cplx cur = b;
    bool ok = false;
    int budget = 40;
    double reached = t;
    while (budget-- > 0) {
      auto res = newton_solve(sub, cur);
      bool accepted = false;
      if (res) {
        double jump = std::abs(*res - cur);
        accepted = jump < 0.3 * (std::abs(cur) + 0.5);  // branch-jump guard
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
        sub = std::sqrt(sub * reached);
        if (sub >= reached * 0.999999) break;
      }
    }
    if (!ok) {
      tr.newton_failed = true;
      break;
    }
    b = cur;
    t = t_next;
    tr.points.push_back({t, b});
  }
  tr.reached_t_min = (t <= t_min * 1.0000001);
  tr.landing_estimate = b;
  tr.landing_extrapolated = b;
  std::size_t n = tr.points.size();
  if (n >= 4) {
    // Aitken on the tail (skip the level-truncated final step if degenerate)
    for (std::size_t last : {n - 2, n - 1}) {
      cplx d1 = tr.points[last].b - tr.points[last - 1].b;
      cplx d0 = tr.points[last - 1].b - tr.points[last - 2].b;
      cplx dd = d1 - d0;
      if (std::abs(dd) > 1e-14 && std::abs(d1) < std::abs(d0)) {
        cplx est = tr.points[last].b - d1 * d1 / dd;
        if (std::abs(est - b) < 16.0 * std::abs(d1) / std::max(1e-9, 1.0 - std::abs(d1) / std::abs(d0)))
          tr.landing_extrapolated = est;
      }
    }
  }
  return tr;
}

WakeVerdict wake_probe(cplx lambda, Angle theta1, Angle theta2, cplx b, double t_min,
                       double landing_tol) {
  ParameterRayTrace r1 = parameter_ray(lambda, theta1, t_min);
  ParameterRayTrace r2 = parameter_ray(lambda, theta2, t_min);
  if (!r1.reached_t_min || !r2.reached_t_min) return WakeVerdict::unresolved;
  if (std::abs(r1.landing_extrapolated - r2.landing_extrapolated) > landing_tol)
    return WakeVerdict::unresolved;
  cplx root = (r1.landing_extrapolated + r2.landing_extrapolated) / 2.0;
  const double boundary_tol = 0.25 * landing_tol;

  // polygon: ray1 from far to the root, then root, then ray2 back out,
  // closed with an arc at large radius
  std::vector<cplx> poly;
  for (const auto& pt : r1.points) poly.push_back(pt.b);
  poly.push_back(root);
  for (auto it = r2.points.rbegin(); it != r2.points.rend(); ++it) poly.push_back(it->b);
  double rad = 1.2 * std::max(std::abs(r1.points.front().b), std::abs(r2.points.front().b));
  double a2 = std::arg(r2.points.front().b), a1 = std::arg(r1.points.front().b);
  // two candidate closures; the wake is the one not containing b = 0
  for (int orient = 0; orient < 2; ++orient) {
    std::vector<cplx> closed = poly;
    double span = a1 - a2;
    if (orient == 0) {
      while (span <= 0) span += 2.0 * M_PI;
    } else {
      while (span >= 0) span -= 2.0 * M_PI;
    }
    int steps = std::max(8, static_cast<int>(std::abs(span) / (2.0 * M_PI) * 360));
    for (int k = 0; k <= steps; ++k)
      closed.push_back(std::polar(rad, a2 + span * double(k) / steps));
    auto inside = [&](cplx z) {
      bool in = false;
      std::size_t n = closed.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double yi = closed[i].imag(), yj = closed[j].imag();
        if ((yi > z.imag()) != (yj > z.imag())) {
          double xc = closed[i].real() +
                      (z.imag() - yi) / (yj - yi) * (closed[j].real() - closed[i].real());
          if (z.real() < xc) in = !in;
        }
      }
      return in;
    };
    if (inside(cplx(0.0))) continue;  // wrong side: contains the principal region
    // distance to the traced rays: boundary verdict
    double dmin = std::abs(b - root);
    for (const auto& pt : r1.points) dmin = std::min(dmin, std::abs(b - pt.b));
    for (const auto& pt : r2.points) dmin = std::min(dmin, std::abs(b - pt.b));
    if (dmin < boundary_tol) return WakeVerdict::boundary;
    return inside(b) ? WakeVerdict::inside : WakeVerdict::outside;
  }
  return WakeVerdict::unresolved;
}

namespace {

// A candidate pair is a real wake when, ordered so that theta1 + 1/3 and
// theta2 + 2/3 are exactly periodic under x3, those dynamic rays co-land for
// a parameter probed inside the candidate limb. Landing clusters near
// parabolic roots are loose (1/log^2 approach), so this check does the
// deciding.
bool verify_wake_order(cplx lambda, Angle theta1, Angle theta2, cplx root) {
  auto [d1, d2] = wake_to_dynamic_angles(theta1, theta2);
  if (orbit_period(d1, 3).preperiod != 0 || orbit_period(d2, 3).preperiod != 0) return false;
  if (orbit_period(d1, 3).period != orbit_period(d2, 3).period) return false;
  if (std::abs(root) < 1e-9) return false;
  for (double eps : {0.05, 0.1, 0.2}) {
    cplx b_probe = root * (1.0 + eps);
    CubicParams p{lambda, b_probe};
    if (!connectedness_test(p)) continue;
    Poly f = cubic_poly(p);
    auto res = common_landing(f, d1, d2, 1e-5);
    if (res.status == CommonLandingStatus::ok) return true;
  }
  return false;
}

}  // namespace

std::vector<WakePair> scan_wakes(cplx lambda, std::int64_t q_cap, double t_min,
                                 double landing_tol) {
  // trace rays for all reduced p/q with q <= q_cap, cluster landing estimates
  std::vector<std::pair<Angle, cplx>> landings;
  for (std::int64_t q = 1; q <= q_cap; ++q)
    for (std::int64_t p = 0; p < q; ++p) {
      Angle a(p, q);
      if (a.den != q) continue;
      ParameterRayTrace tr = parameter_ray(lambda, a, t_min);
      if (tr.reached_t_min) landings.push_back({a, tr.landing_extrapolated});
    }
  std::vector<WakePair> wakes;
  std::vector<char> used(landings.size(), 0);
  for (std::size_t i = 0; i < landings.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < landings.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(landings[i].second - landings[j].second) > landing_tol) continue;
      cplx root = (landings[i].second + landings[j].second) / 2.0;
      WakePair w;
      w.root = root;
      if (verify_wake_order(lambda, landings[i].first, landings[j].first, root)) {
        w.theta1 = landings[i].first;
        w.theta2 = landings[j].first;
      } else if (verify_wake_order(lambda, landings[j].first, landings[i].first, root)) {
        w.theta1 = landings[j].first;
        w.theta2 = landings[i].first;
      } else {
        continue;
      }
      used[i] = used[j] = 1;
      wakes.push_back(w);
      break;
    }
  }
  return wakes;
}

RenormAttempt immediate_renorm_attempt(const CubicParams& params, const RenormConfig& cfg,
                                       std::int64_t q_cap) {
  RenormAttempt att;
  if (!connectedness_test(params)) {
    att.failed_stage = "precondition";
    att.message = "K_f is disconnected (a critical orbit escapes)";
    return att;
  }
  auto wakes = scan_wakes(params.lambda, q_cap);
  std::optional<WakePair> containing;
  for (const WakePair& w : wakes) {
    WakeVerdict v = wake_probe(params.lambda, w.theta1, w.theta2, params.b);
    if (v == WakeVerdict::inside) {
      containing = w;
      break;
    }
  }
  if (!containing) {
    att.failed_stage = "no_attached_cuts";
    att.message = "b lies in no scanned wake (not immediately renormalizable at this scan depth)";
    return att;
  }
  att.wake = containing;

  Poly f = cubic_poly(params);
  auto [d1, d2] = wake_to_dynamic_angles(containing->theta1, containing->theta2);
  // the cut cycle: orbit of the pair under x3
  std::vector<GeoCut> cuts;
  Angle a = d1, b2 = d2;
  int s = static_cast<int>(orbit_period(d1, 3).period);
  for (int k = 0; k < s; ++k) {
    auto res = common_landing(f, a, b2, cfg.landing_tol, cfg.trace);
    if (res.status != CommonLandingStatus::ok) {
      att.failed_stage = "candidates";
      att.message = "dynamic rays " + a.str() + ", " + b2.str() + " do not co-land";
      return att;
    }
    GeoCut cut = *res.cut;
    if (in_wedge(cut, cplx(0.0))) {
      std::swap(cut.comb.thetaR, cut.comb.thetaL);
      std::swap(cut.traceR, cut.traceL);
    }
    cuts.push_back(std::move(cut));
    a = angle_mulD(a, 3);
    b2 = angle_mulD(b2, 3);
  }

  std::string digest = renorm_config_digest(cfg, f, 1, cplx(0.0)) ;
  att.pipeline = certify_with_cuts(f, 3, 1, std::move(cuts), cplx(0.0), cfg, digest);
  if (!att.pipeline.ok) {
    att.failed_stage = att.pipeline.failed_stage;
    att.message = att.pipeline.message;
    return att;
  }
  // the QL filled set must contain 0 and exclude the free critical point
  auto [w1, w2] = cubic_criticals(params);
  bool in1 = att.pipeline.build.U1.contains(w1);
  bool in2 = att.pipeline.build.U1.contains(w2);
  if (in1 == in2 || att.pipeline.build.pl_deg != 2 ||
      !att.pipeline.build.U1.contains(cplx(0.0))) {
    att.failed_stage = "regions";
    att.message = "restriction does not separate the two critical points around 0";
    return att;
  }
  att.ok = true;
  return att;
}

std::vector<std::uint8_t> connectedness_raster(cplx lambda, double halfwidth, int resolution,
                                               int max_iter) {
  GridSpec g = GridSpec::window(-halfwidth, halfwidth, -halfwidth, halfwidth, resolution,
                                resolution);
  std::vector<std::uint8_t> img(g.size(), 0);
  parallel_for(g.ny, [&](std::size_t jj) {
    int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      CubicParams p{lambda, g.center(i, j)};
      img[g.idx(i, j)] = connectedness_test(p, max_iter) ? 255 : 0;
    }
  });
  return img;
}

std::vector<std::uint8_t> principal_raster(cplx lambda, double halfwidth, int resolution,
                                           int max_iter) {
  GridSpec g = GridSpec::window(-halfwidth, halfwidth, -halfwidth, halfwidth, resolution,
                                resolution);
  std::vector<std::uint8_t> img(g.size(), 0);
  parallel_for(g.ny, [&](std::size_t jj) {
    int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      CubicParams p{lambda, g.center(i, j)};
      bool ph = principal_hyperbolic_test(p, max_iter);
      if (ph)
        img[g.idx(i, j)] = 255;
      else
        img[g.idx(i, j)] = connectedness_test(p, max_iter) ? 128 : 0;
    }
  });
  return img;
}

}  // namespace plmod
