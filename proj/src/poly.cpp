#include "plmod/poly.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace plmod {

Poly::Poly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
  if (coeffs_.empty()) throw std::invalid_argument("Poly: no coefficients");
  if (coeffs_.size() == 1) throw std::invalid_argument("Poly: degree must be >= 1");
}

Poly Poly::from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{cplx(1.0)};
  for (cplx r : roots) {
    std::vector<cplx> nc(c.size() + 1, cplx(0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      nc[i + 1] += c[i];
      nc[i] -= r * c[i];
    }
    c.swap(nc);
  }
  return Poly(std::move(c));
}

bool Poly::is_monic() const { return coeffs_.back() == cplx(1.0); }

cplx Poly::eval(cplx z) const {
  cplx acc = coeffs_.back();
  for (int i = degree() - 1; i >= 0; --i) acc = acc * z + coeffs_[i];
  return acc;
}

cplx Poly::eval_deriv(cplx z) const {
  cplx p, dp;
  eval_both(z, p, dp);
  return dp;
}

void Poly::eval_both(cplx z, cplx& p, cplx& dp) const {
  p = coeffs_.back();
  dp = cplx(0.0);
  for (int i = degree() - 1; i >= 0; --i) {
    dp = dp * z + p;
    p = p * z + coeffs_[i];
  }
}

Poly Poly::derivative() const {
  if (degree() == 1) {
    // derivative is constant; keep it representable as a degenerate Poly
    throw std::invalid_argument("Poly::derivative: degree 1 has constant derivative");
  }
  std::vector<cplx> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = double(i) * coeffs_[i];
  return Poly(std::move(d));
}

Poly Poly::operator*(const Poly& rhs) const {
  std::vector<cplx> c(coeffs_.size() + rhs.coeffs_.size() - 1, cplx(0.0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * rhs.coeffs_[j];
  return Poly(std::move(c));
}

Poly Poly::operator-(const Poly& rhs) const {
  std::vector<cplx> c(std::max(coeffs_.size(), rhs.coeffs_.size()), cplx(0.0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) c[i] -= rhs.coeffs_[i];
  return Poly(std::move(c));
}

Poly Poly::compose(const Poly& inner) const {
  // Horner over coefficients: result = (((a_n * q + a_{n-1}) * q + ...)
  std::vector<cplx> acc{coeffs_.back()};
  for (int i = degree() - 1; i >= 0; --i) {
    // acc = acc * inner + a_i
    std::vector<cplx> nc(acc.size() + inner.coeffs_.size() - 1, cplx(0.0));
    for (std::size_t a = 0; a < acc.size(); ++a)
      for (std::size_t b = 0; b < inner.coeffs_.size(); ++b)
        nc[a + b] += acc[a] * inner.coeffs_[b];
    nc[0] += coeffs_[i];
    acc.swap(nc);
  }
  return Poly(std::move(acc));
}

Poly Poly::iterate(int n, int max_degree) const {
  if (n < 1) throw std::invalid_argument("Poly::iterate: n must be >= 1");
  double target = std::pow(double(degree()), double(n));
  if (target > double(max_degree)) throw std::runtime_error("Poly::iterate: degree overflow");
  Poly q = *this;
  for (int k = 1; k < n; ++k) q = q.compose(*this);
  return q;
}

std::pair<Poly, cplx> Poly::monicized() const {
  cplx lead = coeffs_.back();
  if (lead == cplx(1.0)) return {*this, cplx(1.0)};
  // conjugate by s(z) = kz: q = s^{-1} o p o s has leading a_D k^{D-1}
  int D = degree();
  cplx k = std::pow(lead, cplx(-1.0 / double(D - 1)));
  std::vector<cplx> c(coeffs_.size());
  cplx kp = cplx(1.0);  // k^i
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    c[i] = coeffs_[i] * kp / k;
    kp *= k;
  }
  c.back() = cplx(1.0);
  return {Poly(std::move(c)), k};
}

double Poly::escape_radius() const {
  double s = 0.0;
  for (const cplx& a : coeffs_) s += std::abs(a);
  return 2.0 * std::max(1.0, s);
}

double Poly::coeff_scale() const {
  double s = 0.0;
  for (const cplx& a : coeffs_) s = std::max(s, std::abs(a));
  return s;
}

std::string to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::attracting: return "attracting";
    case OrbitKind::repelling: return "repelling";
    case OrbitKind::parabolic: return "parabolic";
    case OrbitKind::indifferent_irrational: return "indifferent_irrational";
  }
  return "?";
}

namespace {

std::vector<cplx> companion_roots(const std::vector<cplx>& monic) {
  const int n = static_cast<int>(monic.size()) - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i) C(i + 1, i) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -monic[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

std::vector<cplx> aberth_roots(const std::vector<cplx>& monic) {
  const int n = static_cast<int>(monic.size()) - 1;
  // Cauchy bound initial circle with slight irrational twist
  double r = 0.0;
  for (int i = 0; i < n; ++i) r = std::max(r, std::abs(monic[i]));
  r = 1.0 + r;
  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * M_PI * (double(i) / n) + 0.4;
    z[i] = r * cplx(std::cos(a), std::sin(a));
  }
  auto eval = [&](cplx x, cplx& p, cplx& dp) {
    p = cplx(1.0);
    dp = cplx(0.0);
    for (int i = n - 1; i >= 0; --i) {
      dp = dp * x + p;
      p = p * x + monic[i];
    }
  };
  for (int it = 0; it < 400; ++it) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx p, dp;
      eval(z[i], p, dp);
      if (p == cplx(0.0)) continue;
      cplx newton = p / dp;
      cplx sum = cplx(0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) sum += cplx(1.0) / (z[i] - z[j]);
      cplx delta = newton / (cplx(1.0) - newton * sum);
      z[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14 * r) break;
  }
  return z;
}

}  // namespace

std::vector<cplx> poly_roots(const Poly& p) {
  const int n = p.degree();
  // normalize to monic coefficient vector
  std::vector<cplx> monic(p.coeffs().begin(), p.coeffs().end());
  cplx lead = monic.back();
  for (auto& c : monic) c /= lead;
  monic.pop_back();  // length n, monic implied

  std::vector<cplx> full(monic);
  full.push_back(cplx(1.0));

  std::vector<cplx> roots = (n <= 64) ? companion_roots(full) : aberth_roots(full);

  // Newton polish on the original polynomial
  for (cplx& z : roots) {
    for (int it = 0; it < 32; ++it) {
      cplx pv, dv;
      p.eval_both(z, pv, dv);
      if (std::abs(dv) == 0.0) break;
      cplx step = pv / dv;
      z -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
  }
  return roots;
}

std::vector<cplx> critical_points(const Poly& p) {
  if (p.degree() < 2) throw std::invalid_argument("critical_points: degree must be >= 2");
  return poly_roots(p.derivative());
}

double green_potential(const Poly& p, cplx z, const GreenOptions& opt) {
  if (!p.is_monic()) throw std::invalid_argument("green_potential: polynomial must be monic");
  if (p.degree() < 2) throw std::invalid_argument("green_potential: degree must be >= 2");
  const int D = p.degree();
  const double R = p.escape_radius();

  // Iterate to escape; G = 0 if no escape within max_iter.
  cplx w = z;
  int k = 0;
  while (std::abs(w) <= R) {
    if (k >= opt.max_iter) return 0.0;
    w = p.eval(w);
    ++k;
  }
  // G(z) = D^{-k} G(w). Telescoping from w:
  //   G(w) = log|w| + sum_{j>=0} D^{-(j+1)} log|w_{j+1} / w_j^D|.
  double g = std::log(std::abs(w));
  double scale = 1.0;
  cplx wj = w;
  const double overflow_cap = std::pow(10.0, 280.0 / D);  // keep |w|^D finite
  for (int j = 0; j < 64; ++j) {
    scale /= D;
    double la = std::abs(wj);
    if (la > overflow_cap) break;  // correction terms below rounding already
    cplx wn = p.eval(wj);
    // log |wn / wj^D| computed via logs to dodge overflow
    double corr = std::log(std::abs(wn)) - double(D) * std::log(la);
    g += scale * corr;
    if (std::abs(corr) * scale < opt.tail_tol) break;
    wj = wn;
  }
  return g / std::pow(double(D), double(k));
}

void boettcher_with_deriv(const Poly& p, cplx z, cplx& phi, cplx& dphi) {
  if (!p.is_monic()) throw std::invalid_argument("boettcher: polynomial must be monic");
  const int D = p.degree();
  // log phi = log z + sum D^{-(n+1)} Log(z_{n+1}/z_n^D), branch principal.
  // d/dz log phi accumulated alongside via z_n' = (p^n)'(z).
  cplx logphi = std::log(z);
  cplx dlog = cplx(1.0) / z;
  cplx zn = z, dzn = cplx(1.0);
  double scale = 1.0;
  const double overflow_cap = std::pow(10.0, 280.0 / D);
  for (int n = 0; n < 64; ++n) {
    scale /= D;
    if (std::abs(zn) > overflow_cap) break;
    cplx pz, dpz;
    p.eval_both(zn, pz, dpz);
    cplx ratio = pz / std::pow(zn, D);
    cplx lg = std::log(ratio);  // principal; |ratio-1| small on the valid domain
    logphi += scale * lg;
    // d/dz Log(z_{n+1}/z_n^D) = z_{n+1}'/z_{n+1} - D z_n'/z_n
    cplx dzn1 = dpz * dzn;
    dlog += scale * (dzn1 / pz - double(D) * dzn / zn);
    if (std::abs(lg) * scale < 1e-16) break;
    zn = pz;
    dzn = dzn1;
  }
  phi = std::exp(logphi);
  dphi = phi * dlog;
}

cplx boettcher_near_infinity(const Poly& p, cplx z, double t_safe) {
  double g = green_potential(p, z);
  if (g <= t_safe)
    throw std::domain_error("boettcher_near_infinity: G(z) <= t_safe, principal branch not guaranteed");
  cplx phi, dphi;
  boettcher_with_deriv(p, z, phi, dphi);
  return phi;
}

OrbitKind classify_multiplier(cplx multiplier, double rel_tol) {
  double m = std::abs(multiplier);
  if (m > 1.0 + rel_tol) return OrbitKind::repelling;
  if (m < 1.0 - rel_tol) return OrbitKind::attracting;
  // |m| ~ 1: parabolic iff multiplier^k ~ 1 for some k <= 64
  cplx mk = multiplier;
  for (int k = 1; k <= 64; ++k) {
    if (std::abs(mk - cplx(1.0)) < 1e-6) return OrbitKind::parabolic;
    mk *= multiplier;
  }
  return OrbitKind::indifferent_irrational;
}

std::vector<PeriodicOrbit> find_periodic_points(const Poly& p, int n,
                                                const PeriodicPointOptions& opt) {
  Poly pn = (n == 1) ? p : p.iterate(n, opt.max_poly_degree);
  // roots of p^n(z) - z
  std::vector<cplx> c = pn.coeffs();
  c[1] -= cplx(1.0);
  Poly eq{std::move(c)};
  std::vector<cplx> roots = poly_roots(eq);

  double sc = 1.0;
  for (const cplx& r : roots) sc = std::max(sc, std::abs(r));
  const double tol = opt.dedup_rel_tol * sc;

  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) < tol)
        throw std::runtime_error("find_periodic_points: unresolved root cluster");

  // nearest-root matching is reliable once roots are pairwise >= tol apart
  auto nearest = [&](cplx z) -> int {
    int best = 0;
    double bd = std::abs(roots[0] - z);
    for (std::size_t i = 1; i < roots.size(); ++i) {
      double d = std::abs(roots[i] - z);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  };

  std::vector<char> used(roots.size(), 0);
  std::vector<PeriodicOrbit> orbits;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    // exact period: smallest divisor d of n with p^d(r) mapping back to r
    int period = n;
    for (int d = 1; d <= n; ++d) {
      if (n % d != 0) continue;
      cplx w = roots[i];
      for (int s = 0; s < d; ++s) w = p.eval(w);
      if (nearest(w) == static_cast<int>(i)) {
        period = d;
        break;
      }
    }
    PeriodicOrbit po;
    po.period = period;
    cplx z = roots[i];
    cplx mult = cplx(1.0);
    for (int s = 0; s < period; ++s) {
      int idx = nearest(z);
      used[idx] = 1;
      po.points.push_back(roots[idx]);
      mult *= p.eval_deriv(roots[idx]);
      z = p.eval(roots[idx]);
    }
    po.multiplier = mult;
    po.kind = classify_multiplier(mult, opt.class_rel_tol);
    orbits.push_back(std::move(po));
  }
  return orbits;
}

}  // namespace plmod
