#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plmod {

using cplx = std::complex<double>;

// Monic-by-default complex polynomial, coefficients lowest degree first.
class Poly {
 public:
  Poly() : coeffs_{cplx(0.0), cplx(1.0)} {}
  explicit Poly(std::vector<cplx> coeffs);

  static Poly from_roots(const std::vector<cplx>& roots);  // monic

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  bool is_monic() const;

  cplx eval(cplx z) const;                    // Horner
  cplx eval_deriv(cplx z) const;              // p'(z)
  void eval_both(cplx z, cplx& p, cplx& dp) const;

  Poly derivative() const;
  Poly operator*(const Poly& rhs) const;
  Poly operator-(const Poly& rhs) const;

  // p(q(z)) by Horner over polynomial coefficients.
  Poly compose(const Poly& inner) const;

  // P^n by repeated composition; throws if the degree would exceed
  // max_degree.
  Poly iterate(int n, int max_degree = 4096) const;

  // Conjugate a non-monic polynomial by z -> kz so it becomes monic;
  // returns the monic polynomial and the scale k.
  std::pair<Poly, cplx> monicized() const;

  // 2*max(1, sum |a_i|): |z| beyond this guarantees escape for monic p.
  double escape_radius() const;

  double coeff_scale() const;  // max |a_i|

 private:
  std::vector<cplx> coeffs_;
};

enum class OrbitKind { attracting, repelling, parabolic, indifferent_irrational };

std::string to_string(OrbitKind k);

struct PeriodicOrbit {
  std::vector<cplx> points;  // one full orbit, cyclically ordered under p
  int period = 1;            // exact period
  cplx multiplier{0.0};      // (p^period)'(points[0])
  OrbitKind kind = OrbitKind::repelling;
};

// All roots of p with multiplicity. Companion-matrix eigenvalues for
// degree <= 64, Aberth iteration above, Newton polish always.
std::vector<cplx> poly_roots(const Poly& p);

// Roots of p' with multiplicity.
std::vector<cplx> critical_points(const Poly& p);

struct GreenOptions {
  int max_iter = 512;
  double tail_tol = 1e-12;
};

// Green potential of the basin of infinity; 0 for non-escaping points.
// Absolute error < 1e-10 for escaping points (telescoping tail bound).
double green_potential(const Poly& p, cplx z, const GreenOptions& opt = {});

// Boettcher coordinate, principal branch with phi(z)/z -> 1 at infinity.
// Requires green_potential(p, z) > t_safe.
cplx boettcher_near_infinity(const Poly& p, cplx z, double t_safe = 1.0);

// phi and phi' together (phi' needed by ray tracing Newton steps).
void boettcher_with_deriv(const Poly& p, cplx z, cplx& phi, cplx& dphi);

struct PeriodicPointOptions {
  int max_poly_degree = 4096;
  double dedup_rel_tol = 1e-9;
  double class_rel_tol = 1e-9;  // tol_class
};

// All periodic orbits of exact period dividing n, grouped from the roots of
// p^n(z) - z. Throws on unresolved root clusters.
std::vector<PeriodicOrbit> find_periodic_points(const Poly& p, int n,
                                                const PeriodicPointOptions& opt = {});

// Classification used by PeriodicOrbit; exposed for reuse by the ray module.
OrbitKind classify_multiplier(cplx multiplier, double rel_tol = 1e-9);

}  // namespace plmod
