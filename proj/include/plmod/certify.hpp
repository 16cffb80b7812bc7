#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "plmod/extremal.hpp"
#include "plmod/ray.hpp"
#include "plmod/region.hpp"

namespace plmod {

enum class AccessKind { A, C, B };

struct Access {
  AccessKind kind = AccessKind::A;
  Angle angle;                           // for kinds A and C
  int m_alpha = 1;                       // period of the access
  std::optional<double> conj_multiplier; // D^{m_alpha} for A/C, unavailable for B
};

Access make_infinity_access(AccessKind kind, Angle angle, int m_alpha, int D);

enum class Verdict { consistent_strong, consistent, suspect };

std::string to_string(Verdict v);

struct Certificate {
  std::string theorem;      // "nopar0", "nopar", "mod_vs_multiplier"
  int D = 0;                // base polynomial degree
  int degree_of_iterate = 0;
  int s = 0;                // minimal period of the cut cycle
  std::vector<std::string> Z_angles;
  int C_count = 0;
  int B_detected = 0;
  double mod_lower = 0.0, mod_upper = 0.0;
  double rhs = 0.0;
  Verdict verdict = Verdict::suspect;
  double h = 0.0;
  std::string config_digest;
  std::string note;
  double tightness = 0.0;   // mod_vs_multiplier only
};

nlohmann::json certificate_to_json(const Certificate& c);

// floor(log D / (mu pi)); 0 means no attached cut cycle can exist.
// Requires mu >= 1e-6.
int period_bound(int D, double mu);

// 1/mod >= pi |Z| / log(D_iterate). lhs interval is [1/mod.upper, 1/mod.lower];
// rhs is rounded one ulp toward the weaker claim.
Certificate certify_nopar0(const ModulusEstimate& mod, int n_cuts, int base_D,
                           int degree_of_iterate, int s,
                           const std::vector<std::string>& Z_angles,
                           const std::string& config_digest);

// 1/mod >= pi (|Z| + |C|) / log(D_iterate), bounded-Fatou access terms
// omitted (a sound weakening); detected B accesses are annotated.
Certificate certify_nopar(const ModulusEstimate& mod, int n_cuts, int extra_ray_count,
                          int b_detected, int base_D, int degree_of_iterate, int s,
                          const std::vector<std::string>& Z_angles,
                          const std::string& config_digest);

// Degree-one restriction check: 2 pi mod(U0 \ U1) <= log|p'(a)| for a
// repelling fixed point a in U1. tightness = 2 pi mod_lower / log|p'(a)|.
Certificate check_mod_vs_multiplier(const Poly& p, cplx a, const ModulusEstimate& mod,
                                    double rel_tol = 0.02);

struct RenormConfig {
  double level_t = 0.1;          // equipotential level for U0
  int resolution = 512;          // first raster resolution
  int max_resolution = 2048;     // refinement cap
  double clearance_cells = 24.0; // wedge truncation clearance, in cells
  double landing_tol = 1e-6;
  int candidate_period_cap = 2;  // cut candidate periods s = 1..cap
  std::int64_t ray_budget = 1 << 14;
  int orbit_check_iters = 128;
  int kstar_iters = 64;
  TraceOptions trace;
  std::string digest_salt;
};

std::string renorm_config_digest(const RenormConfig& cfg, const Poly& p, int n, cplx basepoint);

struct BuildArtifacts {
  Region U0, U1, annulus;
  int pl_deg = 0;
  double margin = 0.0;
  ParalegalReport paralegal;
  ModulusEstimate mod;
  int resolution = 0;
};

struct PipelineOutcome {
  bool ok = false;
  std::string failed_stage;  // empty when ok
  std::string message;
  int D = 0;
  int degree_of_iterate = 0;
  int iterate_n = 1;
  int s = 0;
  std::vector<GeoCut> Z;
  int C_count = 0;
  int B_detected = 0;
  BuildArtifacts build;
  Certificate cert_nopar0, cert_nopar;
  int period_bound_value = 0;
  bool period_bound_ok = false;
  std::string config_digest;
};

nlohmann::json pipeline_to_json(const PipelineOutcome& out);

// Region construction, paralegality, modulus and certificates for a given
// invariant family of cuts of Q (the caller found the cuts). Refines the
// raster until pl_degree and the paralegal verdict stabilize across two
// consecutive resolutions.
PipelineOutcome certify_with_cuts(const Poly& Q, int base_D, int iterate_n,
                                  std::vector<GeoCut> cuts, cplx basepoint,
                                  const RenormConfig& cfg, const std::string& digest);

// Full orchestration: iterate p, enumerate candidate periodic ray pairs,
// find co-landing cuts attached near the basepoint's invariant set, then
// certify_with_cuts.
PipelineOutcome renorm_certify_pipeline(const Poly& p, int n, cplx basepoint,
                                        const RenormConfig& cfg = {});

// Region between the outer region and the closure of the inner one.
Region annulus_between(const Region& U0, const Region& U1);

// Cells of U1 whose forward orbit under Q stays in U1 for iters steps
// (approximation of the filled set of the restriction).
Region invariant_cells(const Poly& Q, const Region& U1, int iters = 64);

}  // namespace plmod
