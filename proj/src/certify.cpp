#include "plmod/certify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plmod/io.hpp"

namespace plmod {

using nlohmann::json;

Access make_infinity_access(AccessKind kind, Angle angle, int m_alpha, int D) {
  Access a;
  a.kind = kind;
  a.angle = angle;
  a.m_alpha = m_alpha;
  if (kind != AccessKind::B) a.conj_multiplier = std::pow(double(D), double(m_alpha));
  return a;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent_strong: return "consistent_strong";
    case Verdict::consistent: return "consistent";
    case Verdict::suspect: return "suspect";
  }
  return "?";
}

json certificate_to_json(const Certificate& c) {
  json j{{"theorem", c.theorem},
         {"D", c.D},
         {"degree_of_iterate", c.degree_of_iterate},
         {"s", c.s},
         {"Z_angles", c.Z_angles},
         {"C_count", c.C_count},
         {"B_detected", c.B_detected},
         {"mod_lower", c.mod_lower},
         {"mod_upper", c.mod_upper},
         {"rhs", c.rhs},
         {"verdict", to_string(c.verdict)},
         {"h", c.h},
         {"config_digest", c.config_digest}};
  if (!c.note.empty()) j["note"] = c.note;
  if (c.theorem == "mod_vs_multiplier") j["tightness"] = c.tightness;
  return j;
}

int period_bound(int D, double mu) {
  if (D < 2) throw std::invalid_argument("period_bound: D must be >= 2");
  if (mu < 1e-6) throw std::invalid_argument("period_bound: mu must be >= 1e-6");
  return static_cast<int>(std::floor(std::log(double(D)) / (mu * M_PI)));
}

namespace {

double rhs_weak(double numerator_count, int degree_of_iterate) {
  // exact-count * pi / log D, rounded one ulp toward the weaker (smaller) rhs
  double v = numerator_count * M_PI / std::log(double(degree_of_iterate));
  return std::nextafter(v, 0.0);
}

Verdict verdict_from_interval(double lhs_lower, double lhs_upper, double rhs) {
  if (lhs_lower >= rhs) return Verdict::consistent_strong;
  if (lhs_upper >= rhs) return Verdict::consistent;
  return Verdict::suspect;
}

}  // namespace

Certificate certify_nopar0(const ModulusEstimate& mod, int n_cuts, int base_D,
                           int degree_of_iterate, int s,
                           const std::vector<std::string>& Z_angles,
                           const std::string& config_digest) {
  if (mod.upper <= 0.0) throw std::invalid_argument("certify_nopar0: missing modulus bracket");
  Certificate c;
  c.theorem = "nopar0";
  c.D = base_D;
  c.degree_of_iterate = degree_of_iterate;
  c.s = s;
  c.Z_angles = Z_angles;
  c.mod_lower = mod.lower;
  c.mod_upper = mod.upper;
  c.h = mod.h;
  c.config_digest = config_digest;
  c.rhs = rhs_weak(double(n_cuts), degree_of_iterate);
  double lhs_lower = 1.0 / mod.upper;
  double lhs_upper = (mod.lower > 0.0) ? 1.0 / mod.lower : 1e300;
  c.verdict = verdict_from_interval(lhs_lower, lhs_upper, c.rhs);
  return c;
}

Certificate certify_nopar(const ModulusEstimate& mod, int n_cuts, int extra_ray_count,
                          int b_detected, int base_D, int degree_of_iterate, int s,
                          const std::vector<std::string>& Z_angles,
                          const std::string& config_digest) {
  Certificate c = certify_nopar0(mod, n_cuts, base_D, degree_of_iterate, s, Z_angles,
                                 config_digest);
  c.theorem = "nopar";
  c.C_count = extra_ray_count;
  c.B_detected = b_detected;
  c.rhs = rhs_weak(double(n_cuts + extra_ray_count), degree_of_iterate);
  double lhs_lower = 1.0 / mod.upper;
  double lhs_upper = (mod.lower > 0.0) ? 1.0 / mod.lower : 1e300;
  c.verdict = verdict_from_interval(lhs_lower, lhs_upper, c.rhs);
  if (b_detected > 0)
    c.note = "bounded-Fatou access terms omitted from rhs (soundness-preserving weakening)";
  return c;
}

Certificate check_mod_vs_multiplier(const Poly& p, cplx a, const ModulusEstimate& mod,
                                    double rel_tol) {
  cplx pa = p.eval(a);
  if (std::abs(pa - a) > 1e-6 * (1.0 + std::abs(a)))
    throw std::invalid_argument("check_mod_vs_multiplier: a is not a fixed point");
  cplx mult = p.eval_deriv(a);
  if (std::abs(mult) <= 1.0)
    throw std::invalid_argument("check_mod_vs_multiplier: fixed point is not repelling");
  double logm = std::log(std::abs(mult));
  Certificate c;
  c.theorem = "mod_vs_multiplier";
  c.D = p.degree();
  c.degree_of_iterate = p.degree();
  c.s = 1;
  c.mod_lower = mod.lower;
  c.mod_upper = mod.upper;
  c.h = mod.h;
  c.rhs = logm;
  double tol = rel_tol * logm;
  double lhs_lower = 2.0 * M_PI * mod.lower;
  double lhs_upper = 2.0 * M_PI * mod.upper;
  if (lhs_upper <= logm + tol)
    c.verdict = Verdict::consistent_strong;
  else if (lhs_lower <= logm + tol)
    c.verdict = Verdict::consistent;
  else
    c.verdict = Verdict::suspect;
  c.tightness = lhs_lower / logm;
  return c;
}

Region annulus_between(const Region& U0, const Region& U1) {
  Region a;
  a.grid = U0.grid;
  a.mask.assign(U0.mask.size(), 0);
  const GridSpec& g = U0.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (!U0.mask[c]) continue;
      // closure of U1 on the grid: U1 cells dilated by one
      bool in_closure = U1.at(i, j) || U1.at(i - 1, j) || U1.at(i + 1, j) || U1.at(i, j - 1) ||
                        U1.at(i, j + 1);
      if (!in_closure) a.mask[c] = 1;
    }
  return a;
}

std::string renorm_config_digest(const RenormConfig& cfg, const Poly& p, int n, cplx basepoint) {
  json j{{"poly", poly_to_json(p)},
         {"n", n},
         {"basepoint", {basepoint.real(), basepoint.imag()}},
         {"level_t", cfg.level_t},
         {"resolution", cfg.resolution},
         {"max_resolution", cfg.max_resolution},
         {"clearance_cells", cfg.clearance_cells},
         {"landing_tol", cfg.landing_tol},
         {"candidate_period_cap", cfg.candidate_period_cap},
         {"t_min", cfg.trace.t_min},
         {"steps_per_halving", cfg.trace.steps_per_halving},
         {"salt", cfg.digest_salt}};
  return fnv1a_hex(j.dump());
}

Region invariant_cells(const Poly& Q, const Region& U1, int iters) {
  const GridSpec& g = U1.grid;
  Region inv;
  inv.grid = g;
  inv.mask.assign(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t c = g.idx(i, j);
      if (!U1.mask[c]) continue;
      cplx z = g.center(i, j);
      bool stays = true;
      for (int k = 0; k < iters && stays; ++k) {
        z = Q.eval(z);
        stays = U1.contains(z);
      }
      if (stays) inv.mask[c] = 1;
    }
  return inv;
}

namespace {

struct BuildResult {
  bool ok = false;
  std::string stage, message;
  BuildArtifacts art;
};

BuildResult build_regions(const Poly& Q, const std::vector<GeoCut>& cuts, cplx basepoint,
                          const RenormConfig& cfg, int resolution) {
  BuildResult res;
  res.art.resolution = resolution;
  EquipotentialResult eq;
  try {
    eq = equipotential_region(Q, cfg.level_t, resolution);
  } catch (const std::exception& e) {
    res.stage = "regions";
    res.message = std::string("equipotential: ") + e.what();
    return res;
  }
  Region base = eq.region;
  if (eq.disconnected) {
    // keep the basepoint component; raster slivers elsewhere are harmless
    try {
      base = keep_component_containing(base, basepoint);
    } catch (const std::exception&) {
      res.stage = "regions";
      res.message = "equipotential region does not contain the basepoint";
      return res;
    }
  }
  std::vector<double> clearances;
  for (const GeoCut& cut : cuts)
    clearances.push_back(
        cut_clearance(cut, cfg.level_t / Q.degree(), cfg.clearance_cells * base.grid.h));
  try {
    res.art.U0 = truncate_by_wedges(base, cuts, clearances, basepoint);
  } catch (const std::exception& e) {
    res.stage = "regions";
    res.message = std::string("truncate: ") + e.what();
    return res;
  }
  try {
    res.art.U1 = pullback_component(Q, res.art.U0, basepoint);
  } catch (const std::exception& e) {
    res.stage = "regions";
    res.message = std::string("pullback: ") + e.what();
    return res;
  }
  res.art.margin = containment_margin(res.art.U1, res.art.U0);
  if (res.art.margin <= 2.0 * res.art.U0.grid.h) {
    res.stage = "regions";
    res.message = "containment margin below 2h";
    return res;
  }
  try {
    res.art.pl_deg = pl_degree(Q, res.art.U1, res.art.U0);
  } catch (const std::exception& e) {
    res.stage = "regions";
    res.message = std::string("pl_degree: ") + e.what();
    return res;
  }
  res.art.paralegal = paralegal_check(Q, cuts, res.art.U1);
  res.ok = true;
  return res;
}

}  // namespace

PipelineOutcome certify_with_cuts(const Poly& Q, int base_D, int iterate_n,
                                  std::vector<GeoCut> cuts, cplx basepoint,
                                  const RenormConfig& cfg, const std::string& digest) {
  PipelineOutcome out;
  out.D = base_D;
  out.degree_of_iterate = Q.degree();
  out.iterate_n = iterate_n;
  out.Z = std::move(cuts);
  out.config_digest = digest;

  if (out.Z.empty()) {
    out.failed_stage = "no_attached_cuts";
    out.message = "no cuts supplied";
    return out;
  }

  // minimal period of the cut cycle = period of a boundary ray angle
  out.s = static_cast<int>(orbit_period(out.Z.front().comb.thetaR, Q.degree()).period);
  for (const GeoCut& c : out.Z)
    out.s = std::min(out.s, static_cast<int>(orbit_period(c.comb.thetaR, Q.degree()).period));

  // refine until pl_degree and the paralegal verdict agree across two
  // consecutive resolutions; a failed build at a coarse level just forces
  // the next one
  BuildResult prev, accepted;
  bool have_prev = false, stabilized = false;
  std::string last_stage = "refinement";
  std::string last_message = "pl_degree / paralegal verdict did not stabilize within the resolution budget";
  const bool single_level = cfg.resolution >= cfg.max_resolution;
  for (int r = cfg.resolution; r <= cfg.max_resolution; r *= 2) {
    BuildResult cur = build_regions(Q, out.Z, basepoint, cfg, r);
    if (!cur.ok) {
      have_prev = false;
      last_stage = cur.stage;
      last_message = cur.message + " (at resolution " + std::to_string(r) + ")";
      continue;
    }
    if (single_level || (have_prev && cur.art.pl_deg == prev.art.pl_deg &&
                         cur.art.paralegal.verdict == prev.art.paralegal.verdict)) {
      accepted = cur;
      stabilized = true;
      break;
    }
    prev = cur;
    have_prev = true;
  }
  if (!stabilized) {
    out.failed_stage = last_stage;
    out.message = last_message;
    return out;
  }
  out.build = accepted.art;

  if (out.build.paralegal.verdict != ParalegalVerdict::paralegal) {
    out.failed_stage = "paralegal";
    out.message = to_string(out.build.paralegal.verdict) + ": " + out.build.paralegal.detail;
    return out;
  }

  try {
    out.build.annulus = annulus_between(out.build.U0, out.build.U1);
    out.build.mod = annulus_modulus(out.build.annulus);
  } catch (const std::exception& e) {
    out.failed_stage = "modulus";
    out.message = e.what();
    return out;
  }

  // extra rays landing at the cut vertices inside the wedges
  out.C_count = 0;
  out.B_detected = 0;
  for (const GeoCut& cut : out.Z) {
    int m = static_cast<int>(orbit_period(cut.comb.thetaR, Q.degree()).period);
    try {
      auto angles = rays_landing_at(Q, cut.vertex, m, 4.0 * cfg.landing_tol, cfg.ray_budget,
                                    cfg.trace);
      for (const Angle& a : angles)
        if (cut.comb.arc_contains(a)) ++out.C_count;
    } catch (const std::exception&) {
      // budget exceeded: C undercount only weakens the refined rhs
    }
    // bounded-Fatou detection: deep non-escaping cells inside the wedge
    const GridSpec& g = out.build.U0.grid;
    auto wmaskR = [&](cplx z) { return in_wedge(cut, z); };
    int found = 0;
    for (int probe = 0; probe < 256 && !found; ++probe) {
      double r = (0.1 + 0.8 * (probe % 16) / 16.0) * cfg.clearance_cells * g.h;
      double a = 2.0 * M_PI * (probe / 16) / 16.0;
      cplx z = cut.vertex + std::polar(r, a);
      if (!wmaskR(z)) continue;
      double gval = green_potential(Q, z);
      if (gval == 0.0) {
        // interior (Fatou) if a small disk is also non-escaping
        bool interior = true;
        for (int k = 0; k < 4 && interior; ++k)
          interior = green_potential(Q, z + std::polar(2.0 * g.h, M_PI_2 * k)) == 0.0;
        if (interior) found = 1;
      }
    }
    out.B_detected += found;
  }

  std::vector<std::string> zang;
  for (const GeoCut& c : out.Z) {
    zang.push_back(c.comb.thetaR.str());
    zang.push_back(c.comb.thetaL.str());
  }
  out.cert_nopar0 = certify_nopar0(out.build.mod, static_cast<int>(out.Z.size()), base_D,
                                   Q.degree(), out.s, zang, digest);
  out.cert_nopar = certify_nopar(out.build.mod, static_cast<int>(out.Z.size()), out.C_count,
                                 out.B_detected, base_D, Q.degree(), out.s, zang, digest);
  try {
    out.period_bound_value = period_bound(Q.degree(), std::max(out.build.mod.lower, 1e-6));
    out.period_bound_ok = out.s <= out.period_bound_value;
  } catch (const std::exception&) {
    out.period_bound_ok = false;
  }
  out.ok = true;
  return out;
}

PipelineOutcome renorm_certify_pipeline(const Poly& p, int n, cplx basepoint,
                                        const RenormConfig& cfg) {
  PipelineOutcome out;
  std::string digest = renorm_config_digest(cfg, p, n, basepoint);
  out.config_digest = digest;
  out.D = p.degree();
  out.iterate_n = n;

  if (!p.is_monic()) {
    out.failed_stage = "window_check";
    out.message = "polynomial must be monic";
    return out;
  }
  // connectedness pre-check: all critical orbits bounded
  for (const cplx& cp : critical_points(p)) {
    if (green_potential(p, cp) > 0.0) {
      out.failed_stage = "window_check";
      out.message = "a critical orbit escapes (K_P disconnected)";
      return out;
    }
  }

  Poly Q;
  try {
    Q = p.iterate(n);
  } catch (const std::exception& e) {
    out.failed_stage = "iterate";
    out.message = e.what();
    return out;
  }
  out.degree_of_iterate = Q.degree();

  // candidate cuts: co-landing pairs of period-s angles of Q, s = 1, 2, ...
  std::vector<GeoCut> found;
  for (int s = 1; s <= cfg.candidate_period_cap && found.empty(); ++s) {
    std::vector<std::pair<Angle, Angle>> pairs;
    try {
      pairs = enumerate_cut_candidates(Q.degree(), s, 4096, cfg.ray_budget);
    } catch (const std::exception& e) {
      out.failed_stage = "candidates";
      out.message = e.what();
      return out;
    }
    for (const auto& [a, b] : pairs) {
      auto res = common_landing(Q, a, b, cfg.landing_tol, cfg.trace);
      if (res.status != CommonLandingStatus::ok) continue;
      if (std::abs(res.cut->vertex_multiplier) <= 1.0 - 1e-9) continue;
      found.push_back(std::move(*res.cut));
    }
  }
  if (found.empty()) {
    out.failed_stage = "no_attached_cuts";
    out.message = "no co-landing candidate ray pairs";
    return out;
  }

  // orient each wedge away from the basepoint and require the basepoint
  // orbit to avoid it
  std::vector<GeoCut> oriented;
  for (GeoCut& cut : found) {
    if (in_wedge(cut, basepoint)) {
      std::swap(cut.comb.thetaR, cut.comb.thetaL);
      std::swap(cut.traceR, cut.traceL);
    }
    if (in_wedge(cut, basepoint)) continue;  // degenerate side test
    bool orbit_clear = true;
    cplx z = basepoint;
    for (int k = 0; k < cfg.orbit_check_iters && orbit_clear; ++k) {
      z = Q.eval(z);
      if (std::abs(z) > Q.escape_radius()) break;
      if (in_wedge(cut, z)) orbit_clear = false;
    }
    if (orbit_clear) oriented.push_back(std::move(cut));
  }
  if (oriented.empty()) {
    out.failed_stage = "no_attached_cuts";
    out.message = "no cut avoids the basepoint orbit";
    return out;
  }

  // round 1: build once with all surviving cuts, keep those attached to the
  // basepoint's invariant set (vertex inside U1, wedge free of invariant
  // cells away from the vertex disk)
  std::vector<GeoCut> attached;
  {
    EquipotentialResult eq = equipotential_region(Q, cfg.level_t, cfg.resolution);
    Region base = eq.region;
    if (eq.disconnected) base = keep_component_containing(base, basepoint);
    std::vector<double> clearances;
    for (const GeoCut& cut : oriented)
      clearances.push_back(
          cut_clearance(cut, cfg.level_t / Q.degree(), cfg.clearance_cells * base.grid.h));
    Region U0, U1;
    try {
      U0 = truncate_by_wedges(base, oriented, clearances, basepoint);
      U1 = pullback_component(Q, U0, basepoint);
    } catch (const std::exception& e) {
      out.failed_stage = "regions";
      out.message = e.what();
      return out;
    }
    Region inv = invariant_cells(Q, U1, cfg.kstar_iters);
    const GridSpec& g = U1.grid;
    for (GeoCut& cut : oriented) {
      if (!U1.contains(cut.vertex)) continue;
      auto wmask = wedge_mask_for(cut, g);
      bool wedge_clear = true;
      for (int j = 0; j < g.ny && wedge_clear; ++j)
        for (int i = 0; i < g.nx && wedge_clear; ++i) {
          std::size_t c = g.idx(i, j);
          if (!inv.mask[c] || !wmask[c]) continue;
          if (std::abs(g.center(i, j) - cut.vertex) > 3.0 * g.h) wedge_clear = false;
        }
      if (wedge_clear) attached.push_back(cut);
    }
  }
  if (attached.empty()) {
    out.failed_stage = "no_attached_cuts";
    out.message = "no cut is attached to the basepoint's invariant set";
    return out;
  }

  PipelineOutcome final_out =
      certify_with_cuts(Q, p.degree(), n, std::move(attached), basepoint, cfg, digest);
  final_out.D = p.degree();
  final_out.iterate_n = n;
  return final_out;
}

json pipeline_to_json(const PipelineOutcome& out) {
  json j{{"ok", out.ok},
         {"D", out.D},
         {"degree_of_iterate", out.degree_of_iterate},
         {"iterate_n", out.iterate_n},
         {"config_digest", out.config_digest}};
  if (!out.ok) {
    j["failed_stage"] = out.failed_stage;
    j["message"] = out.message;
    return j;
  }
  j["s"] = out.s;
  json zang = json::array();
  for (const GeoCut& c : out.Z)
    zang.push_back(json{{"thetaR", c.comb.thetaR.str()},
                        {"thetaL", c.comb.thetaL.str()},
                        {"vertex", {c.vertex.real(), c.vertex.imag()}},
                        {"vertex_multiplier_abs", std::abs(c.vertex_multiplier)}});
  j["Z"] = zang;
  j["C_count"] = out.C_count;
  j["B_detected"] = out.B_detected;
  j["pl_degree"] = out.build.pl_deg;
  j["margin"] = out.build.margin;
  j["resolution"] = out.build.resolution;
  j["mod_lower"] = out.build.mod.lower;
  j["mod_upper"] = out.build.mod.upper;
  j["paralegal"] = to_string(out.build.paralegal.verdict);
  j["certificates"] = json::array({certificate_to_json(out.cert_nopar0),
                                   certificate_to_json(out.cert_nopar)});
  j["period_bound"] = out.period_bound_value;
  j["period_bound_ok"] = out.period_bound_ok;
  return j;
}

}  // namespace plmod
