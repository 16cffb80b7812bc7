#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "plmod/certify.hpp"
#include "plmod/cubic.hpp"
#include "plmod/extremal.hpp"
#include "plmod/io.hpp"
#include "plmod/parallel.hpp"
#include "plmod/poly.hpp"
#include "plmod/ray.hpp"
#include "plmod/region.hpp"

namespace py = pybind11;
using namespace plmod;

namespace {

py::dict modulus_dict(const ModulusEstimate& est) {
  py::dict d;
  d["lower"] = est.lower;
  d["upper"] = est.upper;
  d["h"] = est.h;
  d["method"] = est.method;
  return d;
}

py::object json_to_py(const nlohmann::json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_plmod, m) {
  m.doc() = "polynomial-like modulus toolkit";

  m.def("set_workers", &set_workers, py::arg("n"));

  py::class_<Poly>(m, "Poly")
      .def(py::init<std::vector<cplx>>(), py::arg("coeffs"))
      .def_property_readonly("degree", &Poly::degree)
      .def_property_readonly("coeffs", &Poly::coeffs)
      .def_property_readonly("monic", &Poly::is_monic)
      .def("__call__", &Poly::eval, py::arg("z"))
      .def("deriv", &Poly::eval_deriv, py::arg("z"))
      .def("iterate", [](const Poly& p, int n) { return p.iterate(n); }, py::arg("n"))
      .def("escape_radius", &Poly::escape_radius)
      .def("__repr__", [](const Poly& p) {
        return "<Poly degree " + std::to_string(p.degree()) + ">";
      });

  m.def("green_potential", [](const Poly& p, cplx z) { return green_potential(p, z); },
        py::arg("poly"), py::arg("z"));
  m.def("boettcher", [](const Poly& p, cplx z) { return boettcher_near_infinity(p, z); },
        py::arg("poly"), py::arg("z"));
  m.def("critical_points", &critical_points, py::arg("poly"));
  m.def("poly_roots", &poly_roots, py::arg("poly"));
  m.def(
      "periodic_points",
      [](const Poly& p, int n) {
        py::list out;
        for (const auto& o : find_periodic_points(p, n)) {
          py::dict d;
          d["period"] = o.period;
          d["points"] = o.points;
          d["multiplier"] = o.multiplier;
          d["kind"] = to_string(o.kind);
          out.append(d);
        }
        return out;
      },
      py::arg("poly"), py::arg("n"));

  py::class_<Angle>(m, "Angle")
      .def(py::init<std::int64_t, std::int64_t>(), py::arg("num"), py::arg("den"))
      .def_static("parse", &Angle::parse)
      .def_readonly("num", &Angle::num)
      .def_readonly("den", &Angle::den)
      .def("__str__", &Angle::str)
      .def("__repr__", [](const Angle& a) { return "Angle(" + a.str() + ")"; })
      .def("__eq__", [](const Angle& a, const Angle& b) { return a == b; })
      .def("value", &Angle::value);

  m.def("angle_mulD", &angle_mulD, py::arg("theta"), py::arg("D"));
  m.def(
      "orbit_period",
      [](const Angle& a, int D) {
        AngleOrbit ao = orbit_period(a, D);
        return py::make_tuple(ao.preperiod, ao.period);
      },
      py::arg("theta"), py::arg("D"), "returns (preperiod, period) under xD");
  m.def("wake_to_dynamic_angles", &wake_to_dynamic_angles, py::arg("theta1"), py::arg("theta2"));
  m.def(
      "enumerate_cut_candidates",
      [](int D, int s) {
        py::list out;
        for (auto& [a, b] : enumerate_cut_candidates(D, s)) out.append(py::make_tuple(a, b));
        return out;
      },
      py::arg("D"), py::arg("s"));

  m.def(
      "trace_ray",
      [](const Poly& p, const Angle& theta, double t_min) {
        TraceOptions opt;
        opt.t_min = t_min;
        RayTrace tr = trace_external_ray(p, theta, opt);
        py::dict d;
        d["status"] = tr.status == RayStatus::landed       ? "landed"
                      : tr.status == RayStatus::unresolved ? "unresolved"
                                                           : "escaped_branch";
        d["levels"] = tr.levels;
        d["points"] = tr.points;
        d["parabolic_hint"] = tr.parabolic_hint;
        if (tr.landing) d["landing"] = *tr.landing;
        return d;
      },
      py::arg("poly"), py::arg("theta"), py::arg("t_min") = 1e-8);
  m.def(
      "common_landing",
      [](const Poly& p, const Angle& a, const Angle& b, double tol) -> py::object {
        auto res = common_landing(p, a, b, tol);
        py::dict d;
        d["status"] = res.status == CommonLandingStatus::ok           ? "ok"
                      : res.status == CommonLandingStatus::degenerate ? "degenerate"
                      : res.status == CommonLandingStatus::no_common_landing
                          ? "no_common_landing"
                          : "unresolved_trace";
        if (res.cut) {
          d["vertex"] = res.cut->vertex;
          d["vertex_multiplier"] = res.cut->vertex_multiplier;
          d["vertex_period"] = res.cut->vertex_period;
        }
        return d;
      },
      py::arg("poly"), py::arg("theta1"), py::arg("theta2"), py::arg("tol") = 1e-6);

  m.def(
      "round_annulus_modulus",
      [](double r1, double r2, int n) { return modulus_dict(round_annulus_modulus(r1, r2, n)); },
      py::arg("r1"), py::arg("r2"), py::arg("n_angular") = 256);
  m.def(
      "rectangle_extremal_length",
      [](double w, double h, int cells) {
        return modulus_dict(quad_extremal_length(make_rectangle_quad(w, h, cells)));
      },
      py::arg("width"), py::arg("height"), py::arg("cells_x") = 256);
  m.def("harmonic_sum_bound", &harmonic_sum_bound, py::arg("ell"), py::arg("ells"),
        py::arg("slack") = 1e-12);
  m.def(
      "el_law_harness",
      [](int n, std::uint64_t seed, int res) {
        HarnessConfig cfg;
        cfg.n_configs = n;
        cfg.seed = seed;
        cfg.resolution = res;
        auto rep = el_law_harness(cfg);
        py::dict d;
        d["max_violation"] = rep.max_violation;
        d["violations_beyond_tol"] = rep.violations_beyond_tol;
        d["n"] = static_cast<int>(rep.cases.size());
        return d;
      },
      py::arg("n_configs") = 30, py::arg("seed") = 1, py::arg("resolution") = 128);

  m.def("period_bound", &period_bound, py::arg("D"), py::arg("mu"));
  m.def(
      "certify_pipeline",
      [](const Poly& p, int n, cplx basepoint, int resolution, int max_resolution, double level_t) {
        RenormConfig cfg;
        cfg.resolution = resolution;
        cfg.max_resolution = max_resolution;
        cfg.level_t = level_t;
        return json_to_py(pipeline_to_json(renorm_certify_pipeline(p, n, basepoint, cfg)));
      },
      py::arg("poly"), py::arg("n"), py::arg("basepoint") = cplx(0.0),
      py::arg("resolution") = 512, py::arg("max_resolution") = 1024, py::arg("level_t") = 0.1);

  py::class_<CubicParams>(m, "CubicParams")
      .def(py::init([](cplx lambda, cplx b) { return CubicParams{lambda, b}; }), py::arg("lam"),
           py::arg("b"))
      .def_readwrite("lam", &CubicParams::lambda)
      .def_readwrite("b", &CubicParams::b);
  m.def("cubic_poly", &cubic_poly, py::arg("params"));
  m.def("cubic_criticals", &cubic_criticals, py::arg("params"));
  m.def("cocritical_point", &cocritical_point, py::arg("params"), py::arg("omega2"));
  m.def(
      "connectedness_test",
      [](const CubicParams& p, int max_iter) { return connectedness_test(p, max_iter); },
      py::arg("params"), py::arg("max_iter") = 512);
  m.def(
      "principal_hyperbolic_test",
      [](const CubicParams& p, int max_iter) { return principal_hyperbolic_test(p, max_iter); },
      py::arg("params"), py::arg("max_iter") = 4096);
  m.def(
      "immediate_renorm_attempt",
      [](const CubicParams& p, int resolution, int max_resolution, double level_t,
         std::int64_t q_cap) {
        RenormConfig cfg;
        cfg.resolution = resolution;
        cfg.max_resolution = max_resolution;
        cfg.level_t = level_t;
        auto att = immediate_renorm_attempt(p, cfg, q_cap);
        py::dict d;
        d["ok"] = att.ok;
        if (!att.ok) {
          d["failed_stage"] = att.failed_stage;
          d["message"] = att.message;
        } else {
          d["pipeline"] = json_to_py(pipeline_to_json(att.pipeline));
        }
        if (att.wake) {
          d["wake"] = py::make_tuple(att.wake->theta1, att.wake->theta2);
          d["wake_root"] = att.wake->root;
        }
        return d;
      },
      py::arg("params"), py::arg("resolution") = 256, py::arg("max_resolution") = 1024,
      py::arg("level_t") = 0.15, py::arg("q_cap") = 8);
}
