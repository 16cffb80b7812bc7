#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "plmod/certify.hpp"
#include "plmod/cubic.hpp"
#include "plmod/extremal.hpp"
#include "plmod/io.hpp"
#include "plmod/parallel.hpp"
#include "plmod/poly.hpp"
#include "plmod/ray.hpp"
#include "plmod/region.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace plmod;

namespace {

cplx parse_point(const std::string& s) {
  std::size_t comma = s.find(',');
  if (comma == std::string::npos) return cplx(std::stod(s), 0.0);
  return cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

fs::path run_dir(const std::string& out_opt, const std::string& digest) {
  if (!out_opt.empty()) {
    fs::create_directories(out_opt);
    return out_opt;
  }
  const char* root = std::getenv("PLMOD_OUT_ROOT");
  fs::path base = root ? root : "plmod_out";
  fs::path dir = base / digest;
  fs::create_directories(dir);
  return dir;
}

void save_region(const Region& r, const fs::path& dir, const std::string& name,
                 bool boundary_csv = false) {
  std::vector<std::uint8_t> img(r.mask.size());
  for (std::size_t c = 0; c < r.mask.size(); ++c) img[c] = r.mask[c] ? 255 : 0;
  write_png_gray((dir / (name + ".png")).string(), img.data(), r.grid.nx, r.grid.ny);
  json side{{"cx", r.grid.cx}, {"cy", r.grid.cy}, {"h", r.grid.h},
            {"nx", r.grid.nx}, {"ny", r.grid.ny}};
  save_json(side, (dir / (name + ".json")).string());
  if (boundary_csv) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "loop,re,im\n";
    auto loops = r.boundary_polylines();
    for (std::size_t l = 0; l < loops.size(); ++l)
      for (const cplx& z : loops[l]) csv << l << "," << z.real() << "," << z.imag() << "\n";
    write_text_file((dir / (name + "_boundary.csv")).string(), csv.str());
  }
}

Region load_region(const std::string& png_path, const std::string& json_path) {
  int w = 0, h = 0;
  auto img = read_png_gray(png_path, w, h);
  json side = load_json(json_path);
  Region r;
  r.grid.cx = side["cx"].get<double>();
  r.grid.cy = side["cy"].get<double>();
  r.grid.h = side["h"].get<double>();
  r.grid.nx = side["nx"].get<int>();
  r.grid.ny = side["ny"].get<int>();
  if (r.grid.nx != w || r.grid.ny != h) throw std::invalid_argument("region sidecar mismatch");
  r.mask.assign(img.size(), 0);
  for (std::size_t c = 0; c < img.size(); ++c) r.mask[c] = img[c] >= 128 ? 1 : 0;
  return r;
}

json modulus_json(const ModulusEstimate& est, const std::string& carrier_hash) {
  return json{{"lower", est.lower}, {"upper", est.upper}, {"h", est.h},
              {"method", est.method}, {"carrier_hash", carrier_hash}};
}

int fail_stage(const std::string& stage, const std::string& message) {
  std::cerr << "stage " << stage << " failed: " << message << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial-like modulus toolkit"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (0 = auto); results do not depend on it");

  auto* trace_cmd = app.add_subcommand("trace-ray", "trace an external ray, dump CSV");
  std::string poly_path, angle_str, out_opt;
  double tmin = 1e-8;
  trace_cmd->add_option("--poly", poly_path, "polynomial JSON")->required();
  trace_cmd->add_option("--angle", angle_str, "angle p/q")->required();
  trace_cmd->add_option("--tmin", tmin, "final potential level");
  trace_cmd->add_option("--out", out_opt, "output directory");

  auto* fp_cmd = app.add_subcommand("find-periodic", "periodic orbits of period dividing n");
  std::string fp_poly, fp_out;
  int fp_n = 1;
  fp_cmd->add_option("--poly", fp_poly)->required();
  fp_cmd->add_option("--period", fp_n)->required();
  fp_cmd->add_option("--out", fp_out);

  auto* mod_cmd = app.add_subcommand("modulus", "modulus / extremal length estimates");
  std::string annulus_kind, region_png, region_json_path, mod_out;
  double r1 = 1.0, r2 = 2.0, rect_w = 0.0, rect_h = 0.0;
  int mod_res = 256;
  mod_cmd->add_option("--annulus", annulus_kind, "round");
  mod_cmd->add_option("--r1", r1);
  mod_cmd->add_option("--r2", r2);
  mod_cmd->add_option("--region-png", region_png, "raster annulus bitmask");
  mod_cmd->add_option("--region-json", region_json_path, "raster sidecar");
  mod_cmd->add_option("--rect-w", rect_w, "rectangle quad width");
  mod_cmd->add_option("--rect-h", rect_h, "rectangle quad height");
  mod_cmd->add_option("--res", mod_res);
  mod_cmd->add_option("--out", mod_out);

  auto* pl_cmd = app.add_subcommand("build-pl", "construct the restriction regions");
  std::string pl_poly, pl_base = "0,0", pl_out;
  int pl_n = 1, pl_res = 512;
  double pl_level = 0.1;
  pl_cmd->add_option("--poly", pl_poly)->required();
  pl_cmd->add_option("--iterate", pl_n);
  pl_cmd->add_option("--basepoint", pl_base);
  pl_cmd->add_option("--level", pl_level);
  pl_cmd->add_option("--res", pl_res);
  pl_cmd->add_option("--out", pl_out);

  auto* cert_cmd = app.add_subcommand("certify", "full renormalization certificate pipeline");
  std::string cert_poly, cert_base = "0,0", cert_out;
  int cert_n = 1, cert_res = 512, cert_maxres = 1024;
  double cert_level = 0.1;
  cert_cmd->add_option("--poly", cert_poly)->required();
  cert_cmd->add_option("--iterate", cert_n)->required();
  cert_cmd->add_option("--basepoint", cert_base);
  cert_cmd->add_option("--level", cert_level);
  cert_cmd->add_option("--res", cert_res);
  cert_cmd->add_option("--max-res", cert_maxres);
  cert_cmd->add_option("--out", cert_out);

  auto* ren_cmd = app.add_subcommand("renorm", "immediate renormalization attempt for the cubic slice");
  std::string ren_lambda = "0,0", ren_b = "0,0", ren_out;
  int ren_res = 512, ren_maxres = 1024, ren_qcap = 12;
  double ren_level = 0.15;
  ren_cmd->add_option("--lambda", ren_lambda)->required();
  ren_cmd->add_option("--b", ren_b)->required();
  ren_cmd->add_option("--res", ren_res);
  ren_cmd->add_option("--max-res", ren_maxres);
  ren_cmd->add_option("--level", ren_level);
  ren_cmd->add_option("--qcap", ren_qcap);
  ren_cmd->add_option("--out", ren_out);

  auto* slice_cmd = app.add_subcommand("slice", "cubic slice rasters (connectedness + principal)");
  std::string sl_lambda = "0,0", sl_out, sl_window;
  double sl_halfwidth = 2.5;
  int sl_res = 512, sl_iter = 256;
  slice_cmd->add_option("--lambda", sl_lambda)->required();
  slice_cmd->add_option("--window", sl_window, "cx,cy,halfwidth (default 0,0,2.5)");
  slice_cmd->add_option("--halfwidth", sl_halfwidth);
  slice_cmd->add_option("--res", sl_res);
  slice_cmd->add_option("--max-iter", sl_iter);
  std::int64_t sl_wakes_qcap = 0;
  std::string sl_param_ray;
  slice_cmd->add_option("--wakes-qcap", sl_wakes_qcap,
                        "scan for wakes among parameter-ray angles with denominator <= qcap");
  slice_cmd->add_option("--param-ray", sl_param_ray, "dump one parameter-ray trace as CSV (p/q)");
  slice_cmd->add_option("--out", sl_out);

  auto* har_cmd = app.add_subcommand("harness", "extremal-length law harness");
  int har_n = 100, har_res = 160;
  std::uint64_t har_seed = 1;
  std::string har_out;
  har_cmd->add_option("--configs", har_n);
  har_cmd->add_option("--seed", har_seed);
  har_cmd->add_option("--res", har_res);
  har_cmd->add_option("--out", har_out);

  for (CLI::App* sc : {trace_cmd, fp_cmd, mod_cmd, pl_cmd, cert_cmd, ren_cmd, slice_cmd, har_cmd})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  set_workers(workers);

  try {
    if (*trace_cmd) {
      Angle theta = Angle::parse(angle_str);
      Poly p = load_poly(poly_path);
      TraceOptions opt;
      opt.t_min = tmin;
      RayTrace tr = trace_external_ray(p, theta, opt);
      json cfg{{"poly", poly_to_json(p)}, {"angle", theta.str()}, {"tmin", tmin}};
      std::string digest = fnv1a_hex(cfg.dump());
      fs::path dir = run_dir(out_opt, digest);
      write_text_file((dir / "ray.csv").string(), ray_trace_csv(tr));
      json meta{{"angle", theta.str()},
                {"status", tr.status == RayStatus::landed       ? "landed"
                           : tr.status == RayStatus::unresolved ? "unresolved"
                                                                : "escaped_branch"},
                {"parabolic_hint", tr.parabolic_hint},
                {"config_digest", digest}};
      if (tr.landing) meta["landing"] = {tr.landing->real(), tr.landing->imag()};
      save_json(meta, (dir / "ray.json").string());
      std::cout << dir.string() << "\n";
      return tr.status == RayStatus::escaped_branch ? fail_stage("trace", "newton divergence") : 0;
    }

    if (*fp_cmd) {
      Poly p = load_poly(fp_poly);
      auto orbits = find_periodic_points(p, fp_n);
      json arr = json::array();
      for (const auto& o : orbits) {
        json pts = json::array();
        for (cplx z : o.points) pts.push_back({z.real(), z.imag()});
        arr.push_back(json{{"period", o.period},
                           {"points", pts},
                           {"multiplier", {o.multiplier.real(), o.multiplier.imag()}},
                           {"kind", to_string(o.kind)}});
      }
      json cfg{{"poly", poly_to_json(p)}, {"period", fp_n}};
      std::string digest = fnv1a_hex(cfg.dump());
      fs::path dir = run_dir(fp_out, digest);
      save_json(json{{"orbits", arr}, {"config_digest", digest}}, (dir / "periodic.json").string());
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (*mod_cmd) {
      ModulusEstimate est;
      std::string hash;
      json cfg{{"res", mod_res}};
      if (annulus_kind == "round") {
        est = round_annulus_modulus(r1, r2, mod_res);
        cfg["round"] = {r1, r2};
        hash = fnv1a_hex(cfg.dump());
      } else if (!region_png.empty()) {
        Region r = load_region(region_png, region_json_path);
        est = annulus_modulus(r);
        hash = fnv1a_hex(std::string(r.mask.begin(), r.mask.end()));
        cfg["region"] = region_png;
      } else if (rect_w > 0.0 && rect_h > 0.0) {
        est = quad_extremal_length(make_rectangle_quad(rect_w, rect_h, mod_res));
        cfg["rect"] = {rect_w, rect_h};
        hash = fnv1a_hex(cfg.dump());
      } else {
        std::cerr << "modulus: need --annulus round, --region-png, or --rect-w/--rect-h\n";
        return 2;
      }
      fs::path dir = run_dir(mod_out, fnv1a_hex(cfg.dump()));
      save_json(modulus_json(est, hash), (dir / "modulus.json").string());
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (*pl_cmd) {
      Poly p = load_poly(pl_poly);
      cplx basepoint = parse_point(pl_base);
      RenormConfig cfg;
      cfg.level_t = pl_level;
      cfg.resolution = pl_res;
      cfg.max_resolution = pl_res;
      auto out = renorm_certify_pipeline(p, pl_n, basepoint, cfg);
      fs::path dir = run_dir(pl_out, out.config_digest);
      save_json(pipeline_to_json(out), (dir / "pipeline.json").string());
      if (out.ok) {
        save_region(out.build.U0, dir, "U0", true);
        save_region(out.build.U1, dir, "U1", true);
        save_region(out.build.annulus, dir, "annulus");
      }
      std::cout << dir.string() << "\n";
      return out.ok ? 0 : fail_stage(out.failed_stage, out.message);
    }

    if (*cert_cmd) {
      Poly p = load_poly(cert_poly);
      cplx basepoint = parse_point(cert_base);
      RenormConfig cfg;
      cfg.level_t = cert_level;
      cfg.resolution = cert_res;
      cfg.max_resolution = cert_maxres;
      auto out = renorm_certify_pipeline(p, cert_n, basepoint, cfg);
      fs::path dir = run_dir(cert_out, out.config_digest);
      save_json(pipeline_to_json(out), (dir / "certificates.json").string());
      if (out.ok) {
        save_region(out.build.U0, dir, "U0");
        save_region(out.build.U1, dir, "U1");
      }
      std::cout << dir.string() << "\n";
      return out.ok ? 0 : fail_stage(out.failed_stage, out.message);
    }

    if (*ren_cmd) {
      CubicParams params{parse_point(ren_lambda), parse_point(ren_b)};
      RenormConfig cfg;
      cfg.level_t = ren_level;
      cfg.resolution = ren_res;
      cfg.max_resolution = ren_maxres;
      auto att = immediate_renorm_attempt(params, cfg, ren_qcap);
      json j = att.ok ? pipeline_to_json(att.pipeline)
                      : json{{"ok", false}, {"failed_stage", att.failed_stage}, {"message", att.message}};
      if (att.wake)
        j["wake"] = json{{"theta1", att.wake->theta1.str()},
                         {"theta2", att.wake->theta2.str()},
                         {"root", {att.wake->root.real(), att.wake->root.imag()}}};
      json cfgj{{"lambda", {params.lambda.real(), params.lambda.imag()}},
                {"b", {params.b.real(), params.b.imag()}},
                {"res", ren_res}};
      fs::path dir = run_dir(ren_out, fnv1a_hex(cfgj.dump()));
      save_json(j, (dir / "renorm.json").string());
      std::cout << dir.string() << "\n";
      return att.ok ? 0 : fail_stage(att.failed_stage, att.message);
    }

    if (*slice_cmd) {
      cplx lambda = parse_point(sl_lambda);
      double cx = 0.0, cy = 0.0;
      if (!sl_window.empty()) {
        std::size_t c1 = sl_window.find(','), c2 = sl_window.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
          throw std::invalid_argument("slice: --window expects cx,cy,halfwidth");
        cx = std::stod(sl_window.substr(0, c1));
        cy = std::stod(sl_window.substr(c1 + 1, c2 - c1 - 1));
        sl_halfwidth = std::stod(sl_window.substr(c2 + 1));
      }
      json cfg{{"lambda", {lambda.real(), lambda.imag()}},
               {"window", {cx, cy, sl_halfwidth}},
               {"res", sl_res},
               {"max_iter", sl_iter}};
      std::string digest = fnv1a_hex(cfg.dump());
      fs::path dir = run_dir(sl_out, digest);
      if (cx == 0.0 && cy == 0.0) {
        auto conn = connectedness_raster(lambda, sl_halfwidth, sl_res, sl_iter);
        write_png_gray((dir / "connectedness.png").string(), conn.data(), sl_res, sl_res);
        if (std::abs(lambda) < 1.0) {
          auto prin = principal_raster(lambda, sl_halfwidth, sl_res, 4 * sl_iter);
          write_png_gray((dir / "principal.png").string(), prin.data(), sl_res, sl_res);
        }
      } else {
        // off-center window: general raster (no exact symmetry guarantee)
        GridSpec g = GridSpec::window(cx - sl_halfwidth, cx + sl_halfwidth, cy - sl_halfwidth,
                                      cy + sl_halfwidth, sl_res, sl_res);
        std::vector<std::uint8_t> conn(g.size(), 0), prin(g.size(), 0);
        bool do_prin = std::abs(lambda) < 1.0;
        parallel_for(g.ny, [&](std::size_t jj) {
          int j = static_cast<int>(jj);
          for (int i = 0; i < g.nx; ++i) {
            CubicParams p{lambda, g.center(i, j)};
            bool c = connectedness_test(p, sl_iter);
            conn[g.idx(i, j)] = c ? 255 : 0;
            if (do_prin)
              prin[g.idx(i, j)] = principal_hyperbolic_test(p, 4 * sl_iter) ? 255 : (c ? 128 : 0);
          }
        });
        write_png_gray((dir / "connectedness.png").string(), conn.data(), sl_res, sl_res);
        if (do_prin)
          write_png_gray((dir / "principal.png").string(), prin.data(), sl_res, sl_res);
      }
      if (sl_wakes_qcap > 0) {
        json wakes = json::array();
        for (const WakePair& w : scan_wakes(lambda, sl_wakes_qcap))
          wakes.push_back(json{{"theta1", w.theta1.str()},
                               {"theta2", w.theta2.str()},
                               {"root", {w.root.real(), w.root.imag()}}});
        save_json(json{{"lambda", {lambda.real(), lambda.imag()}}, {"wakes", wakes}},
                  (dir / "wakes.json").string());
      }
      if (!sl_param_ray.empty()) {
        ParameterRayTrace tr = parameter_ray(lambda, Angle::parse(sl_param_ray));
        std::ostringstream csv;
        csv.precision(17);
        csv << "level,re,im\n";
        for (const auto& pt : tr.points)
          csv << pt.level << "," << pt.b.real() << "," << pt.b.imag() << "\n";
        write_text_file((dir / "param_ray.csv").string(), csv.str());
      }
      save_json(json{{"config_digest", digest},
                     {"palette", {{"in", 255}, {"out", 0}, {"undecided", 128}}}},
                (dir / "slice.json").string());
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (*har_cmd) {
      HarnessConfig cfg;
      cfg.n_configs = har_n;
      cfg.seed = har_seed;
      cfg.resolution = har_res;
      auto rep = el_law_harness(cfg);
      json cases = json::array();
      for (const auto& c : rep.cases)
        cases.push_back(json{{"kind", c.kind}, {"violation", c.violation}, {"deviation", c.deviation}});
      json cfgj{{"configs", har_n}, {"seed", har_seed}, {"res", har_res}};
      std::string digest = fnv1a_hex(cfgj.dump());
      fs::path dir = run_dir(har_out, digest);
      save_json(json{{"cases", cases},
                     {"max_violation", rep.max_violation},
                     {"violations_beyond_tol", rep.violations_beyond_tol},
                     {"config_digest", digest}},
                (dir / "harness.json").string());
      std::cout << dir.string() << "\n";
      return rep.violations_beyond_tol == 0 ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
