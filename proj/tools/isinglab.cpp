// Command-line driver: argument parsing, config resolution, and output
// serialization.  All numerics live in the library; exit codes are 0 on
// success, 2 on input or validation errors, 3 on convergence or certificate
// failures.
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isinglab/chi.hpp"
#include "isinglab/config.hpp"
#include "isinglab/contour.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/formfactor.hpp"
#include "isinglab/fredholm.hpp"
#include "isinglab/hull.hpp"
#include "isinglab/identities.hpp"
#include "isinglab/nickel.hpp"
#include "isinglab/scan.hpp"
#include "isinglab/spectral.hpp"
#include "isinglab/types.hpp"

namespace {

using isinglab::cplx;
using json = nlohmann::json;

double parse_real_token(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
    throw isinglab::ValidationError("cannot parse number '" + text + "'");
  return v;
}

// Complex arguments arrive as RE or RE,IM.
cplx parse_cplx(const std::string& text) {
  std::size_t comma = text.find(',');
  if (comma == std::string::npos) return cplx(parse_real_token(text), 0.0);
  return cplx(parse_real_token(text.substr(0, comma)),
              parse_real_token(text.substr(comma + 1)));
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Mirror of the input convention: RE for real values, RE,IM otherwise.
std::string fmt_cplx(cplx v) {
  if (v.imag() == 0.0) return fmt_real(v.real());
  return fmt_real(v.real()) + "," + fmt_real(v.imag());
}

void emit(const isinglab::RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path);
  if (!out)
    throw isinglab::ValidationError("cannot write '" + cfg.output_path + "'");
  out << text;
}

json result_json(const std::string& method, cplx value, double err,
                 json params) {
  return json{{"value_re", value.real()},
              {"value_im", value.imag()},
              {"err_est", err},
              {"method", method},
              {"params", std::move(params)}};
}

// Torus configuration files are flat key=value: n, s0, x1..xn, y1..yn as
// RE[,IM], optional tol.active.
isinglab::TorusConfiguration parse_torus_file(const std::string& path,
                                              double tol_active_default) {
  std::ifstream in(path);
  if (!in)
    throw isinglab::ValidationError("cannot read configuration '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      std::size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw isinglab::ValidationError(path + ": line " +
                                      std::to_string(lineno) + " has no '='");
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw isinglab::ValidationError(path + ": missing key '" + key + "'");
    return it->second;
  };

  isinglab::TorusConfiguration cfg;
  cfg.n = static_cast<int>(parse_real_token(require("n")));
  if (cfg.n < 1)
    throw isinglab::ValidationError(path + ": n must be at least 1");
  cfg.s0 = parse_cplx(require("s0"));
  cfg.tol_active = tol_active_default;
  if (kv.count("tol.active")) cfg.tol_active = parse_real_token(kv["tol.active"]);
  for (int i = 1; i <= cfg.n; ++i) {
    cfg.x0.push_back(parse_cplx(require("x" + std::to_string(i))));
    cfg.y0.push_back(parse_cplx(require("y" + std::to_string(i))));
  }
  std::size_t expected = 3 + (kv.count("tol.active") ? 1 : 0) +
                         2 * static_cast<std::size_t>(cfg.n) - 1;
  if (kv.size() != expected)
    for (const auto& [key, value] : kv) {
      (void)value;
      bool known = key == "n" || key == "s0" || key == "tol.active";
      for (int i = 1; i <= cfg.n && !known; ++i)
        known = key == "x" + std::to_string(i) || key == "y" + std::to_string(i);
      if (!known)
        throw isinglab::ValidationError(path + ": unknown key '" + key + "'");
    }
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  using namespace isinglab;

  CLI::App app{"numerical laboratory for the planar-lattice two-point "
               "function and its unit-circle boundary structure"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "run configuration file (key=value)");
  int opt_threads = 0;
  auto* og_threads =
      app.add_option("--threads", opt_threads, "worker thread count");
  std::string opt_output;
  auto* og_output = app.add_option("--output", opt_output,
                                   "write to this file instead of stdout");
  std::string opt_format;
  auto* og_format = app.add_option("--format", opt_format,
                                   "output format where both apply (csv|json)");

  auto* cmd_gamma = app.add_subcommand(
      "gamma", "dispersion exponent at one point, with branch info");
  std::string ga_s, ga_z;
  cmd_gamma->add_option("--s", ga_s, "parameter point, RE or RE,IM")->required();
  cmd_gamma->add_option("--z", ga_z, "evaluation point, RE or RE,IM")->required();

  auto* cmd_mag = app.add_subcommand("mag", "spontaneous magnetization");
  std::string mg_s;
  cmd_mag->add_option("--s", mg_s, "parameter point, RE or RE,IM")->required();

  auto* cmd_chi =
      app.add_subcommand("chi", "susceptibility expansion term (JSON)");
  int ch_n = 2;
  std::string ch_s;
  double ch_r = 0.0, ch_safety = 0.0;
  int ch_m = 0;
  std::uint64_t ch_budget = default_eval_budget;
  cmd_chi->add_option("--n", ch_n, "term order, 2 or 4")->required();
  cmd_chi->add_option("--s", ch_s, "parameter point")->required();
  auto* oc_r =
      cmd_chi->add_option("--r", ch_r, "contour radius (certified before use)");
  auto* oc_m = cmd_chi->add_option("--m", ch_m, "nodes per circle");
  auto* oc_saf =
      cmd_chi->add_option("--safety", ch_safety, "radius search safety factor");
  cmd_chi->add_option("--budget", ch_budget, "evaluation budget");

  auto* cmd_corr =
      app.add_subcommand("corr", "two-point function by one of three routes (JSON)");
  std::string co_method, co_s;
  int co_M = 0, co_N = 0, co_nmax = 0, co_m = 0;
  std::uint64_t co_budget = default_eval_budget;
  cmd_corr->add_option("--method", co_method,
                       "formfactor | fredholm | contour")->required();
  cmd_corr->add_option("--M", co_M, "lattice displacement M")->required();
  cmd_corr->add_option("--N", co_N, "lattice displacement N")->required();
  cmd_corr->add_option("--s", co_s, "parameter point")->required();
  auto* oo_nmax =
      cmd_corr->add_option("--nmax", co_nmax, "expansion truncation order");
  auto* oo_m = cmd_corr->add_option("--m", co_m, "quadrature nodes");
  cmd_corr->add_option("--budget", co_budget, "evaluation budget (contour)");

  auto* cmd_nickel =
      app.add_subcommand("nickel", "unit-circle singularity families");
  cmd_nickel->require_subcommand(1);
  auto* cmd_nlist =
      cmd_nickel->add_subcommand("list", "enumerate the order-n points");
  int nl_n = 0;
  bool nl_repeats = true;
  cmd_nlist->add_option("--n", nl_n, "family order (even)")->required();
  cmd_nlist->add_option("--allow-repeats", nl_repeats,
                        "allow a root averaged with itself");
  auto* cmd_ncheck =
      cmd_nickel->add_subcommand("check", "membership test for one point");
  std::string nc_s0;
  int nc_n = 0;
  double nc_tol = 0.0;
  cmd_ncheck->add_option("--s0", nc_s0, "candidate point, RE or RE,IM")->required();
  cmd_ncheck->add_option("--n", nc_n, "family order (even)")->required();
  auto* on_tol = cmd_ncheck->add_option("--tol", nc_tol, "matching tolerance");

  auto* cmd_hull =
      app.add_subcommand("hull", "origin-versus-hull certificates (JSON)");
  cmd_hull->require_subcommand(1);
  auto* cmd_hcheck =
      cmd_hull->add_subcommand("check", "certify one torus configuration");
  std::string hc_file;
  cmd_hcheck
      ->add_option("--config", hc_file,
                   "configuration file: n, s0, x1..xn, y1..yn")
      ->required();
  auto* cmd_hrand = cmd_hull->add_subcommand(
      "random-verify", "randomized two-sided certificate check");
  int hr_n = 0, hr_trials = 1000;
  std::uint64_t hr_seed = 0;
  cmd_hrand->add_option("--n", hr_n, "configuration size (even)")->required();
  cmd_hrand->add_option("--trials", hr_trials, "trial count");
  auto* oh_seed = cmd_hrand->add_option("--seed", hr_seed, "random seed");

  auto* cmd_scan =
      app.add_subcommand("scan", "ray scan toward the unit circle (CSV)");
  std::vector<double> sc_phi, sc_eps;
  std::uint64_t sc_budget = scan_eval_budget;
  cmd_scan->add_option("--phi", sc_phi, "ray angles (repeatable)")
      ->required()
      ->expected(-1);
  cmd_scan
      ->add_option("--eps", sc_eps,
                   "distances above the circle, strictly decreasing")
      ->required()
      ->expected(-1);
  cmd_scan->add_option("--budget", sc_budget, "per-row evaluation budget");

  auto* cmd_id =
      app.add_subcommand("identities", "randomized identity battery");
  std::size_t id_trials = 1000;
  std::uint64_t id_seed = 0;
  cmd_id->add_option("--trials", id_trials, "samples per family and point");
  auto* oi_seed = cmd_id->add_option("--seed", id_seed, "random seed");

  // Global options remain usable after a subcommand name.
  for (CLI::App* sub :
       {cmd_gamma, cmd_mag, cmd_chi, cmd_corr, cmd_nickel, cmd_nlist,
        cmd_ncheck, cmd_hull, cmd_hcheck, cmd_hrand, cmd_scan, cmd_id})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = default_config();
    if (!config_file.empty()) config_apply_file(cfg, config_file);
    if (og_threads->count()) cfg.threads = opt_threads;
    if (og_output->count()) cfg.output_path = opt_output;
    if (og_format->count()) cfg.output_format = opt_format;
    cfg.validate();
    bool as_json = cfg.output_format == "json";

    if (app.got_subcommand(cmd_gamma)) {
      SpectralPoint sp(parse_cplx(ga_s));
      cplx z = parse_cplx(ga_z);
      if (z == cplx(0.0, 0.0))
        throw ValidationError("gamma: z must be nonzero");
      GammaValue gv = gamma_value(z, sp);
      if (as_json) {
        json j = result_json("gamma", gv.value, 0.0,
                             {{"s_re", sp.s.real()},
                              {"s_im", sp.s.imag()},
                              {"z_re", z.real()},
                              {"z_im", z.imag()}});
        j["branch_flipped"] = gv.branch_flipped;
        j["degenerate"] = gv.degenerate;
        emit(cfg, j.dump(2) + "\n");
      } else {
        emit(cfg, "gamma = " + fmt_cplx(gv.value) + "\n" +
                      "branch_flipped = " +
                      (gv.branch_flipped ? "true" : "false") + "\n" +
                      "degenerate = " + (gv.degenerate ? "true" : "false") +
                      "\n");
      }
      return 0;
    }

    if (app.got_subcommand(cmd_mag)) {
      SpectralPoint sp(parse_cplx(mg_s));
      cplx v = magnetization(sp);
      if (as_json)
        emit(cfg, result_json("magnetization", v, 0.0,
                              {{"s_re", sp.s.real()}, {"s_im", sp.s.imag()}})
                          .dump(2) +
                      "\n");
      else
        emit(cfg, "M = " + fmt_cplx(v) + "\n");
      return 0;
    }

    if (app.got_subcommand(cmd_chi)) {
      if (ch_n != 2 && ch_n != 4)
        throw ValidationError("chi: --n must be 2 or 4");
      SpectralPoint sp(parse_cplx(ch_s));
      // The order-4 walk visits m^8 leaves; its default m stays inside the
      // default budget.
      int m = oc_m->count() ? ch_m : (ch_n == 4 ? 10 : cfg.grid_m);
      double safety = oc_saf->count() ? ch_safety : cfg.grid_safety;
      ContourGrid grid = oc_r->count() ? certify_radius(sp, ch_r, m)
                                       : select_radius(sp, safety, m);
      ChiTerm t = chi_n(ch_n, sp, grid, cfg.threads, ch_budget);
      json j = result_json("chi-contour", t.value, t.err_est,
                           {{"n", ch_n},
                            {"s_re", sp.s.real()},
                            {"s_im", sp.s.imag()},
                            {"safety", safety},
                            {"budget", ch_budget},
                            {"threads", cfg.threads}});
      j["n"] = t.n;
      j["r_used"] = t.r_used;
      j["m_used"] = t.m_used;
      emit(cfg, j.dump(2) + "\n");
      return 0;
    }

    if (app.got_subcommand(cmd_corr)) {
      SpectralPoint sp(parse_cplx(co_s));
      CorrelationResult res;
      json params{{"s_re", sp.s.real()},
                  {"s_im", sp.s.imag()},
                  {"threads", cfg.threads}};
      if (co_method == "formfactor") {
        int nmax = oo_nmax->count() ? co_nmax : 2;
        int m = oo_m->count() ? co_m : cfg.grid_m;
        res = correlation_ff(co_M, co_N, sp, nmax, m, cfg.threads);
        params["nmax"] = nmax;
        params["m"] = m;
      } else if (co_method == "fredholm") {
        int m = oo_m->count() ? co_m : cfg.grid_m;
        res = fredholm_correlation(co_M, std::abs(co_N), sp, m, cfg.threads);
        res.N = co_N;
        params["m"] = m;
      } else if (co_method == "contour") {
        int nmax = oo_nmax->count() ? co_nmax : 1;
        if (nmax < 0 || nmax > 2)
          throw ValidationError("corr: --nmax must be 0..2");
        int m = oo_m->count() ? co_m : std::min(cfg.grid_m, 64);
        ContourGrid grid = select_radius(sp, cfg.grid_safety, m);
        cplx msq = magnetization(sp);
        msq *= msq;
        cplx sum(1.0, 0.0), last(0.0, 0.0);
        for (int n = 1; n <= nmax; ++n) {
          last = corr_integral(std::abs(co_M), std::abs(co_N), sp, n, grid,
                               cfg.threads, co_budget);
          sum += last;
        }
        res.M = co_M;
        res.N = co_N;
        res.value = msq * sum;
        res.err_est = nmax == 0 ? 0.0 : std::abs(msq * last);
        res.method = "contour";
        params["nmax"] = nmax;
        params["m"] = m;
        params["r"] = grid.r;
      } else {
        throw ValidationError(
            "corr: --method must be formfactor, fredholm, or contour");
      }
      json j = result_json(res.method, res.value, res.err_est, params);
      j["M"] = res.M;
      j["N"] = res.N;
      emit(cfg, j.dump(2) + "\n");
      return 0;
    }

    if (app.got_subcommand(cmd_nickel)) {
      if (cmd_nickel->got_subcommand(cmd_nlist)) {
        auto pts = nickel_enumerate(nl_n, nl_repeats);
        if (as_json) {
          json arr = json::array();
          for (const NickelPoint& p : pts) {
            json pj{{"n", p.n}, {"j", p.j}, {"k", p.k}, {"re_value", p.re_value}};
            json lifts = json::array();
            for (cplx z : p.points)
              lifts.push_back(json{{"re", z.real()}, {"im", z.imag()}});
            pj["points"] = lifts;
            arr.push_back(pj);
          }
          json j{{"method", "nickel-list"},
                 {"params", {{"n", nl_n}, {"allow_repeats", nl_repeats}}},
                 {"points", arr}};
          emit(cfg, j.dump(2) + "\n");
        } else {
          emit(cfg, nickel_csv(pts));
        }
      } else {
        double tol = on_tol->count() ? nc_tol : cfg.tol_active;
        NickelMatch nm = is_nickel(parse_cplx(nc_s0), nc_n, tol);
        if (as_json) {
          json j = result_json("nickel-check", cplx(nm.distance, 0.0), 0.0,
                               {{"s0", nc_s0}, {"n", nc_n}, {"tol", tol}});
          j["match"] = nm.match;
          j["j"] = nm.j;
          j["k"] = nm.k;
          j["distance"] = nm.distance;
          emit(cfg, j.dump(2) + "\n");
        } else {
          emit(cfg, "match,j,k,distance\n" +
                        std::string(nm.match ? "true" : "false") + "," +
                        std::to_string(nm.j) + "," + std::to_string(nm.k) +
                        "," + fmt_real(nm.distance) + "\n");
        }
      }
      return 0;
    }

    if (app.got_subcommand(cmd_hull)) {
      if (cmd_hull->got_subcommand(cmd_hcheck)) {
        TorusConfiguration tc = parse_torus_file(hc_file, cfg.tol_active);
        HullVectors vecs = active_vectors(tc);
        HullCertificate cert = hull_distance(vecs, cfg.tol_hull);
        const char* kind = cert.kind == HullCertificate::Kind::Containment
                               ? "Containment"
                               : cert.kind == HullCertificate::Kind::Separation
                                     ? "Separation"
                                     : "Indeterminate";
        double headline = cert.kind == HullCertificate::Kind::Separation
                              ? cert.margin
                              : cert.residual;
        json j = result_json("hull-distance", cplx(headline, 0.0), 0.0,
                             {{"file", hc_file},
                              {"tol", cfg.tol_hull},
                              {"tol_active", tc.tol_active}});
        j["kind"] = kind;
        j["margin"] = cert.margin;
        j["residual"] = cert.residual;
        j["iterations"] = cert.iterations;
        j["coefficients"] = cert.coefficients;
        j["direction"] = cert.direction;
        json active = json::array();
        for (const HullVector& v : vecs.vecs) active.push_back(v.label());
        j["active"] = active;
        emit(cfg, j.dump(2) + "\n");
        return cert.kind == HullCertificate::Kind::Indeterminate ? 3 : 0;
      }
      std::uint64_t seed = oh_seed->count() ? hr_seed : cfg.seed;
      LemmaOneReport rep =
          lemma1_randomized_verify(hr_n, hr_trials, seed, cfg.threads);
      json j{{"method", "hull-random-verify"},
             {"params",
              {{"n", hr_n}, {"trials", hr_trials}, {"seed", seed},
               {"threads", cfg.threads}}},
             {"value_re", rep.min_delta},
             {"value_im", 0.0},
             {"err_est", rep.max_residual},
             {"separations", rep.separations},
             {"containments", rep.containments},
             {"indeterminate", rep.indeterminate},
             {"min_delta", rep.min_delta},
             {"max_residual", rep.max_residual},
             {"failures", rep.failures},
             {"ok", rep.ok()}};
      emit(cfg, j.dump(2) + "\n");
      return rep.ok() ? 0 : 3;
    }

    if (app.got_subcommand(cmd_scan)) {
      auto rows = ray_scan(sc_phi, sc_eps, cfg.threads, sc_budget);
      emit(cfg, scan_csv(rows));
      for (const ScanRow& r : rows)
        if (r.status != ScanStatus::Ok) return 3;
      return 0;
    }

    if (app.got_subcommand(cmd_id)) {
      std::uint64_t seed = oi_seed->count() ? id_seed : cfg.seed;
      auto reports = identity_battery(id_trials, seed);
      bool all_ok = true;
      if (as_json) {
        json arr = json::array();
        for (const IdentityReport& r : reports) {
          arr.push_back(json{{"name", r.name},
                             {"samples", r.samples},
                             {"max_residual", r.max_residual},
                             {"tol", r.tol},
                             {"pass", r.ok()}});
          all_ok = all_ok && r.ok();
        }
        json j{{"method", "identity-battery"},
               {"params", {{"trials", id_trials}, {"seed", seed}}},
               {"families", arr},
               {"all_pass", all_ok}};
        emit(cfg, j.dump(2) + "\n");
      } else {
        std::string text;
        int passed = 0;
        for (const IdentityReport& r : reports) {
          char line[256];
          std::snprintf(line, sizeof line,
                        "[%s] %s: max residual %.3g (tol %.3g, %zu samples)\n",
                        r.ok() ? "PASS" : "FAIL", r.name.c_str(),
                        r.max_residual, r.tol, r.samples);
          text += line;
          all_ok = all_ok && r.ok();
          passed += r.ok() ? 1 : 0;
        }
        text += "battery: " + std::to_string(passed) + "/" +
                std::to_string(reports.size()) + " families passed\n";
        emit(cfg, text);
      }
      return all_ok ? 0 : 3;
    }

    throw ValidationError("no subcommand selected");
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
