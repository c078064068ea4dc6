#pragma once

#include "homsol/classifier.hpp"
#include "homsol/hunter.hpp"
#include "homsol/operators.hpp"
#include "homsol/sphere.hpp"
#include "homsol/verifier.hpp"
#include "homsol/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>

extern "C" void openblas_set_num_threads(int);

namespace homsol::cli {

using nlohmann::json;

// Everything needed to reproduce a run; embedded verbatim in every report.
struct RunConfig {
  std::string command;
  std::string op_spec;
  int n = 2;
  double d = 3.0;
  double tol = 1e-9;
  unsigned long long seed = 42;
  int samples = 1000;
  std::string grid = "48x96";
  int k = 20;
  int lmax = 4;
  int seeds = 10;
  int max_iters = 400;
  std::string out;
};

inline json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["op"] = c.op_spec;
  j["n"] = c.n;
  j["d"] = c.d;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["grid"] = c.grid;
  j["k"] = c.k;
  j["lmax"] = c.lmax;
  j["seeds"] = c.seeds;
  j["max_iters"] = c.max_iters;
  return j;
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.op_spec = j.value("op", std::string());
  c.n = j.value("n", 2);
  c.d = j.value("d", 3.0);
  c.tol = j.value("tol", 1e-9);
  c.seed = j.value("seed", 42ull);
  c.samples = j.value("samples", 1000);
  c.grid = j.value("grid", std::string("48x96"));
  c.k = j.value("k", 20);
  c.lmax = j.value("lmax", 4);
  c.seeds = j.value("seeds", 10);
  c.max_iters = j.value("max_iters", 400);
  return c;
}

namespace detail {

inline json matrix_to_json(const SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.n(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline SphereGrid parse_grid(const std::string& s, int n) {
  try {
    size_t x = s.find('x');
    if (n == 2) {
      if (x != std::string::npos) throw std::invalid_argument("circle grids take a single point count");
      return SphereGrid::circle(std::stoi(s));
    }
    if (x == std::string::npos) throw std::invalid_argument("lat-lon grids are written <nlat>x<nlon>");
    return SphereGrid::latlon(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("bad --grid value '") + s + "': " + e.what());
  }
}

inline json family_to_json(const ClassificationReport& rep) {
  json fam;
  fam["kind"] = family_kind_name(rep.kind);
  fam["reason"] = rep.reason;
  fam["linearization"] = matrix_to_json(rep.linearization);
  fam["mu_estimate"] = rep.mu_estimate;
  fam["f_at_zero"] = rep.f_at_zero;
  fam["ell"] = rep.ell;
  json basis = json::array();
  for (const auto& p : rep.basis) basis.push_back(p.to_string());
  fam["basis"] = basis;
  fam["count"] = rep.basis.size();
  return fam;
}

inline json residual_report_to_json(const ResidualReport& r) {
  json j;
  j["sup_residual"] = r.sup_residual;
  j["mean_residual"] = r.mean_residual;
  j["worst_point"] = r.worst_point;
  json checks;
  for (const auto& [name, entry] : r.per_check) checks[name] = json{{"pass", entry.pass}, {"magnitude", entry.magnitude}};
  j["per_check"] = checks;
  return j;
}

}  // namespace detail

// Executes the pipeline named by cfg.command and returns the report body.
// Pure in cfg: identical configs give identical numerical fields.
inline json run_config(const RunConfig& cfg) {
  json report;
  report["config"] = config_to_json(cfg);
  report["version"] = kVersion;
  json diagnostics = json::object();

  if (cfg.command == "classify" || cfg.command == "verify") {
    EllipticOperator F = parse_operator(cfg.op_spec, cfg.n);
    ClassificationReport rep = classify(F, cfg.n, cfg.d);
    report["family"] = detail::family_to_json(rep);
    diagnostics["linearized_residuals"] = rep.diagnostics;
    if (cfg.command == "verify") {
      SampleSet samples = SampleSet::annulus(cfg.n, cfg.samples, cfg.seed);
      json residuals = json::array();
      for (const auto& p : rep.basis) {
        HomogeneousFunction u = HomogeneousFunction::from_polynomial(p);
        residuals.push_back(detail::residual_report_to_json(residual_sup(u, F, samples)));
      }
      report["residuals"] = residuals;
    } else {
      report["residuals"] = json::array();
    }
  } else if (cfg.command == "spectrum") {
    SphereGrid grid = detail::parse_grid(cfg.grid, cfg.n);
    DiscreteLB lb(grid);
    std::vector<double> evs = lowest_eigenvalues(lb, cfg.k);
    json spec;
    spec["eigenvalues"] = evs;
    // Cluster into distinct values with multiplicities (gap threshold scaled
    // to the eigenvalue size; exact spectra are integers lambda = l(l+n-2)).
    json distinct = json::array();
    size_t i = 0;
    while (i < evs.size()) {
      size_t j = i;
      while (j + 1 < evs.size() && evs[j + 1] - evs[i] < 0.2 * (1.0 + std::abs(evs[i]))) ++j;
      double mean = 0.0;
      for (size_t t = i; t <= j; ++t) mean += evs[t];
      mean /= static_cast<double>(j - i + 1);
      distinct.push_back(json{{"value", mean}, {"multiplicity", j - i + 1}});
      i = j + 1;
    }
    spec["distinct"] = distinct;
    report["spectrum"] = spec;
    report["residuals"] = json::array();
  } else if (cfg.command == "hunt") {
    EllipticOperator F = parse_operator(cfg.op_spec, cfg.n);
    HuntConfig hc;
    hc.op = F;
    hc.n = cfg.n;
    hc.d = cfg.d;
    hc.lmax = cfg.lmax;
    hc.seeds = cfg.seeds;
    hc.rng_seed = cfg.seed;
    hc.max_iters = cfg.max_iters;
    auto results = hunt(hc);
    json runs = json::array();
    for (size_t s = 0; s < results.size(); ++s) {
      const auto& r = results[s];
      runs.push_back(json{{"seed", s},
                          {"best_residual", r.best_residual},
                          {"distance_to_harmonic", r.distance_to_harmonic},
                          {"exploratory", r.exploratory},
                          {"best_coefficients", r.best_coefficients},
                          {"trace_length", r.residual_trace.size()},
                          {"residual_trace", r.residual_trace}});
    }
    report["hunt_results"] = runs;
    report["residuals"] = json::array();
  } else {
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
  }

  report["diagnostics"] = diagnostics;
  return report;
}

// Full front door: parse argv, run, print a summary, write the report.
// Exit codes: 0 success, 1 usage errors, 2 classification errors.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* tenv = std::getenv("HOMSOL_THREADS")) {
    int t = std::atoi(tenv);
    if (t > 0) openblas_set_num_threads(t);  // 0 = auto (library default)
  }

  CLI::App app{"homsol: homogeneous solutions of fully nonlinear elliptic equations"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override its values)");
    sub->add_option("--op", cfg.op_spec, "operator spec, e.g. speclag:c=0 or linear:A=[[1,0],[0,1]]");
    sub->add_option("--n", cfg.n, "ambient dimension (2 or 3)");
    sub->add_option("--d", cfg.d, "homogeneity degree");
    sub->add_option("--tol", cfg.tol, "residual tolerance");
    sub->add_option("--seed", cfg.seed, "sample / rng seed");
    sub->add_option("--samples", cfg.samples, "sample count");
    sub->add_option("--out", cfg.out, "report output path");
  };
  CLI::App* c_classify = app.add_subcommand("classify", "classify homogeneous solutions");
  CLI::App* c_verify = app.add_subcommand("verify", "classify and verify residuals on samples");
  CLI::App* c_spectrum = app.add_subcommand("spectrum", "discrete sphere Laplacian spectrum");
  CLI::App* c_hunt = app.add_subcommand("hunt", "residual minimization over profiles");
  for (auto* sub : {c_classify, c_verify, c_spectrum, c_hunt}) add_shared(sub);
  c_spectrum->add_option("--grid", cfg.grid, "grid resolution: <m> (n=2) or <nlat>x<nlon> (n=3)");
  c_spectrum->add_option("--k", cfg.k, "number of eigenvalues");
  c_hunt->add_option("--lmax", cfg.lmax, "max spherical degree in the profile basis");
  c_hunt->add_option("--seeds", cfg.seeds, "number of optimizer starts");
  c_hunt->add_option("--max-iters", cfg.max_iters, "simplex iteration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();

  // Config-file values fill anything not set on the command line.
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      err << "usage error: cannot read config file " << config_path << "\n";
      return 1;
    }
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      err << "usage error: bad config file: " << e.what() << "\n";
      return 1;
    }
    json merged = config_to_json(config_from_json(j));
    merged["command"] = cfg.command;
    RunConfig flags = cfg;
    // Re-apply explicitly passed flags on top of the file values.
    RunConfig base = config_from_json(merged);
    if (sub->count("--op") == 0) flags.op_spec = base.op_spec;
    if (sub->count("--n") == 0) flags.n = base.n;
    if (sub->count("--d") == 0) flags.d = base.d;
    if (sub->count("--tol") == 0) flags.tol = base.tol;
    if (sub->count("--seed") == 0) flags.seed = base.seed;
    if (sub->count("--samples") == 0) flags.samples = base.samples;
    if (cfg.command == "spectrum") {
      if (sub->count("--grid") == 0) flags.grid = base.grid;
      if (sub->count("--k") == 0) flags.k = base.k;
    }
    if (cfg.command == "hunt") {
      if (sub->count("--lmax") == 0) flags.lmax = base.lmax;
      if (sub->count("--seeds") == 0) flags.seeds = base.seeds;
      if (sub->count("--max-iters") == 0) flags.max_iters = base.max_iters;
    }
    cfg = flags;
  }

  json report;
  try {
    report = run_config(cfg);
  } catch (const DegreeTwoUnsupported& e) {
    err << "classification error: d = 2 is outside the theorem (" << e.what() << ")\n";
    return 2;
  } catch (const NotElliptic& e) {
    err << "classification error: " << e.what() << "\n";
    return 2;
  } catch (const NonC1AtZero& e) {
    err << "classification error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigInvalid& e) {
    err << "classification error: " << e.what() << "\n";
    return 2;
  } catch (const OperatorParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  // Human summary.
  if (report.contains("family")) {
    const auto& fam = report["family"];
    out << cfg.command << ": " << fam["kind"].get<std::string>() << " (" << fam["count"].get<size_t>()
        << " basis elements)";
    std::string reason = fam["reason"].get<std::string>();
    if (!reason.empty()) out << " — " << reason;
    out << "\n";
  } else if (report.contains("spectrum")) {
    out << "spectrum:";
    for (const auto& c : report["spectrum"]["distinct"])
      out << " " << c["value"].get<double>() << " (x" << c["multiplicity"].get<size_t>() << ")";
    out << "\n";
  } else if (report.contains("hunt_results")) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : report["hunt_results"]) best = std::min(best, r["best_residual"].get<double>());
    out << "hunt: " << report["hunt_results"].size() << " runs, best residual " << best << "\n";
  }

  if (!cfg.out.empty()) {
    std::ofstream ofs(cfg.out);
    if (!ofs) {
      err << "usage error: cannot write " << cfg.out << "\n";
      return 1;
    }
    ofs << report.dump(2) << "\n";
    out << "report written to " << cfg.out << "\n";
  }
  return 0;
}

}  // namespace homsol::cli
