#pragma once

#include "gsample/analysis.hpp"
#include "gsample/bench.hpp"
#include "gsample/solver.hpp"
#include "gsample/testbed.hpp"
#include "gsample/trace_io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gsample::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

//! Bad user input (unknown function, wrong dimension, ...): exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Vector parse_point(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a comma-separated list of numbers: '" + text + "'");
    }
  }
  if (xs.empty()) throw UsageError("empty point");
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
  if (!v.allFinite()) throw UsageError("point has non-finite components");
  return v;
}

inline TestFunction load_function(const std::string& name) {
  try {
    return make_test_function(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline Vector point_for(const TestFunction& f, const std::string& text, const char* flag) {
  Vector x = parse_point(text);
  if (static_cast<std::size_t>(x.size()) != f.dim())
    throw UsageError(std::string("dimension mismatch: ") + flag + " has " +
                     std::to_string(x.size()) + " components but " + f.name() + " has n=" +
                     std::to_string(f.dim()));
  return x;
}

//! Parameter flags shared by solve and bench. Unset flags leave lower-
//! precedence values (suite file, defaults) untouched.
struct ParamFlags {
  std::optional<double> eps_opt, nu_opt, eps0, nu0, beta, gamma, theta_eps, theta_nu,
      divergence_floor;
  std::optional<std::size_t> m, max_iter, max_backtracks, max_perturb_attempts;
  bool resample = false;

  void attach(CLI::App& app) {
    app.add_option("--eps-opt", eps_opt, "sampling radius tolerance");
    app.add_option("--nu-opt", nu_opt, "stationarity tolerance");
    app.add_option("--eps0", eps0, "initial sampling radius");
    app.add_option("--nu0", nu0, "initial stationarity target");
    app.add_option("--m", m, "sample size (default 2n)");
    app.add_option("--beta", beta, "sufficient decrease parameter");
    app.add_option("--gamma", gamma, "backtracking factor");
    app.add_option("--theta-eps", theta_eps, "radius reduction factor");
    app.add_option("--theta-nu", theta_nu, "target reduction factor");
    app.add_option("--max-iter", max_iter);
    app.add_option("--max-backtracks", max_backtracks);
    app.add_option("--max-perturb-attempts", max_perturb_attempts);
    app.add_option("--divergence-floor", divergence_floor);
    app.add_flag("--resample-outside-domain", resample,
                 "redraw samples outside the smooth set instead of stopping");
  }

  json to_overrides() const {
    json j = json::object();
    auto put = [&](const char* key, const auto& opt) {
      if (opt) j[key] = *opt;
    };
    put("eps_opt", eps_opt);
    put("nu_opt", nu_opt);
    put("eps0", eps0);
    put("nu0", nu0);
    put("m", m);
    put("beta", beta);
    put("gamma", gamma);
    put("theta_eps", theta_eps);
    put("theta_nu", theta_nu);
    put("max_iter", max_iter);
    put("max_backtracks", max_backtracks);
    put("max_perturb_attempts", max_perturb_attempts);
    put("divergence_floor", divergence_floor);
    if (resample) j["resample_outside_domain"] = true;
    return j;
  }
};

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("GS_DEFAULT_SEED"); env && *env) {
    try {
      return detail::to_uint(env, "GS_DEFAULT_SEED");
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return 0;
}

inline std::vector<double> parse_list(const std::string& text) {
  const Vector v = parse_point(text);
  return {v.data(), v.data() + v.size()};
}

struct SolveArgs {
  std::string fn, x0, trace_path, plot_path;
  std::optional<std::uint64_t> seed;
  bool fixed_radius = false;
  double perturb_start = 0;
  ParamFlags params;
};

inline int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const auto f = load_function(a.fn);
  const Vector requested = point_for(f, a.x0, "--x0");
  if (!f.in_smooth_set(requested) && !(a.perturb_start > 0))
    throw UsageError("x0 is not a point where " + f.name() +
                     " is differentiable (use --perturb-start R to start nearby)");

  GsParams p;
  if (a.fixed_radius) {
    // Regime defaults; explicit flags still win.
    p.nu_opt = p.nu0 = 0;
    p.theta_eps = 1;
  }
  try {
    update_params_from_json(p, a.params.to_overrides());
    if (a.fixed_radius && !a.params.eps_opt) p.eps_opt = p.eps0;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  p.seed = a.seed ? *a.seed : default_seed();
  const Vector x0 = differentiable_start(f, requested, a.perturb_start, p.seed);

  RunTrace trace;
  try {
    trace = a.fixed_radius ? gs_solve_fixed_radius(f, x0, p) : gs_solve(f, x0, p);
  } catch (const ParameterOutOfRange& e) {
    throw UsageError(e.what());
  }

  if (!a.trace_path.empty()) {
    std::ofstream os(a.trace_path);
    if (!os) throw std::runtime_error("cannot open trace file " + a.trace_path);
    write_trace(os, trace,
                json{{"fn", f.name()}, {"x0", to_json(x0)}, {"x0_requested", to_json(requested)},
                     {"params", to_json(p)},
                     {"mode", a.fixed_radius ? "fixed_radius" : "standard"}});
  }
  if (!a.plot_path.empty()) {
    std::ofstream os(a.plot_path);
    if (!os) throw std::runtime_error("cannot open plot file " + a.plot_path);
    write_plot_csv(os, trace);
  }
  out << summarize(trace) << '\n';
  return kOk;
}

struct DiagArgs {
  std::string kind, fn, at, deltas;
  double eps = 0.1;
  std::size_t samples = 500;
  double tol = kDefaultMinNormTol;
  std::optional<std::uint64_t> seed;
};

inline int cmd_diag(const DiagArgs& a, std::ostream& out) {
  const auto f = load_function(a.fn);
  const Vector x = point_for(f, a.at, "--at");
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  json report{{"command", a.kind}, {"fn", f.name()}, {"at", to_json(x)}};

  if (a.kind == "rho") {
    if (!(a.eps > 0)) throw UsageError("--eps must be positive");
    if (a.samples < f.dim() + 1) throw UsageError("--samples must be at least n+1");
    RngStream rng(seed, 0);
    report["eps"] = a.eps;
    report["samples"] = a.samples;
    report["seed"] = seed;
    report["rho"] = rho_estimate(f, x, a.eps, a.samples, rng);
  } else if (a.kind == "degeneracy") {
    const auto* kp = f.find_known_point(x);
    if (!kp) {
      std::string avail;
      for (const auto& p : f.known_points()) avail += " " + format_vector(p.x);
      throw UsageError("no analytic model for " + f.name() + " at " + format_vector(x) +
                       "; available points:" + (avail.empty() ? " none" : avail));
    }
    const auto rep = degeneracy_report(kp->model, a.tol);
    json verts = json::array(), gens = json::array();
    for (const auto& v : kp->model.vertices) verts.push_back(to_json(v));
    for (const auto& w : kp->model.cone_generators) gens.push_back(to_json(w));
    report["tol"] = a.tol;
    report["model"] = {{"vertices", verts}, {"cone_generators", gens}, {"note", kp->note}};
    report["subdiff_empty"] = rep.subdiff_empty;
    report["contains_zero"] = rep.contains_zero;
    report["proj"] = rep.subdiff_empty ? json(nullptr) : to_json(rep.proj);
    report["neg_proj_interior"] = rep.neg_proj_interior;
    report["classification"] = std::string(to_string(rep.classification));
  } else if (a.kind == "approx") {
    if (a.deltas.empty()) throw UsageError("approx needs --deltas");
    const auto deltas = parse_list(a.deltas);
    for (std::size_t i = 0; i < deltas.size(); ++i)
      if (!(deltas[i] > 0) || (i > 0 && !(deltas[i] < deltas[i - 1])))
        throw UsageError("--deltas must be positive and strictly decreasing");
    const auto rows = subdiff_approx_experiment(f, x, deltas, a.samples, seed);
    report["samples"] = a.samples;
    report["seed"] = seed;
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"delta", r.delta},
                     {"min_norm", r.min_norm.norm},
                     {"min_norm_point", to_json(r.min_norm.point)},
                     {"coord_min", to_json(r.hull.coord_min)},
                     {"coord_max", to_json(r.hull.coord_max)}});
    report["rows"] = arr;
  } else {
    throw UsageError("unknown diag kind '" + a.kind + "' (expected rho, degeneracy or approx)");
  }
  out << report.dump() << '\n';
  return kOk;
}

struct BenchArgs {
  std::string suite_path, out_path, trace_dir;
  unsigned jobs = 1;
  ParamFlags params;
};

inline int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream is(a.suite_path);
  if (!is) throw UsageError("cannot open suite file " + a.suite_path);
  std::vector<BenchCell> cells;
  try {
    cells = parse_suite(json::parse(is));
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad suite file: ") + e.what());
  }
  std::optional<std::filesystem::path> trace_dir;
  if (!a.trace_dir.empty()) {
    trace_dir = a.trace_dir;
    std::filesystem::create_directories(*trace_dir);
  }
  const auto rows = run_bench(cells, a.params.to_overrides(), a.jobs, trace_dir);

  bool any_error = false;
  for (const auto& r : rows)
    if (r.status == "error") {
      any_error = true;
      err << "error: " << r.fn << " seed " << r.seed << ": " << r.error << '\n';
    }
  if (a.out_path.empty()) {
    write_bench_csv(out, rows);
  } else {
    std::ofstream os(a.out_path);
    if (!os) throw std::runtime_error("cannot open output file " + a.out_path);
    write_bench_csv(os, rows);
  }
  return any_error ? kRuntime : kOk;
}

inline int cmd_summarize(const std::string& path, std::ostream& out) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open trace file " + path);
  out << summarize(read_trace(is).trace) << '\n';
  return kOk;
}

//! Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient sampling solver and diagnostics"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run the gradient sampling method");
  s->add_option("--fn", solve.fn, "test function, e.g. abs_sum:2")->required();
  s->add_option("--x0", solve.x0, "starting point, comma separated")->required();
  s->add_option("--seed", solve.seed, "RNG seed (default: $GS_DEFAULT_SEED or 0)");
  s->add_option("--trace", solve.trace_path, "write a JSON-lines trace");
  s->add_option("--plot", solve.plot_path, "write k,f,g_norm,eps,nu,t as CSV");
  s->add_option("--perturb-start", solve.perturb_start,
                "if x0 is a kink, start from a random differentiable point this close");
  s->add_flag("--fixed-radius", solve.fixed_radius,
              "fixed sampling radius eps0 with zero stationarity target");
  solve.params.attach(*s);

  DiagArgs diag;
  auto* d = app.add_subcommand("diag", "criticality and subdifferential diagnostics");
  d->add_option("kind", diag.kind, "rho | degeneracy | approx")->required();
  d->add_option("--fn", diag.fn)->required();
  d->add_option("--at", diag.at, "point, comma separated")->required();
  d->add_option("--eps", diag.eps, "sampling radius for rho");
  d->add_option("--samples", diag.samples, "number of sampled gradients");
  d->add_option("--deltas", diag.deltas, "decreasing radii for approx, comma separated");
  d->add_option("--tol", diag.tol, "min-norm tolerance");
  d->add_option("--seed", diag.seed);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run a suite of solves and write CSV");
  b->add_option("suite", bench.suite_path, "suite JSON file")->required();
  b->add_option("--out", bench.out_path, "CSV output (default stdout)");
  b->add_option("--jobs", bench.jobs, "parallel workers");
  b->add_option("--trace-dir", bench.trace_dir, "write one trace per run here");
  bench.params.attach(*b);

  std::string summary_path;
  auto* sm = app.add_subcommand("summarize", "re-summarize a trace file");
  sm->add_option("trace", summary_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_solve(solve, out);
    if (*d) return cmd_diag(diag, out);
    if (*b) return cmd_bench(bench, out, err);
    if (*sm) return cmd_summarize(summary_path, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace gsample::cli
