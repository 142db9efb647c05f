// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "gsample/analysis.hpp"
#include "gsample/minnorm.hpp"
#include "gsample/sampling.hpp"
#include "gsample/solver.hpp"
#include "gsample/testbed.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gsample;
using gsample::testing::brute_force_min_norm;
using gsample::testing::random_points;

namespace {

int failures = 0;

void report(const char* id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %-5s %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::vector<Vector>> random_polytopes() {
  std::mt19937_64 gen(20240601);
  std::vector<std::vector<Vector>> out;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 2;
    const std::size_t k = 1 + (i / 2) % 5;
    out.push_back(random_points(gen, n, k));
  }
  return out;
}

bool certified(const MinNormResult& r, const std::vector<Vector>& V, double tol) {
  const Vector& g = r.point;
  for (const auto& v : V)
    if (g.dot(v - g) < -tol * (1 + g.squaredNorm())) return false;
  return true;
}

std::vector<RunTrace> all_traces;

void ac1() {
  const auto polys = random_polytopes();
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  int uncertified = 0;
  for (const auto& V : polys) {
    const auto r = min_norm_point(Polytope(V));
    worst = std::max(worst, std::abs(r.norm - brute_force_min_norm(V)));
    uncertified += !certified(r, V, 1e-9);
  }
  const double secs = seconds_since(t0);
  report("AC-1", "min-norm oracle", worst <= 1e-3 && uncertified == 0 && secs < 10,
         fmt("200 polytopes, max |norm - oracle| = %.3g, uncertified = %d, %.2f s", worst,
             uncertified, secs));
}

void ac2() {
  const auto polys = random_polytopes();
  double worst = 0;
  int used = 0;
  bool ok = true;
  for (const auto& V : polys) {
    const auto r = min_norm_point(Polytope(V));
    if (r.norm <= 1e-9) continue;
    const auto d = steepest_descent_direction(SubdifferentialModel{V, {}});
    if (!std::holds_alternative<Vector>(d)) {
      ok = false;
      continue;
    }
    worst = std::max(worst, std::abs(support_function(Polytope(V), std::get<Vector>(d)) + r.norm));
    ++used;
  }
  report("AC-2", "duality identity", ok && worst <= 1e-8 && used > 0,
         fmt("%d polytopes with 0 outside, max |sigma(d) + dist| = %.3g", used, worst));
}

void ac3() {
  bool ok = true;
  std::ostringstream detail;
  for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto f = make_tilted_root_distance(beta);
    const auto* kp = f.find_known_point(vec({0, 0}));
    if (!kp) {
      ok = false;
      continue;
    }
    const auto rep = degeneracy_report(kp->model);
    const bool degenerate = beta >= 0;
    const auto want_class =
        degenerate ? DegeneracyClass::DegenerateDirection : DegeneracyClass::NondegenerateDescent;
    const Vector want_proj = degenerate ? vec({-1, 0}) : vec({-1, beta});
    const double err = (rep.proj - want_proj).cwiseAbs().maxCoeff();
    ok = ok && rep.classification == want_class && err <= 1e-12;
    detail << " beta=" << beta << ":" << to_string(rep.classification);
  }
  report("AC-3", "tilted root degeneracy table", ok, detail.str());
}

GsParams tolerance_params(std::uint64_t seed) {
  GsParams p;
  p.eps_opt = 1e-4;
  p.nu_opt = 1e-4;
  p.seed = seed;
  return p;
}

void ac4() {
  const auto f = make_abs_sum(2);
  int good = 0;
  double worst_x = 0, slowest = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto trace = gs_solve(f, vec({5, 7}), tolerance_params(seed));
    const double secs = trace.wall_time.count();
    worst_x = std::max(worst_x, trace.final_x.norm());
    slowest = std::max(slowest, secs);
    good += trace.status == TerminationStatus::ToleranceMet && trace.final_x.norm() <= 1e-2 &&
            secs < 5;
    all_traces.push_back(trace);
  }
  report("AC-4", "abs_sum convergence", good == 10,
         fmt("%d/10 ToleranceMet, max |x| = %.3g, slowest %.3f s", good, worst_x, slowest));
}

void ac5() {
  const auto f = make_nonsmooth_rosenbrock();
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vector x0 = differentiable_start(f, vec({-1, 1}), 1e-6, seed);
    const auto trace = gs_solve(f, x0, tolerance_params(seed));
    good += (trace.final_x - vec({1, 1})).norm() <= 1e-2;
    all_traces.push_back(trace);
  }
  report("AC-5", "nonsmooth Rosenbrock", good >= 8,
         fmt("%d/10 within 1e-2 of (1,1) (start drawn within 1e-6 of (-1,1))", good));
}

void ac6() {
  const auto f = make_root_ridge();
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto trace = gs_solve(f, vec({-0.5}), tolerance_params(seed));
    good += std::abs(trace.final_x(0) - 1) <= 1e-2;
    all_traces.push_back(trace);
  }
  report("AC-6", "root_ridge across the kink", good >= 8, fmt("%d/10 within 1e-2 of 1", good));
}

void ac7() {
  const auto f = make_cube_root(0);
  const double expected = std::pow(0.1, -2.0 / 3.0) / 3.0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed, 0);
    const double r = rho_estimate(f, vec({0}), 0.1, 2000, rng);
    worst = std::max(worst, std::abs(r - expected) / expected);
  }
  report("AC-7", "rho on cube root", worst <= 0.02,
         fmt("20 seeds, max relative error %.3g vs %.6f", worst, expected));
}

void ac8() {
  const auto f = make_abs_sum(1);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rows = subdiff_approx_experiment(f, vec({0}), {0.1}, 500, seed);
    const auto& r = rows.front();
    good += r.min_norm.norm == 0.0 && r.hull.coord_min(0) <= -0.99 && r.hull.coord_max(0) >= 0.99;
  }
  report("AC-8", "sampled hull at |x| kink", good == 20,
         fmt("%d/20 seeds with min-norm exactly 0 and range covering [-0.99, 0.99]", good));
}

void ac9() {
  RngStream rng(0, 0);
  const Vector c = Vector::Zero(3);
  std::vector<double> radii;
  radii.reserve(100000);
  int outside = 0;
  for (const auto& y : sample_uniform_ball(c, 1.0, 100000, rng)) {
    radii.push_back(y.norm());
    outside += y.norm() > 1.0;
  }
  double mean = 0;
  for (double r : radii) mean += r / static_cast<double>(radii.size());
  std::sort(radii.begin(), radii.end());
  double ks = 0;
  const double N = static_cast<double>(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double F = radii[i] * radii[i] * radii[i];
    ks = std::max({ks, std::abs(F - i / N), std::abs(F - (i + 1) / N)});
  }
  const double rel = std::abs(mean - 0.75) / 0.75;
  report("AC-9", "uniform ball law", outside == 0 && rel <= 0.02 && ks <= 0.01,
         fmt("outside = %d, mean radius %.5f (rel err %.3g), KS = %.4g", outside, mean, rel, ks));
}

void ac10() {
  int bad_sum = 0, bad_disp = 0;
  std::size_t perturbed = 0;
  const double beta = GsParams{}.beta;
  for (const auto& t : all_traces) {
    if (beta * weighted_step_sum(t.records) > t.initial_f - t.final_f + 1e-9) ++bad_sum;
    for (std::size_t k = 0; k < t.records.size(); ++k) {
      const auto& r = t.records[k];
      if (r.step_kind != StepKind::LineSearch) continue;
      const Vector& next = k + 1 < t.records.size() ? t.records[k + 1].x : t.final_x;
      const Vector cand = trial_point(r.x, Vector(-r.g / r.g_norm), r.t_k);
      const double gap = (cand - next).norm();
      perturbed += r.perturbed;
      if (r.perturbed ? gap > std::min(r.t_k, r.eps_k) : gap != 0.0) ++bad_disp;
    }
  }
  report("AC-10", "trace invariants", all_traces.size() == 30 && bad_sum == 0 && bad_disp == 0,
         fmt("%zu traces, summability violations %d, displacement violations %d "
             "(%zu perturbed steps)",
             all_traces.size(), bad_sum, bad_disp, perturbed));
}

void ac11() {
  const auto f = make_abs_sum(1);
  int good = 0;
  std::size_t most = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GsParams p;
    p.eps0 = p.eps_opt = 0.2;
    p.nu0 = p.nu_opt = 0;
    p.theta_eps = 1;
    p.m = 10;
    p.seed = seed;
    const auto trace = gs_solve_fixed_radius(f, vec({0.05}), p);
    const bool stopped = trace.status == TerminationStatus::GradientZero ||
                         trace.status == TerminationStatus::ToleranceMet;
    const bool zero = !trace.records.empty() && trace.records.back().g_norm == 0.0;
    most = std::max(most, trace.records.size());
    good += stopped && zero && trace.records.size() <= 50;
  }
  report("AC-11", "fixed-radius regime", good == 10,
         fmt("%d/10 stopped with g = 0, at most %zu iterations", good, most));
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  ac7();
  ac8();
  ac9();
  ac10();
  ac11();
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
