#pragma once

#include "gsample/core.hpp"
#include "gsample/linesearch.hpp"
#include "gsample/minnorm.hpp"
#include "gsample/sampling.hpp"

#include <chrono>
#include <optional>
#include <vector>

namespace gsample {

struct SolverState {
  Vector x;
  double f = 0;
  double eps = 0;
  double nu = 0;
  std::size_t k = 0;
};

//! Result of one loop body. `record` is absent only when the iteration stopped
//! before g^k was available (a sample left the smooth set).
struct IterationOutcome {
  SolverState next;
  std::optional<IterationRecord> record;
  std::optional<TerminationStatus> status;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  TerminationStatus status = TerminationStatus::MaxIterations;
  Vector final_x;
  double final_f = 0;
  double initial_f = 0;
  double divergence_floor = 0;
  std::chrono::duration<double> wall_time{0};
};

//! The trial point x + t d used by the line search and the update rule.
inline Vector trial_point(const Vector& x, const Vector& d, double t) { return x + t * d; }

//! One pass through sample / min-norm / termination test / reduction or line
//! search / differentiability fix-up. `state.x` must be in the smooth set.
template <Objective F>
IterationOutcome gs_iteration(const F& f, const SolverState& state, const GsParams& p,
                              RngStream& rng) {
  const std::size_t n = f.dim();
  const std::size_t m = sample_size(p, n);
  IterationOutcome out;
  out.next = state;

  const std::size_t redraws = p.resample_outside_domain ? p.max_perturb_attempts : 0;
  auto cloud = build_cloud(f, state.x, state.eps, m, rng, redraws);
  if (!cloud) {
    out.status = TerminationStatus::SampleOutsideDomain;
    return out;
  }

  const auto mn = min_norm_point(Polytope(cloud->gradients));

  IterationRecord rec;
  rec.k = state.k;
  rec.x = state.x;
  rec.f_val = state.f;
  rec.eps_k = state.eps;
  rec.nu_k = state.nu;
  rec.g = mn.point;
  rec.g_norm = mn.point.norm();
  rec.sample_count = cloud->sample_points.size();

  const bool gradient_zero = (cloud->gradients.front().array() == 0.0).all();
  const bool tolerance_met = rec.g_norm <= p.nu_opt && state.eps <= p.eps_opt;
  if (gradient_zero || tolerance_met) {
    rec.step_kind = StepKind::Terminal;
    out.record = std::move(rec);
    out.status =
        gradient_zero ? TerminationStatus::GradientZero : TerminationStatus::ToleranceMet;
    return out;
  }

  if (rec.g_norm <= state.nu) {
    rec.step_kind = StepKind::Reduction;
    out.next.nu = p.theta_nu * state.nu;
    out.next.eps = p.theta_eps * state.eps;
    out.next.k = state.k + 1;
    out.record = std::move(rec);
    return out;
  }

  rec.step_kind = StepKind::LineSearch;
  const Vector d = -rec.g / rec.g_norm;
  const auto t = armijo_backtrack(f, state.x, state.f, d, rec.g_norm, p.beta, p.gamma,
                                  p.max_backtracks);
  if (!t) {
    rec.step_kind = StepKind::Terminal;
    out.record = std::move(rec);
    out.status = TerminationStatus::LineSearchFailed;
    return out;
  }
  rec.t_k = *t;

  const Vector candidate = trial_point(state.x, d, *t);
  const auto x_next = perturb_if_nondifferentiable(f, state.f, candidate, *t, state.eps,
                                                   rec.g_norm, p.beta, rng,
                                                   p.max_perturb_attempts);
  if (!x_next) {
    rec.step_kind = StepKind::Terminal;
    rec.t_k = 0;
    out.record = std::move(rec);
    out.status = TerminationStatus::LineSearchFailed;
    return out;
  }
  rec.perturbed = !f.in_smooth_set(candidate);
  out.next.x = *x_next;
  out.next.f = checked_eval(f, *x_next);
  out.next.k = state.k + 1;
  out.record = std::move(rec);
  return out;
}

namespace detail {

template <Objective F>
RunTrace run_gs(const F& f, const Vector& x0, const GsParams& p) {
  const auto start = std::chrono::steady_clock::now();
  if (static_cast<std::size_t>(x0.size()) != f.dim())
    throw std::invalid_argument("x0 dimension does not match the objective");
  if (!x0.allFinite()) throw std::invalid_argument("x0 is not finite");
  if (!f.in_smooth_set(x0))
    throw std::invalid_argument("x0 is not a point of differentiability");

  RunTrace trace;
  trace.divergence_floor = p.divergence_floor;
  SolverState state{x0, checked_eval(f, x0), p.eps0, p.nu0, 0};
  trace.initial_f = state.f;
  trace.status = TerminationStatus::MaxIterations;

  for (std::size_t k = 0; k < p.max_iter; ++k) {
    RngStream rng(p.seed, k);
    auto out = gs_iteration(f, state, p, rng);
    if (out.record) trace.records.push_back(std::move(*out.record));
    if (out.status) {
      trace.status = *out.status;
      break;
    }
    state = std::move(out.next);
    if (state.f < p.divergence_floor) {
      trace.status = TerminationStatus::ObjectiveDiverging;
      break;
    }
  }
  trace.final_x = state.x;
  trace.final_f = state.f;
  trace.wall_time = std::chrono::steady_clock::now() - start;
  return trace;
}

}  // namespace detail

//! Runs the gradient sampling loop from x0 until a termination test fires,
//! max_iter iterations elapse, or f drops below divergence_floor.
template <Objective F>
RunTrace gs_solve(const F& f, const Vector& x0, const GsParams& p) {
  validate_params(p, f.dim());
  return detail::run_gs(f, x0, p);
}

//! Fixed sampling radius eps0 with a zero stationarity target: stops at the
//! termination test only when the sampled hull contains the origin.
template <Objective F>
RunTrace gs_solve_fixed_radius(const F& f, const Vector& x0, const GsParams& p) {
  validate_fixed_radius_params(p, f.dim());
  return detail::run_gs(f, x0, p);
}

//! x0 itself if f is differentiable there, otherwise the first uniform draw
//! from the radius-ball around x0 that is. Deterministic in `seed`.
template <Objective F>
Vector differentiable_start(const F& f, const Vector& x0, double radius, std::uint64_t seed,
                            std::size_t max_attempts = 1000) {
  if (f.in_smooth_set(x0)) return x0;
  if (!(radius > 0)) throw std::invalid_argument("x0 is not a point of differentiability");
  RngStream rng(seed, ~std::uint64_t{0});
  for (std::size_t i = 0; i < max_attempts; ++i) {
    Vector y = sample_uniform_ball_point(x0, radius, rng);
    if (f.in_smooth_set(y)) return y;
  }
  throw std::runtime_error("no point of differentiability found near x0");
}

//! Sum over records of t_k |g^k|.
inline double weighted_step_sum(const std::vector<IterationRecord>& records) {
  double s = 0;
  for (const auto& r : records) s += r.t_k * r.g_norm;
  return s;
}

}  // namespace gsample
