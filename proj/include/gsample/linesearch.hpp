#pragma once

#include "gsample/core.hpp"
#include "gsample/sampling.hpp"

#include <algorithm>
#include <optional>

namespace gsample {

//! Overload taking a precomputed f(x).
template <Objective F>
std::optional<double> armijo_backtrack(const F& f, const Vector& x, double fx, const Vector& d,
                                       double g_norm, double beta, double gamma,
                                       std::size_t max_backtracks) {
  double t = 1.0;
  for (std::size_t j = 0; j <= max_backtracks; ++j) {
    if (checked_eval(f, Vector(x + t * d)) < fx - beta * t * g_norm) return t;
    t *= gamma;
  }
  return std::nullopt;
}

//! Largest t in {1, gamma, gamma^2, ..., gamma^max_backtracks} with
//!   f(x + t d) < f(x) - beta t g_norm.
//! d is expected to be a unit vector. std::nullopt when no grid point works.
template <Objective F>
std::optional<double> armijo_backtrack(const F& f, const Vector& x, const Vector& d,
                                       double g_norm, double beta, double gamma,
                                       std::size_t max_backtracks) {
  return armijo_backtrack(f, x, checked_eval(f, x), d, g_norm, beta, gamma, max_backtracks);
}

//! Returns x_cand if f is differentiable there. Otherwise draws points
//! uniformly from the ball of radius min(t, eps) around x_cand until one is in
//! the smooth set and still satisfies f < f_old - beta t g_norm.
template <Objective F>
std::optional<Vector> perturb_if_nondifferentiable(const F& f, double f_old,
                                                   const Vector& x_cand, double t, double eps,
                                                   double g_norm, double beta, RngStream& rng,
                                                   std::size_t max_attempts) {
  if (f.in_smooth_set(x_cand)) return x_cand;
  const double radius = std::min(t, eps);
  const double bound = f_old - beta * t * g_norm;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Vector y = sample_uniform_ball_point(x_cand, radius, rng);
    if (f.in_smooth_set(y) && checked_eval(f, y) < bound && (x_cand - y).norm() <= radius)
      return y;
  }
  return std::nullopt;
}

template <Objective F>
std::optional<Vector> perturb_if_nondifferentiable(const F& f, const Vector& x_old,
                                                   const Vector& x_cand, double t, double eps,
                                                   double g_norm, double beta, RngStream& rng,
                                                   std::size_t max_attempts) {
  return perturb_if_nondifferentiable(f, checked_eval(f, x_old), x_cand, t, eps, g_norm, beta,
                                      rng, max_attempts);
}

}  // namespace gsample
