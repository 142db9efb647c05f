#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gsample {

using Vector = Eigen::VectorXd;

//==============================================================================
// Errors

//! A GsParams field violates its admissible range. `parameter()` names it.
class ParameterOutOfRange : public std::invalid_argument {
 public:
  ParameterOutOfRange(std::string parameter, const std::string& what)
      : std::invalid_argument("parameter out of range: " + parameter + " (" +
                              what + ")"),
        parameter_(std::move(parameter)) {}

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

//! The min-norm active-set iteration could not certify optimality.
class NumericalStall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! An objective returned a non-finite value or gradient.
class ObjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//==============================================================================
// Objective interface

//! f : R^n -> R, continuously differentiable on an open full-measure set D.
//! grad(x) is only meaningful where in_smooth_set(x) is true.
template <class F>
concept Objective = requires(const F& f, const Vector& x) {
  { f.dim() } -> std::convertible_to<std::size_t>;
  { f.eval(x) } -> std::convertible_to<double>;
  { f.grad(x) } -> std::convertible_to<Vector>;
  { f.in_smooth_set(x) } -> std::convertible_to<bool>;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

//! Evaluates f and rejects non-finite results.
template <Objective F>
double checked_eval(const F& f, const Vector& x) {
  const double value = f.eval(x);
  if (!std::isfinite(value))
    throw ObjectiveError("objective returned a non-finite value");
  return value;
}

template <Objective F>
Vector checked_grad(const F& f, const Vector& x) {
  Vector g = f.grad(x);
  if (g.size() != x.size())
    throw ObjectiveError("gradient has wrong dimension");
  if (!all_finite(g))
    throw ObjectiveError("objective returned a non-finite gradient");
  return g;
}

//==============================================================================
// Parameters

struct GsParams {
  double eps_opt = 1e-4;
  double nu_opt = 1e-4;
  double eps0 = 0.1;
  double nu0 = 0.1;
  std::size_t m = 0;  // 0 selects 2n
  double beta = 1e-4;
  double gamma = 0.5;
  double theta_eps = 0.1;
  double theta_nu = 0.1;
  std::size_t max_iter = 10000;
  std::size_t max_backtracks = 60;
  std::size_t max_perturb_attempts = 100;
  std::uint64_t seed = 0;
  double divergence_floor = -1e12;
  bool resample_outside_domain = false;
};

//! Sample size actually used for dimension n.
inline std::size_t sample_size(const GsParams& p, std::size_t n) {
  return p.m == 0 ? 2 * n : p.m;
}

namespace detail {

inline void require(bool ok, const char* parameter, const char* constraint) {
  if (!ok) throw ParameterOutOfRange(parameter, constraint);
}

inline void validate_common(const GsParams& p, std::size_t n) {
  require(n >= 1, "n", "n >= 1");
  require(std::isfinite(p.eps_opt) && p.eps_opt >= 0, "eps_opt", "eps_opt >= 0");
  require(std::isfinite(p.nu_opt) && p.nu_opt >= 0, "nu_opt", "nu_opt >= 0");
  require(std::isfinite(p.nu0) && p.nu0 >= p.nu_opt, "nu0", "nu0 >= nu_opt");
  require(sample_size(p, n) >= n + 1, "m", "m >= n+1");
  require(p.beta > 0 && p.beta < 1, "beta", "0 < beta < 1");
  require(p.gamma > 0 && p.gamma < 1, "gamma", "0 < gamma < 1");
  require(p.theta_eps > 0 && p.theta_eps <= 1, "theta_eps", "0 < theta_eps <= 1");
  require(p.theta_nu > 0 && p.theta_nu <= 1, "theta_nu", "0 < theta_nu <= 1");
  require(p.max_iter >= 1, "max_iter", "max_iter >= 1");
  require(p.max_backtracks >= 1, "max_backtracks", "max_backtracks >= 1");
  require(p.max_perturb_attempts >= 1, "max_perturb_attempts",
          "max_perturb_attempts >= 1");
  require(!std::isnan(p.divergence_floor), "divergence_floor",
          "divergence_floor is a number");
}

}  // namespace detail

//! Throws ParameterOutOfRange naming the first violated constraint.
inline void validate_params(const GsParams& p, std::size_t n) {
  detail::validate_common(p, n);
  detail::require(std::isfinite(p.eps0) && p.eps0 > p.eps_opt, "eps0",
                  "eps0 > eps_opt");
}

//! Fixed-radius regime: eps_opt = eps0 > 0, nu_opt = nu0 = 0, theta_eps = 1.
inline void validate_fixed_radius_params(const GsParams& p, std::size_t n) {
  detail::validate_common(p, n);
  detail::require(std::isfinite(p.eps0) && p.eps0 > 0, "eps0", "eps0 > 0");
  detail::require(p.eps_opt == p.eps0, "eps_opt", "eps_opt == eps0");
  detail::require(p.nu_opt == 0 && p.nu0 == 0, "nu0", "nu_opt == nu0 == 0");
  detail::require(p.theta_eps == 1, "theta_eps", "theta_eps == 1");
}

//==============================================================================
// Iteration records

enum class StepKind {
  Reduction,   // lines (v)-(vi): shrink eps and nu, x unchanged
  LineSearch,  // lines (vii)-(x)
  Terminal,    // the iteration that triggered a termination test
};

enum class TerminationStatus {
  GradientZero,
  ToleranceMet,
  SampleOutsideDomain,
  LineSearchFailed,
  MaxIterations,
  ObjectiveDiverging,
};

struct IterationRecord {
  std::size_t k = 0;
  Vector x;
  double f_val = 0;
  double eps_k = 0;
  double nu_k = 0;
  Vector g;
  double g_norm = 0;
  StepKind step_kind = StepKind::Reduction;
  double t_k = 0;
  bool perturbed = false;
  std::size_t sample_count = 0;
};

inline std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Reduction: return "Reduction";
    case StepKind::LineSearch: return "LineSearch";
    case StepKind::Terminal: return "Terminal";
  }
  return "?";
}

inline std::string_view to_string(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::GradientZero: return "GradientZero";
    case TerminationStatus::ToleranceMet: return "ToleranceMet";
    case TerminationStatus::SampleOutsideDomain: return "SampleOutsideDomain";
    case TerminationStatus::LineSearchFailed: return "LineSearchFailed";
    case TerminationStatus::MaxIterations: return "MaxIterations";
    case TerminationStatus::ObjectiveDiverging: return "ObjectiveDiverging";
  }
  return "?";
}

inline StepKind step_kind_from_string(std::string_view s) {
  if (s == "Reduction") return StepKind::Reduction;
  if (s == "LineSearch") return StepKind::LineSearch;
  if (s == "Terminal") return StepKind::Terminal;
  throw std::invalid_argument("unknown step kind: " + std::string(s));
}

inline TerminationStatus status_from_string(std::string_view s) {
  for (auto status :
       {TerminationStatus::GradientZero, TerminationStatus::ToleranceMet,
        TerminationStatus::SampleOutsideDomain,
        TerminationStatus::LineSearchFailed, TerminationStatus::MaxIterations,
        TerminationStatus::ObjectiveDiverging}) {
    if (to_string(status) == s) return status;
  }
  throw std::invalid_argument("unknown termination status: " + std::string(s));
}

}  // namespace gsample
