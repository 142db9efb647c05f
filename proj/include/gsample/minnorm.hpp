#pragma once

#include "gsample/core.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace gsample {

inline constexpr double kDefaultMinNormTol = 1e-12;

//! Nonempty, dimension-consistent list of vertices. conv(vertices) is the set.
class Polytope {
 public:
  explicit Polytope(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw std::invalid_argument("polytope has no vertices");
    const auto n = vertices_.front().size();
    if (n < 1) throw std::invalid_argument("polytope vertices have dimension 0");
    for (const auto& v : vertices_) {
      if (v.size() != n) throw std::invalid_argument("polytope vertex dimension mismatch");
      if (!v.allFinite()) throw std::invalid_argument("polytope vertex is not finite");
    }
  }

  std::size_t dim() const { return static_cast<std::size_t>(vertices_.front().size()); }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vector>& vertices() const { return vertices_; }

 private:
  std::vector<Vector> vertices_;
};

//! Polyhedral model conv(V) + cone(W) of a Clarke subdifferential, with W
//! generating the horizon cone. An empty V models an empty subdifferential.
struct SubdifferentialModel {
  std::vector<Vector> vertices;
  std::vector<Vector> cone_generators;

  //! Throws std::invalid_argument on inconsistent dimensions or zero generators.
  void validate(std::size_t n) const {
    for (const auto& v : vertices)
      if (static_cast<std::size_t>(v.size()) != n || !v.allFinite())
        throw std::invalid_argument("model vertex has wrong dimension or is not finite");
    for (const auto& w : cone_generators) {
      if (static_cast<std::size_t>(w.size()) != n || !w.allFinite())
        throw std::invalid_argument("cone generator has wrong dimension or is not finite");
      if (w.norm() == 0) throw std::invalid_argument("cone generator is zero");
    }
  }

  std::size_t dim() const {
    if (!vertices.empty()) return static_cast<std::size_t>(vertices.front().size());
    if (!cone_generators.empty())
      return static_cast<std::size_t>(cone_generators.front().size());
    return 0;
  }
};

struct MinNormResult {
  Vector point;
  Vector simplex_coeffs;  // lambda over vertices, in the unit simplex
  Vector cone_coeffs;     // mu >= 0 over cone generators
  double norm = 0;
};

struct AtStationary {};
struct Infeasible {};

using DescentDirection = std::variant<Vector, AtStationary, Infeasible>;

namespace detail {

// Generalized Wolfe min-norm-point iteration over conv(V) + cone(U). Rays are
// unit vectors; coefficients are mapped back by the caller.
class MinNormSolver {
 public:
  MinNormSolver(const std::vector<Vector>& vertices, const std::vector<Vector>& rays,
                double tol)
      : V_(vertices), U_(rays), tol_(tol), n_(vertices.front().size()) {
    scale_ = 1.0;
    for (const auto& v : V_) scale_ = std::max(scale_, v.squaredNorm());
  }

  MinNormResult solve() {
    const std::size_t nv = V_.size();
    const std::size_t cap = 50 * (V_.size() + U_.size());

    // Start at the vertex of least norm, lowest index on ties.
    std::size_t start = 0;
    for (std::size_t i = 1; i < nv; ++i)
      if (V_[i].squaredNorm() < V_[start].squaredNorm()) start = i;
    corral_ = {start};
    coeffs_ = {1.0};
    x_ = V_[start];

    for (std::size_t iter = 0;; ++iter) {
      if (iter >= cap) throw NumericalStall("min-norm iteration cap reached");
      if (x_.squaredNorm() == 0) break;

      const auto [entering, gap] = most_violating();
      if (!entering) break;
      if (in_corral(*entering)) {
        if (gap <= std::sqrt(tol_) * scale_) break;
        throw NumericalStall("min-norm iteration re-selected an active element");
      }
      const double before = x_.squaredNorm();
      corral_.push_back(*entering);
      coeffs_.push_back(0.0);
      minor_cycle();
      if (x_.squaredNorm() >= before && !exact_zero_) {
        // No progress: accept only if the violation is negligible.
        if (gap <= std::sqrt(tol_) * scale_) break;
        throw NumericalStall("min-norm iteration made no progress");
      }
    }
    return result();
  }

 private:
  bool is_ray(std::size_t e) const { return e >= V_.size(); }
  const Vector& element(std::size_t e) const {
    return is_ray(e) ? U_[e - V_.size()] : V_[e];
  }
  bool in_corral(std::size_t e) const {
    return std::find(corral_.begin(), corral_.end(), e) != corral_.end();
  }

  // Returns the element with the steepest first-order decrease of 1/2|x|^2,
  // if any violates optimality beyond tolerance, together with its gap.
  std::pair<std::optional<std::size_t>, double> most_violating() const {
    const double xx = x_.squaredNorm();
    std::optional<std::size_t> best;
    double best_rate = 0;
    double best_gap = 0;

    std::size_t vmin = 0;
    double vmin_dot = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < V_.size(); ++i) {
      const double d = x_.dot(V_[i]);
      if (d < vmin_dot) {
        vmin_dot = d;
        vmin = i;
      }
    }
    const double vgap = xx - vmin_dot;
    if (vgap > tol_ * scale_) {
      best = vmin;
      best_gap = vgap;
      best_rate = vgap / std::max((V_[vmin] - x_).norm(), 1e-300);
    }

    std::size_t umin = 0;
    double umin_dot = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < U_.size(); ++j) {
      const double d = x_.dot(U_[j]);
      if (d < umin_dot) {
        umin_dot = d;
        umin = j;
      }
    }
    if (!U_.empty() && -umin_dot > tol_ * std::sqrt(scale_) && -umin_dot > best_rate) {
      best = V_.size() + umin;
      best_gap = -umin_dot;
    }
    return {best, best_gap};
  }

  // Minimizes |sum alpha_i v_i + sum mu_j u_j| over the corral's affine
  // hull (sum alpha = 1, mu free). Sets exact_zero_ when that hull spans R^n.
  std::vector<double> affine_minimizer() {
    std::size_t ref = corral_.size();
    for (std::size_t i = 0; i < corral_.size(); ++i)
      if (!is_ray(corral_[i])) {
        ref = i;
        break;
      }
    const Vector& anchor = element(corral_[ref]);

    Eigen::MatrixXd D(n_, static_cast<Eigen::Index>(corral_.size() - 1));
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < corral_.size(); ++i) {
      if (i == ref) continue;
      const auto e = corral_[i];
      D.col(col++) = is_ray(e) ? element(e) : Vector(element(e) - anchor);
    }

    std::vector<double> y(corral_.size(), 0.0);
    exact_zero_ = false;
    if (D.cols() == 0) {
      y[ref] = 1.0;
      y_point_ = anchor;
      return y;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(D);
    const Vector c = cod.solve(Vector(-anchor));
    col = 0;
    double vertex_sum = 0;
    for (std::size_t i = 0; i < corral_.size(); ++i) {
      if (i == ref) continue;
      y[i] = c(col++);
      if (!is_ray(corral_[i])) vertex_sum += y[i];
    }
    y[ref] = 1.0 - vertex_sum;
    if (cod.rank() == n_) {
      // The affine hull is all of R^n, so its min-norm point is the origin.
      exact_zero_ = true;
      y_point_ = Vector::Zero(n_);
    } else {
      y_point_ = anchor + D * c;
    }
    return y;
  }

  void minor_cycle() {
    for (std::size_t guard = 0; guard <= corral_.size() + 1; ++guard) {
      const auto y = affine_minimizer();
      bool interior = true;
      for (double v : y)
        if (!(v > 0)) interior = false;
      if (interior) {
        coeffs_ = y;
        x_ = y_point_;
        return;
      }
      // Move from the current coefficients toward y until one hits zero.
      double step = 1.0;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (!(y[i] > 0)) step = std::min(step, coeffs_[i] / (coeffs_[i] - y[i]));
      exact_zero_ = false;
      std::vector<std::size_t> kept;
      std::vector<double> kept_coeffs;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double c = (1 - step) * coeffs_[i] + step * y[i];
        const bool hits_zero = !(y[i] > 0) && coeffs_[i] / (coeffs_[i] - y[i]) <= step;
        if (!hits_zero && c > 0) {
          kept.push_back(corral_[i]);
          kept_coeffs.push_back(c);
        }
      }
      if (std::none_of(kept.begin(), kept.end(), [&](auto e) { return !is_ray(e); }))
        throw NumericalStall("min-norm corral lost all vertices");
      renormalize(kept_coeffs, kept);
      corral_ = std::move(kept);
      coeffs_ = std::move(kept_coeffs);
      x_ = combination();
    }
    throw NumericalStall("min-norm minor cycle did not settle");
  }

  void renormalize(std::vector<double>& c, const std::vector<std::size_t>& elems) const {
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!is_ray(elems[i])) s += c[i];
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!is_ray(elems[i])) c[i] /= s;
  }

  Vector combination() const {
    Vector x = Vector::Zero(n_);
    for (std::size_t i = 0; i < corral_.size(); ++i) x += coeffs_[i] * element(corral_[i]);
    return x;
  }

  MinNormResult result() const {
    MinNormResult r;
    r.point = x_;
    r.simplex_coeffs = Vector::Zero(static_cast<Eigen::Index>(V_.size()));
    r.cone_coeffs = Vector::Zero(static_cast<Eigen::Index>(U_.size()));
    for (std::size_t i = 0; i < corral_.size(); ++i) {
      const auto e = corral_[i];
      if (is_ray(e))
        r.cone_coeffs(static_cast<Eigen::Index>(e - V_.size())) = coeffs_[i];
      else
        r.simplex_coeffs(static_cast<Eigen::Index>(e)) = coeffs_[i];
    }
    r.norm = x_.norm();
    return r;
  }

  const std::vector<Vector>& V_;
  const std::vector<Vector>& U_;
  double tol_;
  Eigen::Index n_;
  double scale_ = 1;

  std::vector<std::size_t> corral_;
  std::vector<double> coeffs_;
  Vector x_;
  Vector y_point_;
  bool exact_zero_ = false;
};

inline void require_tol(double tol) {
  if (!(tol > 0)) throw std::invalid_argument("min-norm tolerance must be positive");
}

}  // namespace detail

//! Minimizer of 1/2|g|^2 over conv(P). Deterministic; ties go to the lowest
//! vertex index. Throws NumericalStall if optimality cannot be certified.
inline MinNormResult min_norm_point(const Polytope& P, double tol = kDefaultMinNormTol) {
  detail::require_tol(tol);
  static const std::vector<Vector> no_rays;
  return detail::MinNormSolver(P.vertices(), no_rays, tol).solve();
}

//! Projection of the origin onto conv(V) + cone(W). std::nullopt when V is
//! empty (the model describes an empty set).
inline std::optional<MinNormResult> min_norm_generalized(const SubdifferentialModel& M,
                                                         double tol = kDefaultMinNormTol) {
  detail::require_tol(tol);
  if (M.vertices.empty()) return std::nullopt;
  M.validate(M.dim());

  std::vector<Vector> rays;
  rays.reserve(M.cone_generators.size());
  for (const auto& w : M.cone_generators) rays.push_back(w / w.norm());

  auto r = detail::MinNormSolver(M.vertices, rays, tol).solve();
  for (std::size_t j = 0; j < rays.size(); ++j)
    r.cone_coeffs(static_cast<Eigen::Index>(j)) /= M.cone_generators[j].norm();
  return r;
}

//! max over vertices of <d, v>.
inline double support_function(const Polytope& P, const Vector& d) {
  if (static_cast<std::size_t>(d.size()) != P.dim())
    throw std::invalid_argument("support_function: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices()) best = std::max(best, d.dot(v));
  return best;
}

//! Normalized steepest-descent direction -g/|g| for the model's min-norm g.
inline DescentDirection steepest_descent_direction(const SubdifferentialModel& M,
                                                   double tol = kDefaultMinNormTol) {
  const auto r = min_norm_generalized(M, tol);
  if (!r) return Infeasible{};
  if (r->norm <= tol) return AtStationary{};
  return Vector(-r->point / r->norm);
}

}  // namespace gsample
