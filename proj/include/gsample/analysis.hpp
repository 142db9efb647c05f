#pragma once

#include "gsample/core.hpp"
#include "gsample/minnorm.hpp"
#include "gsample/sampling.hpp"
#include "gsample/solver.hpp"

#include <algorithm>
#include <limits>
#include <string_view>
#include <vector>

namespace gsample {

namespace detail {

// Draws `count` points uniformly from the ball, redrawing any that miss the
// smooth set, and returns their gradients.
template <Objective F>
std::vector<Vector> sampled_gradients(const F& f, const Vector& x, double radius,
                                      std::size_t count, RngStream& rng) {
  constexpr std::size_t kMaxRedraws = 1000000;
  std::vector<Vector> grads;
  grads.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector y = sample_uniform_ball_point(x, radius, rng);
    for (std::size_t a = 0; !f.in_smooth_set(y); ++a) {
      if (a >= kMaxRedraws)
        throw std::runtime_error("could not sample a point of differentiability");
      y = sample_uniform_ball_point(x, radius, rng);
    }
    grads.push_back(checked_grad(f, y));
  }
  return grads;
}

}  // namespace detail

//! Estimate of the criticality measure rho_eps(x) = dist(0 | G_eps(x)): the
//! norm of the min-norm point of the hull of gradients at n_samples uniform
//! draws from the eps-ball. Biased upward; draws outside the smooth set are
//! redrawn.
template <Objective F>
double rho_estimate(const F& f, const Vector& x, double eps, std::size_t n_samples,
                    RngStream& rng) {
  if (!(eps > 0)) throw std::invalid_argument("rho_estimate: eps must be positive");
  if (n_samples < f.dim() + 1)
    throw std::invalid_argument("rho_estimate: n_samples must be at least n+1");
  return min_norm_point(Polytope(detail::sampled_gradients(f, x, eps, n_samples, rng))).norm;
}

//! Pointedness of cone(W): the hull of the normalized generators stays away
//! from the origin by more than tol.
inline bool pointedness_check(const std::vector<Vector>& W, double tol = 1e-9) {
  if (W.empty()) throw std::invalid_argument("pointedness_check: no generators");
  std::vector<Vector> unit;
  unit.reserve(W.size());
  for (const auto& w : W) {
    const double nw = w.norm();
    if (nw == 0) throw std::invalid_argument("pointedness_check: zero generator");
    unit.push_back(w / nw);
  }
  return min_norm_point(Polytope(std::move(unit))).norm > tol;
}

//! Membership of z in the interior of the polar of cone(W): <z, w/|w|> < -margin
//! for every generator. With margin 0 this is strict negativity. Empty W gives
//! the trivial cone whose polar is everything.
inline bool polar_interior_member(const Vector& z, const std::vector<Vector>& W,
                                  double margin = 0.0) {
  for (const auto& w : W)
    if (!(z.dot(w) / w.norm() < -margin)) return false;
  return true;
}

enum class DegeneracyClass {
  StationaryClarke,
  NondegenerateDescent,
  DegenerateDirection,
  EmptySubdifferential,
};

inline std::string_view to_string(DegeneracyClass c) {
  switch (c) {
    case DegeneracyClass::StationaryClarke: return "StationaryClarke";
    case DegeneracyClass::NondegenerateDescent: return "NondegenerateDescent";
    case DegeneracyClass::DegenerateDirection: return "DegenerateDirection";
    case DegeneracyClass::EmptySubdifferential: return "EmptySubdifferential";
  }
  return "?";
}

struct DegeneracyReport {
  bool subdiff_empty = false;
  bool contains_zero = false;
  Vector proj;  // empty when subdiff_empty
  bool neg_proj_interior = false;
  DegeneracyClass classification = DegeneracyClass::EmptySubdifferential;
};

//! Checks the three nondegeneracy conditions at a point described by an
//! analytic model: nonempty subdifferential, 0 outside it, and the negated
//! projection of 0 inside the interior of the horizon polar.
inline DegeneracyReport degeneracy_report(const SubdifferentialModel& M,
                                          double tol = kDefaultMinNormTol) {
  DegeneracyReport rep;
  const auto r = min_norm_generalized(M, tol);
  if (!r) {
    rep.subdiff_empty = true;
    rep.classification = DegeneracyClass::EmptySubdifferential;
    return rep;
  }
  rep.proj = r->point;
  rep.contains_zero = r->norm <= tol;
  // Rounding in the projection is O(tol |proj|); treat that as the boundary.
  const double margin = tol * std::max(1.0, r->norm);
  rep.neg_proj_interior = polar_interior_member(Vector(-r->point), M.cone_generators, margin);
  if (rep.contains_zero)
    rep.classification = DegeneracyClass::StationaryClarke;
  else if (rep.neg_proj_interior)
    rep.classification = DegeneracyClass::NondegenerateDescent;
  else
    rep.classification = DegeneracyClass::DegenerateDirection;
  return rep;
}

struct HullSummary {
  Vector coord_min;
  Vector coord_max;
};

struct ApproxRow {
  double delta = 0;
  MinNormResult min_norm;
  HullSummary hull;
};

//! For each radius in `deltas`, the min-norm point and coordinate ranges of
//! the hull of gradients sampled from the delta-ball around x. Row i draws
//! from RngStream(seed, i).
template <Objective F>
std::vector<ApproxRow> subdiff_approx_experiment(const F& f, const Vector& x,
                                                 const std::vector<double>& deltas,
                                                 std::size_t n_samples, std::uint64_t seed) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0)) throw std::invalid_argument("deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument("deltas must be strictly decreasing");
  }
  if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");

  std::vector<ApproxRow> rows;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    RngStream rng(seed, i);
    auto grads = detail::sampled_gradients(f, x, deltas[i], n_samples, rng);
    ApproxRow row;
    row.delta = deltas[i];
    row.hull.coord_min = grads.front();
    row.hull.coord_max = grads.front();
    for (const auto& g : grads) {
      row.hull.coord_min = row.hull.coord_min.cwiseMin(g);
      row.hull.coord_max = row.hull.coord_max.cwiseMax(g);
    }
    row.min_norm = min_norm_point(Polytope(std::move(grads)));
    rows.push_back(std::move(row));
  }
  return rows;
}

enum class Outcome {
  A_TerminatedStationary,
  B_Diverging,
  C_StalledTarget,
  D_TargetToZero,
  Inconclusive,
};

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::A_TerminatedStationary: return "A_TerminatedStationary";
    case Outcome::B_Diverging: return "B_Diverging";
    case Outcome::C_StalledTarget: return "C_StalledTarget";
    case Outcome::D_TargetToZero: return "D_TargetToZero";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "?";
}

//! Thresholds for mapping a finite run onto the asymptotic outcomes.
struct ClassifierConfig {
  std::size_t window = 200;
  double displacement_tol = 1e-8;
  double nu_floor = 1e-8;
  std::size_t min_reductions = 10;
};

//! Heuristic finite-run outcome. A: stationarity test fired. B: divergence
//! floor hit. D: nu driven below nu_floor by at least min_reductions
//! reductions. C: nu frozen over the last `window` records while |g| stayed
//! at or above it and the iterates barely moved.
inline Outcome classify_outcome(const RunTrace& trace, const ClassifierConfig& cfg = {}) {
  if (trace.status == TerminationStatus::GradientZero ||
      trace.status == TerminationStatus::ToleranceMet)
    return Outcome::A_TerminatedStationary;
  if (trace.status == TerminationStatus::ObjectiveDiverging) return Outcome::B_Diverging;

  const auto& recs = trace.records;
  if (recs.empty()) return Outcome::Inconclusive;

  std::size_t reductions = 0;
  double min_nu = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    if (r.step_kind == StepKind::Reduction) ++reductions;
    min_nu = std::min(min_nu, r.nu_k);
  }
  if (reductions >= cfg.min_reductions && min_nu < cfg.nu_floor)
    return Outcome::D_TargetToZero;

  if (recs.size() >= cfg.window && cfg.window > 0) {
    const std::size_t begin = recs.size() - cfg.window;
    const double nu_bar = recs[begin].nu_k;
    bool stalled = true;
    double displacement = 0;
    for (std::size_t i = begin; i < recs.size(); ++i) {
      if (recs[i].nu_k != nu_bar || recs[i].step_kind == StepKind::Reduction ||
          recs[i].g_norm < nu_bar) {
        stalled = false;
        break;
      }
      const Vector& next_x = i + 1 < recs.size() ? recs[i + 1].x : trace.final_x;
      displacement += (next_x - recs[i].x).norm();
    }
    if (stalled && nu_bar > 0 && displacement < cfg.displacement_tol)
      return Outcome::C_StalledTarget;
  }
  return Outcome::Inconclusive;
}

}  // namespace gsample
