#pragma once

#include "gsample/core.hpp"
#include "gsample/minnorm.hpp"
#include "gsample/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsample {

enum class LipschitzClass { LocallyLipschitz, DirectionallyLipschitzOnly };

inline std::string_view to_string(LipschitzClass c) {
  return c == LipschitzClass::LocallyLipschitz ? "LocallyLipschitz"
                                               : "DirectionallyLipschitzOnly";
}

//! A point with an analytic model of the Clarke subdifferential there.
struct KnownPoint {
  Vector x;
  SubdifferentialModel model;
  std::string note;
};

//! Objective with analytic gradients, an exact smooth-set predicate, and
//! ground-truth subdifferential models at selected points.
class TestFunction {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using SmoothFn = std::function<bool(const Vector&)>;

  TestFunction(std::string name, std::size_t n, LipschitzClass lipschitz_class, EvalFn eval,
               GradFn grad, SmoothFn smooth)
      : name_(std::move(name)),
        n_(n),
        class_(lipschitz_class),
        eval_(std::move(eval)),
        grad_(std::move(grad)),
        smooth_(std::move(smooth)) {}

  std::size_t dim() const { return n_; }
  double eval(const Vector& x) const {
    check_dim(x);
    return eval_(x);
  }
  Vector grad(const Vector& x) const {
    check_dim(x);
    return grad_(x);
  }
  bool in_smooth_set(const Vector& x) const {
    check_dim(x);
    return smooth_(x);
  }

  const std::string& name() const { return name_; }
  LipschitzClass lipschitz_class() const { return class_; }
  const std::vector<KnownPoint>& known_points() const { return known_points_; }
  const std::vector<Vector>& known_minimizers() const { return known_minimizers_; }

  TestFunction& add_known_point(Vector x, SubdifferentialModel model, std::string note) {
    if (static_cast<std::size_t>(x.size()) != n_)
      throw std::invalid_argument("known point has wrong dimension");
    model.validate(n_);
    known_points_.push_back({std::move(x), std::move(model), std::move(note)});
    return *this;
  }
  TestFunction& add_known_minimizer(Vector x) {
    if (static_cast<std::size_t>(x.size()) != n_)
      throw std::invalid_argument("known minimizer has wrong dimension");
    known_minimizers_.push_back(std::move(x));
    return *this;
  }

  //! The known point equal to x, or nullptr.
  const KnownPoint* find_known_point(const Vector& x) const {
    for (const auto& kp : known_points_)
      if (kp.x.size() == x.size() && kp.x == x) return &kp;
    return nullptr;
  }

 private:
  void check_dim(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != n_)
      throw std::invalid_argument(name_ + ": expected a point of dimension " +
                                  std::to_string(n_) + ", got " + std::to_string(x.size()));
  }

  std::string name_;
  std::size_t n_;
  LipschitzClass class_;
  EvalFn eval_;
  GradFn grad_;
  SmoothFn smooth_;
  std::vector<KnownPoint> known_points_;
  std::vector<Vector> known_minimizers_;
};

//! Shortest round-trip decimal form, used in function names.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

//==============================================================================
// Constructors

//! x^{1/3} - eta for x <= 0, x^{1/3} + eta for x > 0. Not Lipschitz at 0;
//! discontinuous there unless eta = 0.
inline TestFunction make_cube_root(double eta) {
  if (!(eta >= 0)) throw std::invalid_argument("cube_root: eta must be >= 0");
  auto cube_root = [](double x) { return x < 0 ? -std::cbrt(-x) : std::cbrt(x); };
  TestFunction f(
      "cube_root:eta=" + format_number(eta), 1, LipschitzClass::DirectionallyLipschitzOnly,
      [=](const Vector& x) { return cube_root(x(0)) + (x(0) <= 0 ? -eta : eta); },
      [=](const Vector& x) {
        const double r = std::cbrt(std::abs(x(0)));
        return vec({1.0 / (3.0 * r * r)});
      },
      [](const Vector& x) { return x(0) != 0; });
  // Gradients blow up to +inf on both sides: no finite subgradient, horizon +1.
  f.add_known_point(vec({0.0}), {{}, {vec({1.0})}}, "gradient blow-up; empty model");
  return f;
}

//! <y, x> + dist(x | R^2_+)^{1/2} with y = (-1, beta). Smooth off the
//! boundary of the nonnegative orthant.
inline TestFunction make_tilted_root_distance(double beta) {
  const Vector y = vec({-1.0, beta});
  TestFunction f(
      "tilted_root:beta=" + format_number(beta), 2,
      LipschitzClass::DirectionallyLipschitzOnly,
      [=](const Vector& x) {
        const Vector p = x.cwiseMax(0.0);
        return y.dot(x) + std::sqrt((x - p).norm());
      },
      [=](const Vector& x) -> Vector {
        const Vector p = x.cwiseMax(0.0);
        const double d = (x - p).norm();
        if (d == 0) return y;
        return y + (x - p) / (2.0 * d * std::sqrt(d));
      },
      [](const Vector& x) {
        const bool on_boundary = x(0) >= 0 && x(1) >= 0 && (x(0) == 0 || x(1) == 0);
        return !on_boundary;
      });
  f.add_known_point(vec({0.0, 0.0}), {{y}, {vec({-1.0, 0.0}), vec({0.0, -1.0})}},
                    "subdifferential y + R^2_-; degenerate iff beta >= 0");
  return f;
}

//! |x_1| + ... + |x_n|.
inline TestFunction make_abs_sum(std::size_t n) {
  if (n < 1) throw std::invalid_argument("abs_sum: n must be >= 1");
  TestFunction f(
      "abs_sum:" + std::to_string(n), n, LipschitzClass::LocallyLipschitz,
      [](const Vector& x) { return x.cwiseAbs().sum(); },
      [](const Vector& x) -> Vector {
        return x.unaryExpr([](double v) { return v > 0 ? 1.0 : -1.0; });
      },
      [](const Vector& x) { return (x.array() != 0.0).all(); });
  if (n <= 10) {
    std::vector<Vector> corners;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Vector c(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i)
        c(static_cast<Eigen::Index>(i)) = (mask >> i) & 1 ? 1.0 : -1.0;
      corners.push_back(std::move(c));
    }
    f.add_known_point(Vector::Zero(static_cast<Eigen::Index>(n)), {std::move(corners), {}},
                      "subdifferential [-1,1]^n");
  }
  f.add_known_minimizer(Vector::Zero(static_cast<Eigen::Index>(n)));
  return f;
}

struct Quadratic {
  Eigen::MatrixXd A;  // symmetric
  Vector b;
  double c = 0;

  double operator()(const Vector& x) const { return 0.5 * x.dot(A * x) + b.dot(x) + c; }
  Vector gradient(const Vector& x) const { return A * x + b; }
};

//! max_i (1/2 x'A_i x + b_i'x + c_i). Smooth where a single piece is active.
inline TestFunction make_max_quadratics(std::vector<Quadratic> pieces, std::string name = "max_quad",
                                        std::vector<Vector> minimizers = {}) {
  if (pieces.empty()) throw std::invalid_argument("max_quad: no pieces");
  const auto n = static_cast<std::size_t>(pieces.front().b.size());
  for (const auto& q : pieces)
    if (static_cast<std::size_t>(q.b.size()) != n || q.A.rows() != q.A.cols() ||
        static_cast<std::size_t>(q.A.rows()) != n)
      throw std::invalid_argument("max_quad: inconsistent piece dimensions");

  auto active = [pieces](const Vector& x) {
    std::size_t best = 0;
    double best_val = pieces[0](x);
    bool tie = false;
    for (std::size_t i = 1; i < pieces.size(); ++i) {
      const double v = pieces[i](x);
      if (v > best_val) {
        best = i;
        best_val = v;
        tie = false;
      } else if (v == best_val) {
        tie = true;
      }
    }
    return std::pair{best, tie};
  };
  TestFunction f(
      std::move(name), n, LipschitzClass::LocallyLipschitz,
      [pieces](const Vector& x) {
        double v = pieces[0](x);
        for (std::size_t i = 1; i < pieces.size(); ++i) v = std::max(v, pieces[i](x));
        return v;
      },
      [pieces, active](const Vector& x) { return pieces[active(x).first].gradient(x); },
      [active](const Vector& x) { return !active(x).second; });
  for (auto& m : minimizers) f.add_known_minimizer(std::move(m));
  return f;
}

//! Seeded family with convex pieces A_i = M_i M_i' + I, c_i = 0, and b_i
//! centered so that 0 lies in conv{b_i}. The origin is then the global
//! minimizer and a kink where all pieces are active.
inline TestFunction make_max_quadratics(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw std::invalid_argument("max_quad: n and k must be >= 1");
  RngStream rng(seed, 0);
  auto u = [&] { return 2.0 * rng.uniform() - 1.0; };
  std::vector<Quadratic> pieces(k);
  const auto N = static_cast<Eigen::Index>(n);
  Vector mean = Vector::Zero(N);
  for (auto& q : pieces) {
    Eigen::MatrixXd M(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) M(i, j) = u();
    q.A = M * M.transpose() + Eigen::MatrixXd::Identity(N, N);
    q.b = Vector(N);
    for (Eigen::Index i = 0; i < N; ++i) q.b(i) = u();
    mean += q.b;
  }
  mean /= static_cast<double>(k);
  std::vector<Vector> bs;
  for (auto& q : pieces) {
    q.b -= mean;
    bs.push_back(q.b);
  }
  auto f = make_max_quadratics(std::move(pieces),
                               "max_quad:n=" + std::to_string(n) + ",k=" + std::to_string(k) +
                                   ",seed=" + std::to_string(seed),
                               {Vector::Zero(N)});
  if (k >= 2) f.add_known_point(Vector::Zero(N), {std::move(bs), {}}, "all pieces active");
  return f;
}

//! 8|x_1^2 - x_2| + (1 - x_1)^2.
inline TestFunction make_nonsmooth_rosenbrock() {
  TestFunction f(
      "nonsmooth_rosenbrock", 2, LipschitzClass::LocallyLipschitz,
      [](const Vector& x) {
        return 8.0 * std::abs(x(0) * x(0) - x(1)) + (1.0 - x(0)) * (1.0 - x(0));
      },
      [](const Vector& x) {
        const double s = x(0) * x(0) - x(1) > 0 ? 1.0 : -1.0;
        return vec({16.0 * s * x(0) - 2.0 * (1.0 - x(0)), -8.0 * s});
      },
      [](const Vector& x) { return x(1) != x(0) * x(0); });
  f.add_known_point(vec({1.0, 1.0}), {{vec({16.0, -8.0}), vec({-16.0, 8.0})}, {}},
                    "minimizer on the kink parabola");
  f.add_known_minimizer(vec({1.0, 1.0}));
  return f;
}

//! sqrt(max(0, -x)) + (x - 1)^2 in one variable. Non-Lipschitz kink at 0,
//! minimizer at 1.
inline TestFunction make_root_ridge() {
  TestFunction f(
      "root_ridge", 1, LipschitzClass::DirectionallyLipschitzOnly,
      [](const Vector& x) {
        return std::sqrt(std::max(0.0, -x(0))) + (x(0) - 1.0) * (x(0) - 1.0);
      },
      [](const Vector& x) {
        const double smooth_part = 2.0 * (x(0) - 1.0);
        if (x(0) < 0) return vec({-1.0 / (2.0 * std::sqrt(-x(0))) + smooth_part});
        return vec({smooth_part});
      },
      [](const Vector& x) { return x(0) != 0; });
  f.add_known_point(vec({0.0}), {{vec({-2.0})}, {vec({-1.0})}},
                    "subdifferential (-inf, -2], horizon cone R_-");
  f.add_known_minimizer(vec({1.0}));
  return f;
}

//==============================================================================
// Registry

namespace detail {

struct FnSpec {
  std::string name;
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;
};

inline FnSpec parse_fn_spec(const std::string& text) {
  FnSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (item.empty()) throw std::invalid_argument("empty argument in function name: " + text);
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      spec.positional.push_back(item);
    else
      spec.named[item.substr(0, eq)] = item.substr(eq + 1);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return spec;
}

inline double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("bad number for " + what + ": " + s);
  return v;
}

inline std::uint64_t to_uint(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-')
    throw std::invalid_argument("bad integer for " + what + ": " + s);
  return v;
}

}  // namespace detail

//! Names accepted by make_test_function, with their argument syntax.
inline std::vector<std::string> test_function_names() {
  return {"abs_sum:<n>",       "cube_root:eta=<eta>", "tilted_root:beta=<beta>",
          "nonsmooth_rosenbrock", "root_ridge",       "max_quad:n=<n>,k=<k>,seed=<s>"};
}

//! Builds a test function from a registry string such as "abs_sum:2",
//! "tilted_root:beta=0.5" or "max_quad:n=2,k=3,seed=1".
inline TestFunction make_test_function(const std::string& text) {
  const auto spec = detail::parse_fn_spec(text);
  auto arg = [&](const std::string& key, std::size_t position) -> const std::string* {
    if (auto it = spec.named.find(key); it != spec.named.end()) return &it->second;
    if (position < spec.positional.size()) return &spec.positional[position];
    return nullptr;
  };
  auto allow = [&](std::initializer_list<std::string> keys, std::size_t max_positional) {
    for (const auto& [k, v] : spec.named)
      if (std::find(keys.begin(), keys.end(), k) == keys.end())
        throw std::invalid_argument("unknown argument '" + k + "' for " + spec.name);
    if (spec.positional.size() > max_positional)
      throw std::invalid_argument("too many arguments for " + spec.name);
  };

  if (spec.name == "abs_sum") {
    allow({"n"}, 1);
    const auto* n = arg("n", 0);
    if (!n) throw std::invalid_argument("abs_sum needs a dimension, e.g. abs_sum:2");
    return make_abs_sum(detail::to_uint(*n, "n"));
  }
  if (spec.name == "cube_root") {
    allow({"eta"}, 1);
    const auto* eta = arg("eta", 0);
    return make_cube_root(eta ? detail::to_double(*eta, "eta") : 0.0);
  }
  if (spec.name == "tilted_root" || spec.name == "tilted_root_distance") {
    allow({"beta"}, 1);
    const auto* beta = arg("beta", 0);
    return make_tilted_root_distance(beta ? detail::to_double(*beta, "beta") : 0.0);
  }
  if (spec.name == "nonsmooth_rosenbrock" || spec.name == "rosenbrock_ns") {
    allow({}, 0);
    return make_nonsmooth_rosenbrock();
  }
  if (spec.name == "root_ridge") {
    allow({}, 0);
    return make_root_ridge();
  }
  if (spec.name == "max_quad" || spec.name == "max_quadratics") {
    allow({"n", "k", "seed"}, 0);
    const auto* n = arg("n", 99);
    const auto* k = arg("k", 99);
    const auto* seed = arg("seed", 99);
    return make_max_quadratics(n ? detail::to_uint(*n, "n") : 2, k ? detail::to_uint(*k, "k") : 3,
                               seed ? detail::to_uint(*seed, "seed") : 0);
  }
  std::string known;
  for (const auto& s : test_function_names()) known += " " + s;
  throw std::invalid_argument("unknown function '" + spec.name + "'; available:" + known);
}

}  // namespace gsample
