#pragma once

#include "gsample/core.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace gsample {

//! Reproducible random stream keyed by (seed, stream_id). The solver uses one
//! stream per iteration index. Normal deviates are produced here from raw
//! engine bits so sequences do not depend on the standard library vendor.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(mix(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  //! Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0) return u;
    }
  }

  //! Standard normal via Box-Muller.
  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    return r * std::cos(phi);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

//! One point uniform in the closed ball of `radius` around `center`.
inline Vector sample_uniform_ball_point(const Vector& center, double radius, RngStream& rng) {
  const auto n = center.size();
  if (radius == 0) return center;
  Vector dir(n);
  double norm = 0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) dir(i) = rng.normal();
    norm = dir.norm();
  } while (norm == 0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  Vector offset = dir * (r / norm);
  Vector y = center + offset;
  // Rounding in center + offset can push |y - center| a hair past radius.
  while ((y - center).norm() > radius) {
    offset *= 1.0 - 0x1.0p-50;
    y = center + offset;
  }
  return y;
}

//! `count` independent points uniform in the closed ball of `radius`.
inline std::vector<Vector> sample_uniform_ball(const Vector& center, double radius,
                                               std::size_t count, RngStream& rng) {
  if (!(radius >= 0)) throw std::invalid_argument("sample radius must be >= 0");
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(sample_uniform_ball_point(center, radius, rng));
  return out;
}

//! Sampled gradients around x. gradients.front() is the gradient at x.
struct GradientCloud {
  Vector center;
  double radius = 0;
  std::vector<Vector> sample_points;
  std::vector<Vector> gradients;
};

//! Samples m points from the eps-ball around x and collects gradients.
//! std::nullopt means a sample fell outside the smooth set. In
//! strict mode (max_redraws == 0) any sample outside the smooth set ends the
//! build; otherwise each bad point is redrawn up to max_redraws times.
template <Objective F>
std::optional<GradientCloud> build_cloud(const F& f, const Vector& x, double eps,
                                         std::size_t m, RngStream& rng,
                                         std::size_t max_redraws = 0) {
  if (!(eps >= 0)) throw std::invalid_argument("build_cloud: eps must be >= 0");
  if (!f.in_smooth_set(x))
    throw std::invalid_argument("build_cloud: center is not in the smooth set");

  GradientCloud cloud;
  cloud.center = x;
  cloud.radius = eps;
  cloud.sample_points.reserve(m);
  cloud.gradients.reserve(m + 1);
  cloud.gradients.push_back(checked_grad(f, x));
  for (std::size_t i = 0; i < m; ++i) {
    Vector y = sample_uniform_ball_point(x, eps, rng);
    for (std::size_t attempt = 0; !f.in_smooth_set(y); ++attempt) {
      if (attempt >= max_redraws) return std::nullopt;
      y = sample_uniform_ball_point(x, eps, rng);
    }
    cloud.gradients.push_back(checked_grad(f, y));
    cloud.sample_points.push_back(std::move(y));
  }
  return cloud;
}

}  // namespace gsample
