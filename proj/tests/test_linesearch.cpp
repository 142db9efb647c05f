#include "gsample/linesearch.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gsample;
using gsample::testing::half_sq_norm;
using gsample::testing::linear_1d;
using gsample::testing::square_1d;

TEST(Armijo, LinearAcceptsFullStep) {
  const auto t = armijo_backtrack(linear_1d(), vec({0}), vec({-1}), 1.0, 0.5, 0.5, 60);
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, 1.0);
}

TEST(Armijo, QuadraticBacktracksToEighth) {
  const auto t = armijo_backtrack(square_1d(), vec({1}), vec({-1}), 2.0, 0.9, 0.5, 60);
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, 0.125);
}

TEST(Armijo, AbsoluteValueBacktracksToQuarter) {
  const auto t = armijo_backtrack(make_abs_sum(1), vec({0.3}), vec({-1}), 1.0, 0.5, 0.5, 60);
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, 0.25);
}

TEST(Armijo, FailsWhenNoGridPointDecreases) {
  // Ascent direction: no step decreases f.
  EXPECT_FALSE(armijo_backtrack(linear_1d(), vec({0}), vec({1}), 1.0, 0.5, 0.5, 10));
}

TEST(Armijo, MaximalAndStrict) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-3, 3), ub(0.01, 0.99), ug(0.1, 0.9);
  const auto f = make_abs_sum(2);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Vector x = vec({u(gen), u(gen)});
    if (!f.in_smooth_set(x)) continue;
    const Vector g = f.grad(x);
    const Vector d = -g / g.norm();
    const double beta = ub(gen), gamma = ug(gen);
    const double fx = f.eval(x);
    const auto t = armijo_backtrack(f, x, d, g.norm(), beta, gamma, 80);
    if (!t) continue;
    EXPECT_LT(f.eval(Vector(x + *t * d)), fx - beta * *t * g.norm());
    if (*t < 1.0) {
      const double bigger = *t / gamma;
      EXPECT_FALSE(f.eval(Vector(x + bigger * d)) < fx - beta * bigger * g.norm())
          << "trial " << trial;
    }
    ++checked;
  }
  EXPECT_GT(checked, 1500);
}

TEST(Armijo, StepsizeFloorOnQuadratic) {
  // f = 1/2 |x|^2 at (1,0); the direction comes from gradients sampled in the
  // 0.3-ball, which is what the solver feeds the line search.
  const auto f = half_sq_norm(2);
  const Vector x = vec({1, 0});
  const double eps = 0.3, gamma = 0.5, beta = 1e-4;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(seed, 0);
    const auto cloud = build_cloud(f, x, eps, 4, rng);
    ASSERT_TRUE(cloud);
    const auto g = min_norm_point(Polytope(cloud->gradients)).point;
    const auto t = armijo_backtrack(f, x, Vector(-g / g.norm()), g.norm(), beta, gamma, 60);
    ASSERT_TRUE(t);
    EXPECT_GE(*t, std::min(1.0, gamma * eps / 3)) << "seed " << seed;
  }
}

TEST(Perturb, SmoothCandidateReturnedVerbatim) {
  RngStream rng(0, 0);
  const auto f = make_abs_sum(1);
  const auto y = perturb_if_nondifferentiable(f, vec({0.3}), vec({0.05}), 0.25, 0.1, 1.0, 0.5,
                                              rng, 100);
  ASSERT_TRUE(y);
  EXPECT_EQ(*y, vec({0.05}));
}

TEST(Perturb, KinkCandidateMovedWithinBound) {
  const auto f = make_abs_sum(1);
  const Vector x_old = vec({0.5});
  const double t = 0.5, eps = 0.1, g_norm = 1.0, beta = 1e-4;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed, 0);
    const auto y = perturb_if_nondifferentiable(f, x_old, vec({0}), t, eps, g_norm, beta, rng, 100);
    ASSERT_TRUE(y);
    EXPECT_TRUE(f.in_smooth_set(*y));
    EXPECT_LE(std::abs((*y)(0)), std::min(t, eps));
    EXPECT_LT(f.eval(*y), f.eval(x_old) - beta * t * g_norm);
  }
}

TEST(Perturb, ZeroBudgetFails) {
  RngStream rng(0, 0);
  EXPECT_FALSE(perturb_if_nondifferentiable(make_abs_sum(1), vec({0.5}), vec({0}), 0.5, 0.1, 1.0,
                                            1e-4, rng, 0));
}
