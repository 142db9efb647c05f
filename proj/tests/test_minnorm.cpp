#include "gsample/minnorm.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gsample;
using gsample::testing::brute_force_min_norm;
using gsample::testing::random_points;

namespace {

void expect_certificates(const MinNormResult& r, const std::vector<Vector>& V,
                         const std::vector<Vector>& W = {}) {
  const Vector& g = r.point;
  for (const auto& v : V) EXPECT_GE(g.dot(v - g), -1e-9 * (1 + g.squaredNorm()));
  for (const auto& w : W) EXPECT_GE(g.dot(w), -1e-9);

  ASSERT_EQ(r.simplex_coeffs.size(), static_cast<Eigen::Index>(V.size()));
  ASSERT_EQ(r.cone_coeffs.size(), static_cast<Eigen::Index>(W.size()));
  EXPECT_NEAR(r.simplex_coeffs.sum(), 1.0, 1e-12);
  EXPECT_GE(r.simplex_coeffs.minCoeff(), 0.0);
  if (!W.empty()) {
    EXPECT_GE(r.cone_coeffs.minCoeff(), 0.0);
  }

  Vector rebuilt = Vector::Zero(g.size());
  for (std::size_t i = 0; i < V.size(); ++i)
    rebuilt += r.simplex_coeffs(static_cast<Eigen::Index>(i)) * V[i];
  for (std::size_t j = 0; j < W.size(); ++j)
    rebuilt += r.cone_coeffs(static_cast<Eigen::Index>(j)) * W[j];
  EXPECT_LE((rebuilt - g).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_DOUBLE_EQ(r.norm, g.norm());
}

}  // namespace

TEST(MinNormPoint, SingleVertex) {
  const auto r = min_norm_point(Polytope({vec({2, 1})}));
  EXPECT_EQ(r.point, vec({2, 1}));
  EXPECT_DOUBLE_EQ(r.norm, std::sqrt(5.0));
}

TEST(MinNormPoint, SymmetricPairContainsOrigin) {
  const auto r = min_norm_point(Polytope({vec({1, 0}), vec({-1, 0})}));
  EXPECT_EQ(r.norm, 0.0);
  EXPECT_EQ(r.point, vec({0, 0}));
}

TEST(MinNormPoint, SegmentMatchesFineGrid) {
  const Vector a = vec({3, 0}), b = vec({0, 4});
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000000; ++i) {
    const double t = i * 1e-6;
    best = std::min(best, ((1 - t) * a + t * b).norm());
  }
  const auto r = min_norm_point(Polytope({a, b}));
  EXPECT_NEAR(r.norm, best, 1e-6);
  EXPECT_NEAR(r.norm, 2.4, 1e-12);
  EXPECT_NEAR(r.point(0), 1.92, 1e-12);
  EXPECT_NEAR(r.point(1), 1.44, 1e-12);
  expect_certificates(r, {a, b});
}

TEST(MinNormPoint, DuplicateVerticesAllowed) {
  const std::vector<Vector> V{vec({3, 0}), vec({0, 4}), vec({3, 0}), vec({0, 4})};
  const auto r = min_norm_point(Polytope(V));
  EXPECT_NEAR(r.norm, 2.4, 1e-12);
  expect_certificates(r, V);
}

TEST(MinNormPoint, NonPositiveToleranceRejected) {
  const Polytope P({vec({1})});
  EXPECT_THROW(min_norm_point(P, 0.0), std::invalid_argument);
  EXPECT_THROW(min_norm_point(P, -1.0), std::invalid_argument);
}

TEST(MinNormPoint, InvalidPolytopesRejected) {
  EXPECT_THROW(Polytope({}), std::invalid_argument);
  EXPECT_THROW(Polytope({vec({1, 2}), vec({1})}), std::invalid_argument);
  EXPECT_THROW(Polytope({vec({std::nan("")})}), std::invalid_argument);
}

TEST(MinNormPoint, Deterministic) {
  std::mt19937_64 gen(3);
  const auto V = random_points(gen, 3, 5);
  const auto a = min_norm_point(Polytope(V));
  const auto b = min_norm_point(Polytope(V));
  EXPECT_EQ(a.point, b.point);
  EXPECT_EQ(a.simplex_coeffs, b.simplex_coeffs);
}

TEST(MinNormPoint, MatchesFaceEnumerationOracle) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const std::size_t k = 1 + (trial / 3) % 5;
    const auto V = random_points(gen, n, k);
    const auto r = min_norm_point(Polytope(V));
    EXPECT_NEAR(r.norm, brute_force_min_norm(V), 1e-9) << "trial " << trial;
    expect_certificates(r, V);
  }
}

TEST(MinNormPoint, LargerCloudsCertify) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 9;
    auto V = random_points(gen, n, 2 * n + 1);
    for (auto& v : V) v.array() += 0.3;  // keep 0 outside most of the time
    const auto r = min_norm_point(Polytope(V));
    expect_certificates(r, V);
  }
}

TEST(MinNormPoint, DualityIdentity) {
  std::mt19937_64 gen(99);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto V = random_points(gen, 2 + trial % 2, 1 + trial % 5);
    const auto r = min_norm_point(Polytope(V));
    if (r.norm <= 1e-6) continue;
    const auto d = steepest_descent_direction(SubdifferentialModel{V, {}});
    ASSERT_TRUE(std::holds_alternative<Vector>(d));
    EXPECT_NEAR(support_function(Polytope(V), std::get<Vector>(d)), -r.norm, 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(MinNormGeneralized, ProjectionOntoShiftedNegativeOrthant) {
  const std::vector<Vector> W{vec({-1, 0}), vec({0, -1})};
  const auto a = min_norm_generalized({{vec({-1, 0.5})}, W});
  ASSERT_TRUE(a);
  EXPECT_NEAR((a->point - vec({-1, 0})).norm(), 0, 1e-12);
  expect_certificates(*a, {vec({-1, 0.5})}, W);

  const auto b = min_norm_generalized({{vec({-1, -0.5})}, W});
  ASSERT_TRUE(b);
  EXPECT_NEAR((b->point - vec({-1, -0.5})).norm(), 0, 1e-12);
  expect_certificates(*b, {vec({-1, -0.5})}, W);
}

TEST(MinNormGeneralized, EmptyVertexSetIsInfeasible) {
  EXPECT_FALSE(min_norm_generalized({{}, {vec({1, 0})}}));
  EXPECT_TRUE(std::holds_alternative<Infeasible>(
      steepest_descent_direction({{}, {vec({1, 0})}})));
}

TEST(MinNormGeneralized, ZeroGeneratorRejected) {
  EXPECT_THROW(min_norm_generalized({{vec({1, 0})}, {vec({0, 0})}}), std::invalid_argument);
}

TEST(MinNormGeneralized, UnscaledRaysKeepCertificates) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const auto V = random_points(gen, n, 1 + trial % 4);
    auto W = random_points(gen, n, 1 + trial % 3);
    for (auto& w : W) w *= scale(gen);
    const auto r = min_norm_generalized({V, W});
    ASSERT_TRUE(r);
    expect_certificates(*r, V, W);
  }
}

TEST(SupportFunction, Examples) {
  EXPECT_EQ(support_function(Polytope({vec({1, 0}), vec({0, 1})}), vec({1, 1})), 1.0);
  EXPECT_EQ(support_function(Polytope({vec({2, -3})}), vec({0.5, 2})), 1.0 - 6.0);
  EXPECT_NEAR(support_function(Polytope({vec({3, 0}), vec({0, 4})}), -vec({1.92, 1.44}) / 2.4),
              -2.4, 1e-12);
  EXPECT_THROW(support_function(Polytope({vec({1, 0})}), vec({1})), std::invalid_argument);
}

TEST(SteepestDescent, Examples) {
  const auto smooth = steepest_descent_direction({{vec({2, 0})}, {}});
  ASSERT_TRUE(std::holds_alternative<Vector>(smooth));
  EXPECT_EQ(std::get<Vector>(smooth), vec({-1, 0}));

  EXPECT_TRUE(std::holds_alternative<AtStationary>(
      steepest_descent_direction({{vec({1, 0}), vec({-1, 0})}, {}})));

  const auto tilted = steepest_descent_direction({{vec({-1, 0.5})}, {vec({-1, 0}), vec({0, -1})}});
  ASSERT_TRUE(std::holds_alternative<Vector>(tilted));
  EXPECT_NEAR((std::get<Vector>(tilted) - vec({1, 0})).norm(), 0, 1e-12);
}
