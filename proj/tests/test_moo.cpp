#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ecc/errors.hpp"
#include "ecc/moo.hpp"

using namespace ecc;
using moo::GradientBundle;

namespace {

double norm2(const std::vector<double>& v) { return moo::dot(v, v); }

GradientBundle random_bundle(std::mt19937_64& rng, std::size_t p, std::size_t d) {
  std::normal_distribution<double> g;
  GradientBundle b;
  b.grads.assign(p, std::vector<double>(d));
  for (auto& v : b.grads) {
    for (auto& x : v) x = g(rng);
  }
  return b;
}

}  // namespace

TEST(MinNorm, OrthonormalPair) {
  GradientBundle b{{{1, 0}, {0, 1}}};
  auto r = moo::solve_min_norm(b);
  EXPECT_NEAR(r.alpha[0], 0.5, 1e-15);
  EXPECT_NEAR(r.combined[0], 0.5, 1e-15);
  EXPECT_NEAR(r.combined[1], 0.5, 1e-15);
  EXPECT_NEAR(r.squared_norm, 0.5, 1e-15);
  auto grid = moo::grid_oracle(b, 1e-3);
  EXPECT_NEAR(grid.squared_norm, 0.5, 1e-3);
}

TEST(MinNorm, IdenticalGradients) {
  GradientBundle b{{{1.5, -2.0}, {1.5, -2.0}}};
  EXPECT_EQ(moo::solve_min_norm(b).combined, b.grads[0]);
}

TEST(MinNorm, NestedPair) {
  GradientBundle b{{{2, 0}, {1, 0}}};
  auto r = moo::solve_min_norm(b);
  EXPECT_EQ(r.alpha, (std::vector<double>{0, 1}));
  EXPECT_EQ(r.combined, (std::vector<double>{1, 0}));
  auto check = moo::check_descent(b, r.combined);
  EXPECT_TRUE(check.ok);
  EXPECT_DOUBLE_EQ(check.inner_products[0], 2.0);
  auto grid = moo::grid_oracle(b, 1e-4);
  EXPECT_NEAR(grid.alpha[1], 1.0, 1e-12);
}

TEST(MinNorm, OpposingPairIsStationary) {
  GradientBundle b{{{1, 0}, {-1, 0}}};
  auto r = moo::solve_min_norm(b);
  EXPECT_EQ(r.combined, (std::vector<double>{0, 0}));
  auto check = moo::check_descent(b, r.combined);
  EXPECT_TRUE(check.ok);
  EXPECT_EQ(check.inner_products, (std::vector<double>{0, 0}));
}

TEST(MinNorm, AllZeroBundle) {
  GradientBundle b{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  auto r = moo::solve_min_norm(b);
  for (double a : r.alpha) EXPECT_DOUBLE_EQ(a, 1.0 / 3.0);
  EXPECT_EQ(r.combined, (std::vector<double>{0, 0, 0}));
}

TEST(MinNorm, BadBundles) {
  EXPECT_THROW(moo::solve_min_norm(GradientBundle{{{1, 2}}}), UsageError);
  EXPECT_THROW(moo::solve_min_norm(GradientBundle{{{1, 2}, {1}}}), UsageError);
  EXPECT_THROW(moo::solve_min_norm(GradientBundle{{{1, NAN}, {1, 2}}}), UsageError);
}

TEST(CheckDescent, NegativeControl) {
  GradientBundle b{{{1, 0}, {-1, 0}}};
  auto check = moo::check_descent(b, b.grads[0]);
  EXPECT_FALSE(check.ok);
  EXPECT_DOUBLE_EQ(check.inner_products[1], -1.0);
  GradientBundle o{{{1, 0}, {0, 1}}};
  std::vector<double> half{0.5, 0.5};
  auto ok = moo::check_descent(o, half);
  EXPECT_TRUE(ok.ok);
  EXPECT_EQ(ok.inner_products, (std::vector<double>{0.5, 0.5}));
}

TEST(GridOracle, Examples) {
  GradientBundle basis{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  auto r = moo::grid_oracle(basis, 1e-2);
  EXPECT_NEAR(r.squared_norm, 1.0 / 3.0, 1e-3);
  for (double a : r.alpha) EXPECT_NEAR(a, 1.0 / 3.0, 0.011);

  GradientBundle same{{{0.5, 2}, {0.5, 2}, {0.5, 2}}};
  EXPECT_DOUBLE_EQ(moo::grid_oracle(same, 1e-2).squared_norm, norm2(same.grads[0]));

  GradientBundle four{{{1}, {2}, {3}, {4}}};
  EXPECT_THROW(moo::grid_oracle(four, 1e-2), UsageError);
  EXPECT_THROW(moo::grid_oracle(basis, 0.05), UsageError);
}

TEST(MinNorm, FrankWolfeMatchesBasisSymmetry) {
  GradientBundle basis{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  auto r = moo::solve_min_norm(basis);
  EXPECT_NEAR(r.squared_norm, 1.0 / 3.0, 1e-9);
  EXPECT_GT(r.iterations, 0u);
}

TEST(MinNorm, ScaleCovariance) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    for (std::size_t p : {2u, 3u}) {
      GradientBundle b = random_bundle(rng, p, 6);
      GradientBundle s = b;
      for (auto& v : s.grads) {
        for (auto& x : v) x *= 3.5;
      }
      auto r = moo::solve_min_norm(b);
      auto rs = moo::solve_min_norm(s);
      const double tol = p == 2 ? 1e-12 : 1e-4;
      for (std::size_t i = 0; i < p; ++i) EXPECT_NEAR(rs.alpha[i], r.alpha[i], tol);
      for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(rs.combined[j], 3.5 * r.combined[j], 1e-4 * (1 + std::abs(rs.combined[j])));
    }
  }
}

TEST(MinNorm, Minimality) {
  std::mt19937_64 rng(23);
  std::gamma_distribution<double> gam(1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 2 + t % 3;
    GradientBundle b = random_bundle(rng, p, 1 + t % 16);
    auto r = moo::solve_min_norm(b);
    double sum = 0.0;
    for (double a : r.alpha) {
      EXPECT_GE(a, 0.0);
      sum += a;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    double scale = 0.0;
    for (const auto& g : b.grads) scale = std::max(scale, norm2(g));
    const double slack = 1e-9 * std::max(1.0, scale);
    for (const auto& g : b.grads) EXPECT_LE(r.squared_norm, norm2(g) + slack);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> w(p);
      double s = 0.0;
      for (auto& x : w) s += (x = gam(rng));
      for (auto& x : w) x /= s;
      EXPECT_LE(r.squared_norm, norm2(moo::combine(b, w)) + slack);
    }
    EXPECT_TRUE(moo::check_descent(b, r.combined).ok);
  }
}
