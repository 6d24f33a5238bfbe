#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prosel/symmetric_eigen.hpp"
#include "prosel/utility.hpp"
#include "support.hpp"
#include "table2.hpp"

using namespace prosel;
using support::max_abs_diff;

TEST(Logistic, ReferencePoints) {
  EXPECT_EQ(logistic(0.8, 20, 0.8), 0.5);
  EXPECT_NEAR(logistic(0.9, 20, 0.8), oracle::logistic(0.9, 20, 0.8), 1e-15);
  EXPECT_NEAR(logistic(0.9, 20, 0.8), 0.880797, 5e-7);
  EXPECT_NEAR(logistic(1.0, 20, 0.8), 0.982014, 5e-7);
  const auto r = logistic_transform({0.8, 0.9, 1.0});
  EXPECT_EQ(r[0], 0.5);
  EXPECT_NEAR(r[2], 0.982014, 5e-7);
}

TEST(Logistic, StrictlyIncreasing) {
  double prev = logistic(-1.0, 20, 0.8);
  for (int i = 1; i <= 200; ++i) {
    const double cur = logistic(-1.0 + i * 0.01, 20, 0.8);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(Utility, PublishedRowsReproduce) {
  // The printed weight is already W / max(W).
  for (const auto& row : table2::kRows) {
    const double u = logistic(row.relevance, 20, 0.8) + 0.1 * row.weight;
    EXPECT_NEAR(u, row.utility, 0.001) << row.item;
  }
}

TEST(Utility, ChillsAndMouthSores) {
  // A third item with weight 1 makes the normalized weights equal the raw ones.
  auto u = utility({0.982014, 0.933, 0.5}, {0.050, 0.017, 1.0});
  EXPECT_NEAR(u[0], 0.987, 0.001);
  EXPECT_NEAR(u[1], 0.935, 0.001);
}

TEST(Utility, ZeroWeightsLeaveRelevanceUntouched) {
  const Vector rs{0.1, 0.5, 0.9};
  EXPECT_EQ(utility(rs, {0, 0, 0}), rs);
  EXPECT_EQ(utility(rs, {1, 2, 3}, {.beta = 0}), rs);
}

TEST(Utility, MatchesOracleAndRejectsNegativeWeights) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> r(-1, 1), w(0, 20);
  for (int rep = 0; rep < 20; ++rep) {
    Vector rel(12), wt(12);
    for (auto& x : rel) x = r(rng);
    for (auto& x : wt) x = w(rng);
    EXPECT_LE(max_abs_diff(utility(logistic_transform(rel), wt), oracle::utility(rel, wt, 20, 0.8, 0.1)), 1e-12);
  }
  EXPECT_THROW(utility({0.5, 0.5}, {1, -1}), ParameterError);
  EXPECT_THROW(utility({0.5}, {1, 1}), ParameterError);
}

TEST(Utility, MonotoneInRelevance) {
  const Vector w{3, 1, 2};
  Vector rel{0.7, 0.8, 0.9};
  auto base = utility(logistic_transform(rel), w);
  for (double bump : {0.01, 0.05, 0.2}) {
    auto up = rel;
    up[1] += bump;
    EXPECT_GE(utility(logistic_transform(up), w)[1], base[1]);
  }
}

TEST(Utility, InvariantToWeightScale) {
  const Vector rs{0.2, 0.6, 0.95};
  const Vector w{2, 5, 1};
  const auto u = utility(rs, w);
  for (double c : {0.5, 3.0, 1e6}) {
    Vector scaled;
    for (double x : w) scaled.push_back(c * x);
    EXPECT_LE(max_abs_diff(utility(rs, scaled), u), 1e-15);
  }
}

TEST(UtilityParams, Validation) {
  EXPECT_NO_THROW(UtilityParams{}.validate());
  EXPECT_THROW((UtilityParams{.k = 0}.validate()), ParameterError);
  EXPECT_THROW((UtilityParams{.x0 = INFINITY}.validate()), ParameterError);
  EXPECT_THROW((UtilityParams{.beta = -0.1}.validate()), ParameterError);
}

TEST(LKernel, SmallCases) {
  std::mt19937_64 rng(22);
  const auto s = oracle::random_psd(rng, 5, 5);
  EXPECT_EQ(build_lkernel(Vector(5, 1.0), s), s);
  const auto l = build_lkernel({2, 3}, Matrix::identity(2));
  EXPECT_EQ(l(0, 0), 4.0);
  EXPECT_EQ(l(1, 1), 9.0);
  EXPECT_EQ(l(0, 1), 0.0);
  EXPECT_THROW(build_lkernel({1, 2, 3}, Matrix::identity(2)), ParameterError);
}

TEST(LKernel, MatchesOracleAndStaysPsd) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ud(0, 1.1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto store = support::random_store(rng, 20, 4);
    const auto items = support::random_items(rng, 8, 20);
    const auto s = build_similarity(items, store);
    Vector u(8);
    for (auto& x : u) x = ud(rng);
    const auto l = build_lkernel(u, s);
    EXPECT_LE(max_abs_diff(l, oracle::lkernel(u, s)), 1e-12);
    EXPECT_EQ(asymmetry(l), 0.0);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(l(j, j), u[j] * u[j], 1e-9);
    EXPECT_GE(symmetric_eigen(l).values.back(), -1e-8);
  }
}
