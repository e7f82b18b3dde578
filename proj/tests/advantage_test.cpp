#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "slicerank/advantage.hpp"

namespace {

using namespace slicerank;

TEST(GroupAdvantages, WorkedValues) {
  auto a = group_advantages({1.0, 0.0}, 1e-4);
  EXPECT_NEAR(a[0], 0.99980004, 1e-8);
  EXPECT_NEAR(a[1], -0.99980004, 1e-8);

  for (double x : group_advantages({0.7, 0.7, 0.7, 0.7}, 1e-4)) EXPECT_EQ(x, 0.0);
  // 0.1 summed eleven times is not 1.1, so the mean drifts from the values
  for (double x : group_advantages(std::vector<double>(11, 0.1), 1e-4)) EXPECT_EQ(x, 0.0);

  auto z = group_advantages({2.0, 4.0, 6.0}, 1e-15);
  EXPECT_NEAR(z[0], -1.224744871391589, 1e-9);
  EXPECT_NEAR(z[1], 0.0, 1e-12);
  EXPECT_NEAR(z[2], 1.224744871391589, 1e-9);
}

TEST(GroupAdvantages, Preconditions) {
  EXPECT_THROW(group_advantages({1.0}, 1e-4), ContractViolation);
  EXPECT_THROW(group_advantages({1.0, 2.0}, 0.0), ContractViolation);
}

TEST(GroupAdvantages, ShiftInvarianceAndScaleOrder) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> r(-3.0, 3.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> rewards(2 + t % 15);
    for (auto& x : rewards) x = std::round(r(rng) * 4.0) / 4.0;  // dyadic values keep shifts exact
    auto base = group_advantages(rewards, 1e-4);
    auto shifted = rewards;
    for (auto& x : shifted) x += 2.0;
    auto s = group_advantages(shifted, 1e-4);
    auto scaled = rewards;
    for (auto& x : scaled) x *= 3.5;
    auto k = group_advantages(scaled, 1e-4);
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      EXPECT_NEAR(s[i], base[i], 1e-12);
      for (std::size_t j = 0; j < rewards.size(); ++j) EXPECT_EQ(base[i] < base[j], k[i] < k[j]);
    }
  }
}

TEST(DapoObjective, WorkedValues) {
  auto a = dapo_objective(std::vector<double>{1.0, -1.0}, std::vector<std::size_t>{2, 3});
  EXPECT_DOUBLE_EQ(a.objective, -0.2);
  EXPECT_DOUBLE_EQ(dapo_objective(std::vector<double>{0.0, 0.0}, std::vector<std::size_t>{4, 9}).objective, 0.0);
  EXPECT_DOUBLE_EQ(dapo_objective(std::vector<double>{2.0}, std::vector<std::size_t>{7}).objective, 2.0);
}

TEST(DapoObjective, TokenCoefficientsAreConstantPerCompletion) {
  auto t = dapo_objective(std::vector<double>{0.5, -1.25, 2.0}, std::vector<std::size_t>{3, 1, 4});
  ASSERT_EQ(t.tokenCoefficients.size(), 3u);
  EXPECT_EQ(t.tokenCoefficients[0], (std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_EQ(t.tokenCoefficients[1], (std::vector<double>{-1.25}));
  EXPECT_EQ(t.tokenCoefficients[2], (std::vector<double>(4, 2.0)));
}

TEST(DapoObjective, LinearInAdvantages) {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> a(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> len(1, 50);
  for (int t = 0; t < 200; ++t) {
    std::size_t g = 1 + t % 8;
    std::vector<double> x(g), y(g), comb(g);
    std::vector<std::size_t> counts(g);
    for (std::size_t i = 0; i < g; ++i) {
      x[i] = a(rng);
      y[i] = a(rng);
      counts[i] = len(rng);
      comb[i] = 2.0 * x[i] - 0.5 * y[i];
    }
    double lhs = dapo_objective(comb, counts).objective;
    double rhs = 2.0 * dapo_objective(x, counts).objective - 0.5 * dapo_objective(y, counts).objective;
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(DapoObjective, Preconditions) {
  EXPECT_THROW(dapo_objective(std::vector<double>{1.0}, std::vector<std::size_t>{1, 2}), ContractViolation);
  EXPECT_THROW(dapo_objective(std::vector<double>{1.0}, std::vector<std::size_t>{0}), ContractViolation);
}

TEST(PlanAccumulation, WorkedValues) {
  auto exact = plan_accumulation(96, 32);
  ASSERT_EQ(exact.passes.size(), 3u);
  for (auto& p : exact.passes) EXPECT_EQ(p.size(), 32u);

  auto rem = plan_accumulation(100, 32);
  ASSERT_EQ(rem.passes.size(), 4u);
  EXPECT_EQ(rem.passes.back().size(), 4u);

  auto one = plan_accumulation(5, 8);
  ASSERT_EQ(one.passes.size(), 1u);
  EXPECT_EQ(one.passes[0], (IndexRange{0, 5}));
}

TEST(PlanAccumulation, PartitionsTheIndexRange) {
  for (std::size_t total = 1; total <= 60; ++total) {
    for (std::size_t sub = 1; sub <= 20; ++sub) {
      auto plan = plan_accumulation(total, sub);
      EXPECT_EQ(plan.passes.size(), (total + sub - 1) / sub);
      std::size_t expect = 0;
      for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        EXPECT_EQ(plan.passes[k].begin, expect);
        if (k + 1 < plan.passes.size()) {
          EXPECT_EQ(plan.passes[k].size(), sub);
        }
        EXPECT_GT(plan.passes[k].size(), 0u);
        expect = plan.passes[k].end;
      }
      EXPECT_EQ(expect, total);
    }
  }
}

}  // namespace
