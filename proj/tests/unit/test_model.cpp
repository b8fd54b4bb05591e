#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "yukawa/model.hpp"

using namespace yukawa;

TEST(Model, DispersionAndFormFactor) {
  EXPECT_DOUBLE_EQ(omega(3.0, 2.0), std::sqrt(13.0));
  EXPECT_DOUBLE_EQ(omega(Momentum3{1.0, 2.0, 2.0}, 2.0), std::sqrt(13.0));
  const double expected = std::pow(2.0 * std::numbers::pi, -1.5) / std::sqrt(2.0 * std::sqrt(13.0));
  EXPECT_NEAR(rho(3.0, 2.0), expected, 1e-17);
  EXPECT_DOUBLE_EQ(free_energy({0.0, 0.0, 0.2}, 1.0), std::sqrt(1.04));
}

TEST(Model, FinenessAndShellLadder) {
  ModelParams p;
  EXPECT_NEAR(p.gamma(), std::pow(0.125, 1.0 / 6.0), 1e-15);
  const auto sh = shells(p);
  ASSERT_EQ(sh.size(), 6u);
  EXPECT_DOUBLE_EQ(sh.front().upper, 8.0);
  EXPECT_DOUBLE_EQ(sh.back().lower, 1.0);
  for (std::size_t i = 1; i < sh.size(); ++i) EXPECT_EQ(sh[i].upper, sh[i - 1].lower);
  EXPECT_NEAR(p.scale_edge(2), 4.0, 1e-14);
  EXPECT_NEAR(p.scale_point(7), 8.0 * std::pow(p.gamma(), 7), 1e-14);
  // half-open intervals (lower, upper]
  EXPECT_TRUE(sh[0].contains(8.0));
  EXPECT_FALSE(sh[0].contains(sh[0].lower));
  EXPECT_THROW(shell(p, 0), InvalidParameters);
  EXPECT_THROW(shell(p, 7), InvalidParameters);
}

TEST(Model, GapBoundUsesNextScale) {
  ModelParams p;
  EXPECT_NEAR(gap_bound(p, 0), 0.45 * omega(8.0 * p.gamma(), 2.0), 1e-14);
  EXPECT_NEAR(gap_bound(p, 6), 0.45 * omega(p.gamma(), 2.0), 1e-14);
}

TEST(Model, DefaultsSatisfyEveryConstraint) {
  EXPECT_TRUE(validate(ModelParams{}).empty());
  EXPECT_NO_THROW(require_valid(ModelParams{}));
}

TEST(Model, ViolationsNameTheConstraint) {
  ModelParams p;
  p.mu = 0.8;
  auto v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].constraint, "mu > 1 required");
  EXPECT_TRUE(validate(p, {.allow_mu_le_1 = true}).empty());

  p = ModelParams{};
  p.n_steps = 1;  // gamma = 1/8
  v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].constraint, "gamma in (1/2, 1) required");

  p = ModelParams{};
  p.theta = 0.1;
  p.zeta = 0.2;
  v = validate(p);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_THROW(require_valid(p), InvalidParameters);

  p = ModelParams{};
  p.p_max = 0.4;  // 1 - 0.2 - 0.4 < 0.45
  v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].constraint, "1 - theta - p_max >= zeta required");
}

TEST(Model, StepsForGamma) {
  EXPECT_EQ(steps_for_gamma(8.0, 1.0, std::pow(0.125, 1.0 / 6.0)), 6);
  EXPECT_EQ(steps_for_gamma(160.0, 1.0, std::pow(0.125, 1.0 / 6.0)), 15);
  EXPECT_EQ(steps_for_gamma(1.5, 1.0, 0.9), 4);
}
