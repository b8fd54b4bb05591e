#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "yukawa/observables.hpp"
#include "yukawa/sweeps.hpp"

using namespace yukawa;
using yukawa::testing::desk_params;
using yukawa::testing::kDeskP;
using yukawa::testing::make_setup;

TEST(Velocity, VacuumIsTheFreeVelocity) {
  const auto s = make_setup(desk_params(), 2);
  Vector vac = Vector::Zero(static_cast<Eigen::Index>(s.basis->size()));
  vac[0] = 3.0;  // normalization is divided out
  const Momentum3 p{0.1, 0.1, 0.1};
  const Momentum3 v = hf_velocity(vac, p, *s.basis, *s.modes, s.params);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(v[i], 0.1 / std::sqrt(1.03), 1e-15);
  EXPECT_THROW(hf_velocity(Vector::Zero(3), p, *s.basis, *s.modes, s.params), DimensionMismatch);
  EXPECT_THROW(hf_velocity(Vector::Zero(vac.size()), p, *s.basis, *s.modes, s.params), DimensionMismatch);
}

TEST(Velocity, BoundedByOneAndRecoilReduced) {
  const auto s = make_setup(desk_params(), 1);
  const Eigen::MatrixX3d vd = velocity_diagonals(kDeskP, *s.basis, *s.modes, s.params);
  for (Eigen::Index r = 0; r < vd.rows(); ++r) EXPECT_LT(vd.row(r).norm(), 1.0);
  // state with one boson along +z: P - k points down
  const auto idx = s.basis->find(OccState({0}));
  ASSERT_TRUE(idx);
  EXPECT_LT(vd(Eigen::Index(*idx), 2), 0.0);
}

TEST(Ladder, RaiseAndLowerAreAdjoint) {
  const auto s = make_setup(desk_params(), 2);
  const Eigen::Index n = static_cast<Eigen::Index>(s.basis->size());
  const Vector a = seeded_vector(n, 1), b = seeded_vector(n, 2);
  for (std::uint32_t j : {0u, 5u, 7u}) {
    EXPECT_NEAR(b.dot(raise_mode(a, *s.basis, *s.basis, j)) - lower_mode(b, *s.basis, j).dot(a), 0.0, 1e-14);
  }
  Vector vac = Vector::Zero(n);
  vac[0] = 1.0;
  const Vector two = raise_mode(raise_mode(vac, *s.basis, *s.basis, 3), *s.basis, *s.basis, 3);
  EXPECT_NEAR(two[Eigen::Index(*s.basis->find(OccState({3, 3})))], std::sqrt(2.0), 1e-15);
  // raising past b_max drops the component
  EXPECT_EQ(raise_mode(two, *s.basis, *s.basis, 3).norm(), 0.0);
}

TEST(Ladder, RaiseIntoLargerBasis) {
  const auto s1 = make_setup(desk_params(), 1);
  const auto s2 = make_setup(desk_params(), 2);
  Vector vac = Vector::Zero(static_cast<Eigen::Index>(s1.basis->size()));
  vac[0] = 1.0;
  const Vector y = raise_mode(vac, *s1.basis, *s2.basis, 8);
  EXPECT_EQ(y.size(), static_cast<Eigen::Index>(s2.basis->size()));
  EXPECT_EQ(y[Eigen::Index(*s2.basis->find(OccState({8})))], 1.0);
  EXPECT_THROW(raise_mode(vac, *s1.basis, *s1.basis, 8), DimensionMismatch);
}

TEST(Ladder, XiScaleSitsOnTheLadder) {
  const ModelParams p = desk_params();
  // Lambda gamma^3 / 0.03^{1/4} = 6.80 lies in [Lambda gamma, Lambda)
  EXPECT_NEAR(xi_scale(p, 4, 0.03, 0.25), 8.0 * p.gamma(), 1e-12);
  for (int n : {2, 4, 6}) {
    const double target = std::min(p.lambda, p.scale_point(n - 1) / std::pow(0.2, 0.5));
    const double x = xi_scale(p, n, 0.2, 0.5);
    EXPECT_LE(x, target * (1 + 1e-12));
    EXPECT_TRUE(x == p.lambda || x / p.gamma() > target);
  }
  EXPECT_NEAR(xi_scale(p, 2, 1e-8, 0.25), 8.0, 1e-12);  // capped at Lambda
  EXPECT_THROW(xi_scale(p, 3, 0.1, 0.7), InvalidParameters);
}

TEST(Fit, PowerLawRecoversExactExponent) {
  const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  const PowerLawFit f = fit_power_law(x, y);
  EXPECT_NEAR(f.exponent, 1.5, 1e-13);
  EXPECT_NEAR(f.prefactor, 3.0, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-13);
  EXPECT_EQ(f.n_points, 4u);
}

TEST(Fit, DegenerateInputsAreRejected) {
  EXPECT_THROW(fit_power_law({1, 2, 3}, {0, 0, 0}), InvalidParameters);
  EXPECT_THROW(fit_power_law({1, 2, 3}, {1, -1, 2}), InvalidParameters);
  EXPECT_THROW(fit_power_law({2, 2, 2}, {1, 2, 3}), InvalidParameters);
  EXPECT_THROW(fit_power_law({1}, {1}), InvalidParameters);
  EXPECT_THROW(fit_power_law({1, 2}, {1}), DimensionMismatch);
}

TEST(Fit, FlatteningModelRecoversSyntheticData) {
  const std::vector<double> lambdas = {16, 32, 64, 128, 160};
  const double g = 0.3, c1 = 2.0, v_free = 0.2, floor = 0.01;
  std::vector<double> v;
  for (double l : lambdas) v.push_back(v_free * std::pow(l, -g * g * c1) + floor);
  const FlatteningModel m = fit_flattening(lambdas, v, v_free, g);
  EXPECT_NEAR(m.c1, c1, 1e-3);
  EXPECT_NEAR(m.floor, floor, 1e-4);
  EXPECT_LT(m.residual, 1e-6);
}

TEST(Sweeps, SelfEnergySweepNeedsFourCutoffs) {
  SweepSetup s;
  s.base = desk_params();
  EXPECT_THROW(self_energy_sweep(s, {8, 16, 32}), InvalidParameters);
}

TEST(Sweeps, FreeCouplingHasNoSelfEnergy) {
  SweepSetup s;
  s.base = desk_params(0.0);
  s.options.compute_contraction = false;
  const SweepResult r = self_energy_sweep(s, {4, 8, 12, 16});
  EXPECT_EQ(r.failures(), 0u);
  EXPECT_FALSE(r.fit.has_value());
  EXPECT_NE(r.fit_error.find("zero signal"), std::string::npos);
  for (const auto& pt : r.points) EXPECT_EQ(pt.observable, 0.0);
}

TEST(Sweeps, FailedPointsAreReportedNotFatal) {
  SweepSetup s;
  s.base = desk_params();
  s.options.compute_contraction = false;
  s.disc.basis_cap = 400;  // only the two smallest cutoffs fit
  const SweepResult r = self_energy_sweep(s, {2, 3, 64, 128});
  EXPECT_EQ(r.failures(), 2u);
  EXPECT_FALSE(r.points[2].ok);
  EXPECT_NE(r.points[2].error.find("exceeds cap"), std::string::npos);
  EXPECT_FALSE(r.fit.has_value());
}

TEST(Sweeps, TruncationReportConverges) {
  const auto rows = truncation_report(desk_params(), kDeskP, Discretization{1, 2, 2, kDefaultBasisCap}, {});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].energy, rows[1].energy);
  EXPECT_LT(std::abs(rows[1].energy - rows[2].energy), std::abs(rows[0].energy - rows[1].energy));
}

TEST(Sweeps, CouplingWindowFromContractions) {
  const Trajectory t = run_trajectory(kDeskP, desk_params(), {});
  const CouplingWindow w = coupling_window(t);
  double worst = 0.0;
  for (const auto& r : t.records)
    if (r.n > 0) worst = std::max(worst, r.contraction);
  EXPECT_NEAR(w.g_max, 0.03 / worst, 1e-12);
  EXPECT_EQ(w.per_shell_slope.size(), 6u);
  EXPECT_GT(w.g_max, 1.0);  // the contraction stays below 1 for every admissible |g|
  TrajectoryOptions o;
  o.compute_contraction = false;
  EXPECT_THROW(coupling_window(run_trajectory(kDeskP, desk_params(), {}, o)), InvalidParameters);
}
