#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "support.hpp"
#include "yukawa/hamiltonian.hpp"

using namespace yukawa;
using yukawa::testing::desk_params;
using yukawa::testing::kDeskP;
using yukawa::testing::make_setup;

namespace {

// One mode k = (0, 0, 1.5) with weight 2 in shell 1.
std::shared_ptr<const ModeSet> one_mode() {
  return std::make_shared<const ModeSet>(std::vector<Mode>{{{0.0, 0.0, 1.5}, 2.0, 1}}, 1, 1, 1);
}

ModelParams one_mode_params(double g) {
  ModelParams p;
  p.g = g;
  p.n_steps = 1;
  return p;
}

}  // namespace

TEST(Hamiltonian, OneModeTwoByTwo) {
  const auto modes = one_mode();
  const ModelParams p = one_mode_params(0.5);
  auto basis = std::make_shared<const FockBasis>(build_basis(*modes, 1, 1));
  const Momentum3 P{0.0, 0.0, 0.2};
  const FiberOperator h = assemble(P, 1, p, basis, *modes);
  ASSERT_EQ(h.dim(), 2);
  const double a = std::sqrt(0.04 + 1.0);
  const double d = std::sqrt(1.3 * 1.3 + 1.0) + std::sqrt(2.25 + 4.0);
  const double c = 0.5 * std::sqrt(2.0) * rho(1.5, 2.0);
  EXPECT_NEAR(h.entry(0, 0), a, 1e-15);
  EXPECT_NEAR(h.entry(1, 1), d, 1e-15);
  EXPECT_NEAR(h.entry(0, 1), c, 1e-17);
  EXPECT_NEAR(h.entry(1, 0), c, 1e-17);
  const double e0 = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + c * c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.to_dense());
  EXPECT_NEAR(es.eigenvalues()[0], e0, 1e-14);
}

TEST(Hamiltonian, BosonEnhancementFactor) {
  const auto modes = one_mode();
  const ModelParams p = one_mode_params(0.5);
  auto basis = std::make_shared<const FockBasis>(build_basis(*modes, 1, 2));
  const FiberOperator h = assemble({}, 1, p, basis, *modes);
  ASSERT_EQ(h.dim(), 3);
  const double c = 0.5 * std::sqrt(2.0) * rho(1.5, 2.0);
  EXPECT_NEAR(h.entry(0, 1), c, 1e-17);
  EXPECT_NEAR(h.entry(1, 2), std::sqrt(2.0) * c, 1e-17);
  EXPECT_EQ(h.entry(0, 2), 0.0);
}

TEST(Hamiltonian, DeskOperatorIsSymmetricWithExactDiagonal) {
  const auto s = make_setup(desk_params(), 6);
  const FiberOperator h = assemble(kDeskP, 6, s.params, s.basis, *s.modes);
  const Eigen::MatrixXd a = h.to_dense();
  EXPECT_EQ((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
  for (std::size_t i = 0; i < s.basis->size(); ++i) {
    const OccState& st = (*s.basis)[i];
    const double expected = free_energy(kDeskP - field_momentum(st, *s.modes), 1.0) +
                            field_energy(st, *s.modes, s.params);
    EXPECT_DOUBLE_EQ(a(Eigen::Index(i), Eigen::Index(i)), expected);
  }
  // vacuum-to-one-boson edges plus 36 raisings of each one-boson state, stored twice
  EXPECT_EQ(h.matrix().nnz_offdiag(), 2u * (36u + 36u * 36u));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  // dense numpy oracle (tests/oracles/dense_oracle.py)
  EXPECT_NEAR(es.eigenvalues()[0], 1.0197328447674026, 1e-12);
  EXPECT_LE(es.eigenvalues()[0], h.matrix().norm_bound());
  EXPECT_GE(es.eigenvalues()[0], h.matrix().gershgorin_lower());
}

TEST(Hamiltonian, SliceIsTheIncrementBetweenScales) {
  const auto s = make_setup(desk_params(), 4);
  const FiberOperator h3 = assemble(kDeskP, 3, s.params, s.basis, *s.modes);
  const FiberOperator h4 = assemble(kDeskP, 4, s.params, s.basis, *s.modes);
  const SlicePiece slice = slice_piece(4, s.params, s.basis, *s.modes);
  EXPECT_FALSE(slice.is_zero());
  EXPECT_DOUBLE_EQ(slice.shell().lower, s.params.scale_edge(4));
  const Eigen::MatrixXd diff = h4.to_dense() - h3.to_dense() - slice.to_dense();
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-18);
  EXPECT_TRUE(slice_piece(4, desk_params(0.0), s.basis, *s.modes).is_zero());
}

TEST(Hamiltonian, ApplyMatchesDenseForRealAndComplex) {
  const auto s = make_setup(desk_params(), 2);
  const FiberOperator h = assemble(kDeskP, 2, s.params, s.basis, *s.modes);
  const Eigen::MatrixXd a = h.to_dense();
  Vector x = Vector::LinSpaced(h.dim(), -1.0, 2.0);
  EXPECT_LT((h.apply(x) - a * x).norm(), 1e-13);
  CVector cx = x.cast<Complex>() * Complex(0.3, -0.7);
  EXPECT_LT((h.apply(cx) - a.cast<Complex>() * cx).norm(), 1e-13);
  EXPECT_LT((h.matrix().shifted(2.5).apply(x) - (a * x + 2.5 * x)).norm(), 1e-13);
}

TEST(Hamiltonian, CooDumpFormat) {
  Eigen::Matrix2d a;
  a << 1.0, 0.25, 0.25, 3.0;
  std::ostringstream os;
  SparseSymmetric::from_dense(a).write_coo(os);
  EXPECT_EQ(os.str(), "# dim 2 nnz 4\n0 0 1\n1 1 3\n0 1 0.25\n1 0 0.25\n");
}

TEST(Hamiltonian, RejectsInconsistentInputs) {
  const auto s = make_setup(desk_params(), 2);
  EXPECT_THROW(assemble({0.0, 0.0, 0.3}, 2, s.params, s.basis, *s.modes), InvalidParameters);
  EXPECT_NO_THROW(assemble({0.0, 0.0, 0.3}, 2, s.params, s.basis, *s.modes, {.allow_p_beyond_max = true}));
  EXPECT_THROW(assemble(kDeskP, 3, s.params, s.basis, *s.modes), DimensionMismatch);
  const ModeSet other = build_modes(s.params, 1, 8);
  EXPECT_THROW(assemble(kDeskP, 2, s.params, s.basis, other), DimensionMismatch);
  EXPECT_THROW(slice_piece(3, s.params, s.basis, *s.modes), DimensionMismatch);
  EXPECT_THROW(assemble(kDeskP, 2, s.params, s.basis, *s.modes).to_dense(10), DimensionMismatch);
  EXPECT_THROW(SparseSymmetric(Vector::Zero(2), {{0, 2, 1.0}}), DimensionMismatch);
}

TEST(Hamiltonian, CompletedSquareConstant) {
  const auto s = make_setup(desk_params(), 6);
  // sum_j w_j rho_j^2 / omega_j from the dense oracle
  EXPECT_NEAR(completed_square_constant(*s.modes, s.params, 6), 0.13407985313650553, 1e-15);
  EXPECT_EQ(completed_square_constant(*s.modes, s.params, 0), 0.0);
}
