#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "yukawa/fock.hpp"

using namespace yukawa;
using yukawa::testing::desk_params;

TEST(Quadrature, GaussLegendreThreePoint) {
  const auto [x, w] = gauss_legendre(3);
  ASSERT_EQ(x.size(), 3u);
  EXPECT_NEAR(x[0], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(x[1], 0.0, 1e-15);
  EXPECT_NEAR(x[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(w[0], 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(w[1], 8.0 / 9.0, 1e-15);
}

TEST(Quadrature, GaussLegendreIsExactToDegree2nMinus1) {
  for (int order : {1, 2, 4, 7}) {
    const auto [x, w] = gauss_legendre(order);
    for (int deg = 0; deg <= 2 * order - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "order " << order << " degree " << deg;
    }
  }
  EXPECT_THROW(gauss_legendre(0), InvalidParameters);
}

TEST(Quadrature, AngularRulesAreAntipodalAndIntegrateQuadratics) {
  for (int order : {2, 6, 8, 12, 14, 26}) {
    const auto rule = angular_rule(order);
    ASSERT_EQ(rule.size(), static_cast<std::size_t>(order));
    double total = 0.0, zz = 0.0;
    Momentum3 first_moment;
    for (const auto& node : rule) {
      EXPECT_NEAR(node.direction.norm(), 1.0, 1e-15);
      total += node.weight;
      zz += node.weight * node.direction.z * node.direction.z;
      first_moment += node.weight * node.direction;
      bool has_antipode = false;
      for (const auto& other : rule) {
        if ((other.direction + node.direction).norm() < 1e-14 && other.weight == node.weight) has_antipode = true;
      }
      EXPECT_TRUE(has_antipode);
    }
    EXPECT_NEAR(total, 4.0 * std::numbers::pi, 1e-13) << order;
    EXPECT_NEAR(first_moment.norm(), 0.0, 1e-13) << order;
    if (order != 2) EXPECT_NEAR(zz, 4.0 * std::numbers::pi / 3.0, 1e-13) << order;
  }
  EXPECT_THROW(angular_rule(5), InvalidParameters);
}

TEST(Modes, ShellWeightsReproduceBallShellVolume) {
  const ModelParams p = desk_params();
  const ModeSet modes = build_modes(p, 2, 6);  // two radii integrate r^2 exactly
  ASSERT_EQ(modes.size(), 6u * 2u * 6u);
  for (const Shell& s : shells(p)) {
    const auto [first, last] = modes.shell_range(s.index);
    double vol = 0.0;
    for (std::size_t j = first; j < last; ++j) {
      vol += modes[j].weight;
      EXPECT_EQ(modes[j].shell_index, s.index);
      EXPECT_GT(modes[j].radius(), s.lower);
      EXPECT_LE(modes[j].radius(), s.upper);
    }
    const double exact = 4.0 * std::numbers::pi / 3.0 * (std::pow(s.upper, 3) - std::pow(s.lower, 3));
    EXPECT_NEAR(vol, exact, 1e-12 * exact) << "shell " << s.index;
  }
}

TEST(Modes, PrefixLayoutAndFingerprint) {
  const ModelParams p = desk_params();
  const ModeSet a = build_modes(p, 1, 6);
  EXPECT_EQ(a.size(), 36u);
  EXPECT_EQ(a.active_count(0), 0u);
  EXPECT_EQ(a.active_count(3), 18u);
  EXPECT_EQ(a.active_count(99), 36u);
  EXPECT_EQ(a.shell_range(2), (std::pair<std::size_t, std::size_t>{6, 12}));
  EXPECT_EQ(a.fingerprint(), build_modes(p, 1, 6).fingerprint());
  EXPECT_NE(a.fingerprint(), build_modes(p, 1, 8).fingerprint());
  const auto j = to_json(a);
  EXPECT_EQ(j["modes"].size(), 36u);
  EXPECT_EQ(j["n_shells"], 6);
}

TEST(Basis, CardinalityMatchesCombinatorics) {
  EXPECT_EQ(basis_cardinality(1, 2), 3u);   // |0>, |1>, |2>
  EXPECT_EQ(basis_cardinality(3, 2), 10u);  // 1 + 3 + 6
  EXPECT_EQ(basis_cardinality(36, 2), 703u);
  EXPECT_EQ(basis_cardinality(36, 3), 9139u);
  EXPECT_EQ(basis_cardinality(0, 4), 1u);
}

TEST(Basis, SizesOnTheDeskLadder) {
  // itertools enumeration in the dense oracle
  const std::size_t expected[] = {1, 28, 91, 190, 325, 496, 703};
  const ModeSet modes = build_modes(desk_params(), 1, 6);
  for (int n = 0; n <= 6; ++n) {
    const FockBasis b = build_basis(modes, n, 2);
    EXPECT_EQ(b.size(), expected[n]);
    EXPECT_EQ(b.size(), basis_cardinality(modes.active_count(n), 2));
  }
}

TEST(Basis, GradedLexicographicOrderWithVacuumFirst) {
  const ModeSet modes = build_modes(desk_params(), 1, 6);
  const FockBasis b = build_basis(modes, 1, 3);
  EXPECT_EQ(b[0].total_bosons(), 0u);
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LT(b[i - 1], b[i]);
  EXPECT_EQ(b.sector_sizes(), (std::vector<std::size_t>{1, 6, 21, 56}));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.find(b[i]), i);
  EXPECT_FALSE(b.find(OccState({7})));
}

TEST(Basis, OccupationAlgebra) {
  const OccState s({1, 1, 4});
  EXPECT_EQ(s.occupation(1), 2u);
  EXPECT_EQ(s.occupation(2), 0u);
  EXPECT_EQ(s.raised(2), OccState({1, 1, 2, 4}));
  EXPECT_EQ(s.raised(1).occupation(1), 3u);
  EXPECT_EQ(OccState::from_occupations({{1, 2}, {4, 1}}), s);
  EXPECT_EQ(s.occupations(), (std::vector<std::pair<std::uint32_t, std::uint32_t>>{{1, 2}, {4, 1}}));
}

TEST(Basis, CapAndScaleAreEnforced) {
  const ModeSet modes = build_modes(desk_params(), 1, 6);
  EXPECT_THROW(build_basis(modes, 6, 2, 700), BasisTooLarge);
  EXPECT_THROW(build_basis(modes, 7, 2), InvalidParameters);
  EXPECT_THROW(build_basis(modes, 2, -1), InvalidParameters);
}

TEST(Basis, EmbeddingKeepsStates) {
  const ModeSet modes = build_modes(desk_params(), 1, 6);
  const FockBasis b2 = build_basis(modes, 2, 2);
  const FockBasis b3 = build_basis(modes, 3, 2);
  const auto map = embedding(b2, b3);
  ASSERT_EQ(map.size(), b2.size());
  for (std::size_t i = 0; i < map.size(); ++i) EXPECT_EQ(b3[map[i]], b2[i]);
  EXPECT_THROW(embedding(b3, b2), DimensionMismatch);
  const ModeSet other = build_modes(desk_params(), 1, 8);
  EXPECT_THROW(embedding(build_basis(other, 1, 2), b3), DimensionMismatch);
}

TEST(Basis, FieldMomentumAndEnergy) {
  const ModelParams p = desk_params();
  const ModeSet modes = build_modes(p, 1, 6);
  // modes 0 and 1 are the +z / -z directions of shell 1
  const OccState s({0, 1});
  EXPECT_NEAR(field_momentum(s, modes).norm(), 0.0, 1e-14);
  EXPECT_NEAR(field_energy(s, modes, p), 2.0 * omega(modes[0].radius(), p.mu), 1e-14);
  EXPECT_NEAR(field_momentum(OccState({0, 0}), modes).z, 2.0 * modes[0].radius(), 1e-14);
}
