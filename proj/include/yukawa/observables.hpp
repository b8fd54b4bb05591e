#pragma once

// State-level observables: the relativistic velocity operator (diagonal in the
// occupation basis), the Hellmann-Feynman velocity, the one-boson excitation
// vectors b_j^* psi and the auxiliary ladder scale Xi.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>

#include "yukawa/fock.hpp"
#include "yukawa/hamiltonian.hpp"
#include "yukawa/model.hpp"

namespace yukawa {

/// Diagonal of V_i(P) = (P_i - P^f_i) / sqrt((P - P^f)^2 + m^2), one column per component.
inline Eigen::MatrixX3d velocity_diagonals(const Momentum3& p, const FockBasis& basis, const ModeSet& modes,
                                           const ModelParams& params) {
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(basis.size()), 3);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const Momentum3 q = p - field_momentum(basis[s], modes);
    const double e = free_energy(q, params.m);
    for (int i = 0; i < 3; ++i) out(Eigen::Index(s), i) = q[i] / e;
  }
  return out;
}

/// <psi, V(P) psi> / <psi, psi>.
inline Momentum3 hf_velocity(const Vector& state, const Momentum3& p, const FockBasis& basis,
                             const ModeSet& modes, const ModelParams& params) {
  if (state.size() != static_cast<Eigen::Index>(basis.size())) {
    throw DimensionMismatch("state does not live on the given basis");
  }
  const Eigen::MatrixX3d v = velocity_diagonals(p, basis, modes, params);
  const Vector w = state.cwiseAbs2();
  const double nrm = w.sum();
  if (!(nrm > 0.0)) throw DimensionMismatch("velocity of a zero vector");
  Momentum3 out;
  for (int i = 0; i < 3; ++i) out[i] = w.dot(v.col(i)) / nrm;
  return out;
}

/// b_j^* psi for a vector on `from`, expressed on `to` (which must contain every raised state
/// that survives the boson cap). Components pushed above b_max are dropped.
inline Vector raise_mode(const Vector& psi, const FockBasis& from, const FockBasis& to, std::uint32_t j) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(to.size()));
  for (std::size_t s = 0; s < from.size(); ++s) {
    const double c = psi[Eigen::Index(s)];
    if (c == 0.0) continue;
    const OccState& st = from[s];
    if (static_cast<int>(st.total_bosons()) >= to.b_max()) continue;
    const auto t = to.find(st.raised(j));
    if (!t) throw DimensionMismatch("raised state missing from the target basis");
    out[Eigen::Index(*t)] += std::sqrt(static_cast<double>(st.occupation(j)) + 1.0) * c;
  }
  return out;
}

/// b_j psi on a single basis.
inline Vector lower_mode(const Vector& psi, const FockBasis& basis, std::uint32_t j) {
  Vector out = Vector::Zero(psi.size());
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const double c = psi[Eigen::Index(s)];
    if (c == 0.0) continue;
    const OccState& st = basis[s];
    const std::uint32_t occ = st.occupation(j);
    if (occ == 0) continue;
    std::vector<std::uint32_t> ms(st.modes().begin(), st.modes().end());
    ms.erase(std::find(ms.begin(), ms.end(), j));
    const auto t = basis.find(OccState(std::move(ms)));
    out[Eigen::Index(*t)] += std::sqrt(static_cast<double>(occ)) * c;
  }
  return out;
}

/// Ladder point Lambda gamma^l with Lambda gamma^l <= min{Lambda, Lambda gamma^{n-1} / g^eps} < Lambda gamma^{l-1}.
inline double xi_scale(const ModelParams& params, int n, double g, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw InvalidParameters("xi_scale needs 0 < epsilon <= 1/2");
  const double boost = std::pow(std::abs(g), epsilon);
  const double raw = params.scale_point(n - 1);
  const double target = boost > 0.0 ? std::min(params.lambda, raw / boost) : params.lambda;
  const double x = std::log(target / params.lambda) / std::log(params.gamma());
  const int l = std::max(0, static_cast<int>(std::ceil(x - 1e-12)));
  return params.scale_point(l);
}

}  // namespace yukawa
