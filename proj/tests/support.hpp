#pragma once

// Shared fixtures: the reference desk instance and small hand-checkable setups.

#include <memory>

#include "yukawa/fock.hpp"
#include "yukawa/hamiltonian.hpp"
#include "yukawa/model.hpp"

namespace yukawa::testing {

/// m = 1, mu = 2, Lambda = 8, kappa = 1, N = 6, g = 0.03 (the library defaults).
inline ModelParams desk_params(double g = 0.03) {
  ModelParams p;
  p.g = g;
  return p;
}

inline constexpr Momentum3 kDeskP{0.0, 0.0, 0.2};

struct Setup {
  ModelParams params;
  std::shared_ptr<const ModeSet> modes;
  std::shared_ptr<const FockBasis> basis;
};

inline Setup make_setup(const ModelParams& params, int scale, int b_max = 2, int radial = 1, int angular = 6) {
  Setup s;
  s.params = params;
  s.modes = std::make_shared<const ModeSet>(build_modes(params, radial, angular));
  s.basis = std::make_shared<const FockBasis>(build_basis(*s.modes, scale, b_max));
  return s;
}

}  // namespace yukawa::testing
