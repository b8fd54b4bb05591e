#pragma once

// Physical and scheme parameters of the spinless one-nucleon Yukawa model,
// the meson dispersion relation, the form factor and the momentum-shell ladder.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "yukawa/errors.hpp"

namespace yukawa {

struct Momentum3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Momentum3& operator+=(const Momentum3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Momentum3& operator-=(const Momentum3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  friend constexpr Momentum3 operator+(Momentum3 a, const Momentum3& b) { return a += b; }
  friend constexpr Momentum3 operator-(Momentum3 a, const Momentum3& b) { return a -= b; }
  friend constexpr Momentum3 operator-(const Momentum3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Momentum3 operator*(double s, const Momentum3& a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(const Momentum3&, const Momentum3&) = default;

  constexpr double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
};

/// Model and slicing constants. The fineness gamma is derived from
/// (lambda, kappa, n_steps) so that the shell ladder closes on kappa.
struct ModelParams {
  double m = 1.0;       // nucleon mass
  double mu = 2.0;      // meson mass
  double g = 0.03;      // coupling constant
  double lambda = 8.0;  // ultraviolet cutoff
  double kappa = 1.0;   // infrared cutoff
  int n_steps = 6;      // number of shells N
  double p_max = 0.3;   // bound on |P|
  double theta = 0.2;   // gap parameter
  double zeta = 0.45;   // gap parameter

  double gamma() const { return std::pow(kappa / lambda, 1.0 / n_steps); }

  /// Lambda * gamma^n, with the end points pinned to lambda and kappa.
  /// Consecutive shells share the same computed edge, so the ladder tiles exactly.
  double scale_edge(int n) const {
    if (n <= 0) return lambda;
    if (n == n_steps) return kappa;
    return lambda * std::pow(kappa / lambda, static_cast<double>(n) / n_steps);
  }

  /// Lambda * gamma^n for any integer n, including n > N (used by the gap bound).
  double scale_point(int n) const {
    if (n >= 0 && n <= n_steps) return scale_edge(n);
    return lambda * std::pow(gamma(), n);
  }
};

inline double omega(double k, double mu) { return std::sqrt(k * k + mu * mu); }
inline double omega(const Momentum3& k, double mu) { return std::sqrt(k.norm2() + mu * mu); }

/// Form factor (2 pi)^{-3/2} (2 omega(k))^{-1/2}.
inline double rho(double k, double mu) {
  constexpr double prefactor = 0.06349363593424097;  // (2 pi)^{-3/2}
  return prefactor / std::sqrt(2.0 * omega(k, mu));
}
inline double rho(const Momentum3& k, double mu) { return rho(k.norm(), mu); }

/// sqrt(P^2 + m^2), the free nucleon energy.
inline double free_energy(const Momentum3& p, double m) { return std::sqrt(p.norm2() + m * m); }

/// Shell n covers the radial interval (lower, upper] = (Lambda gamma^n, Lambda gamma^{n-1}].
struct Shell {
  int index = 0;
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double k) const { return k > lower && k <= upper; }
  double width() const { return upper - lower; }
};

inline std::vector<Shell> shells(const ModelParams& params) {
  std::vector<Shell> out;
  out.reserve(static_cast<std::size_t>(std::max(params.n_steps, 0)));
  for (int n = 1; n <= params.n_steps; ++n) {
    out.push_back({n, params.scale_edge(n), params.scale_edge(n - 1)});
  }
  return out;
}

inline Shell shell(const ModelParams& params, int n) {
  if (n < 1 || n > params.n_steps) {
    throw InvalidParameters("shell index " + std::to_string(n) + " outside 1.." +
                            std::to_string(params.n_steps));
  }
  return {n, params.scale_edge(n), params.scale_edge(n - 1)};
}

/// Gap lower bound zeta * omega(Lambda gamma^{n+1}) expected at scale n.
inline double gap_bound(const ModelParams& params, int n) {
  return params.zeta * omega(params.scale_point(n + 1), params.mu);
}

struct ConstraintCheck {
  std::string constraint;  // the inequality, e.g. "mu > 1"
  bool pass = true;
  std::string detail;
  bool overridden = false;  // failed, but accepted behind an explicit override
};

struct ValidationOverrides {
  bool allow_mu_le_1 = false;
};

/// Every model constraint with its pass/fail status.
inline std::vector<ConstraintCheck> check_constraints(const ModelParams& p,
                                                      ValidationOverrides overrides = {}) {
  std::vector<ConstraintCheck> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail), false});
  };
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  add("m > 0", p.m > 0.0, "m = " + num(p.m));
  {
    ConstraintCheck c{"mu > 1", p.mu > 1.0, "mu = " + num(p.mu), false};
    if (!c.pass && overrides.allow_mu_le_1 && p.mu > 0.0) {
      c.pass = true;
      c.overridden = true;
      c.detail += " (override: gap guarantees are unproven for mu <= 1)";
    }
    out.push_back(std::move(c));
  }
  add("|g| <= 1", std::abs(p.g) <= 1.0, "g = " + num(p.g));
  add("lambda > 1", p.lambda > 1.0, "lambda = " + num(p.lambda));
  add("0 < kappa < lambda", p.kappa > 0.0 && p.kappa < p.lambda, "kappa = " + num(p.kappa));
  add("n_steps >= 1", p.n_steps >= 1, "n_steps = " + std::to_string(p.n_steps));
  if (p.n_steps >= 1 && p.kappa > 0.0 && p.lambda > p.kappa) {
    const double g = p.gamma();
    add("gamma in (1/2, 1)", g > 0.5 && g < 1.0, "gamma = " + num(g));
  } else {
    add("gamma in (1/2, 1)", false, "gamma undefined");
  }
  add("0 < p_max < 1/2", p.p_max > 0.0 && p.p_max < 0.5, "p_max = " + num(p.p_max));
  add("theta in (1/8, 1/4)", p.theta > 0.125 && p.theta < 0.25, "theta = " + num(p.theta));
  add("zeta > 1/4", p.zeta > 0.25, "zeta = " + num(p.zeta));
  add("1 - theta - p_max >= zeta", 1.0 - p.theta - p.p_max >= p.zeta,
      "1 - theta - p_max = " + num(1.0 - p.theta - p.p_max) + ", zeta = " + num(p.zeta));
  return out;
}

struct Violation {
  std::string constraint;
  std::string detail;
};

/// Empty iff every constraint holds.
inline std::vector<Violation> validate(const ModelParams& p, ValidationOverrides overrides = {}) {
  std::vector<Violation> out;
  for (auto& c : check_constraints(p, overrides)) {
    if (!c.pass) out.push_back({c.constraint + " required", c.detail});
  }
  return out;
}

inline void require_valid(const ModelParams& p, ValidationOverrides overrides = {}) {
  const auto violations = validate(p, overrides);
  if (violations.empty()) return;
  std::string msg = "invalid model parameters:";
  for (const auto& v : violations) msg += " [" + v.constraint + ": " + v.detail + "]";
  throw InvalidParameters(msg);
}

/// Number of shells that keeps gamma close to `gamma_target` for a given cutoff.
inline int steps_for_gamma(double lambda, double kappa, double gamma_target) {
  const double n = std::log(lambda / kappa) / -std::log(gamma_target);
  return std::max(1, static_cast<int>(std::lround(n)));
}

}  // namespace yukawa
