#pragma once

// Discretized meson modes (radial Gauss-Legendre x antipodal angular rule per shell)
// and the truncated occupation-number basis used by every operator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "yukawa/errors.hpp"
#include "yukawa/model.hpp"

namespace yukawa {

struct Mode {
  Momentum3 k;
  double weight = 0.0;  // momentum-space volume element, includes the r^2 Jacobian
  int shell_index = 0;

  double radius() const { return k.norm(); }
};

struct AngularNode {
  Momentum3 direction;  // unit vector
  double weight = 0.0;  // solid-angle weight; a rule sums to 4 pi
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw InvalidParameters("radial_order must be >= 1");
  std::vector<double> x(order), w(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double pp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    {
      // derivative at the converged root
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = w[order - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return {x, w};
}

/// Antipodally symmetric spherical point sets. Supported sizes: 2, 6, 8, 12, 14, 26.
inline std::vector<AngularNode> angular_rule(int order) {
  constexpr double four_pi = 4.0 * std::numbers::pi;
  std::vector<AngularNode> out;
  auto push_all = [&](const std::vector<Momentum3>& dirs, double w) {
    for (const auto& d : dirs) out.push_back({(1.0 / d.norm()) * d, w});
  };
  const std::vector<Momentum3> axes = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0},
                                       {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  std::vector<Momentum3> cube;
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) cube.push_back({double(sx), double(sy), double(sz)});
  std::vector<Momentum3> edges;
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      edges.push_back({double(a), double(b), 0});
      edges.push_back({double(a), 0, double(b)});
      edges.push_back({0, double(a), double(b)});
    }

  switch (order) {
    case 2:
      push_all({{0, 0, 1}, {0, 0, -1}}, four_pi / 2);
      break;
    case 6:
      push_all(axes, four_pi / 6);
      break;
    case 8:
      push_all(cube, four_pi / 8);
      break;
    case 12: {
      const double phi = std::numbers::phi;
      std::vector<Momentum3> ico;
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          ico.push_back({0, double(a), b * phi});
          ico.push_back({double(a), b * phi, 0});
          ico.push_back({a * phi, 0, double(b)});
        }
      push_all(ico, four_pi / 12);
      break;
    }
    case 14:
      push_all(axes, four_pi / 15.0);
      push_all(cube, four_pi * 3.0 / 40.0);
      break;
    case 26:
      push_all(axes, four_pi / 21.0);
      push_all(edges, four_pi * 4.0 / 105.0);
      push_all(cube, four_pi * 27.0 / 840.0);
      break;
    default:
      throw InvalidParameters("angular_order " + std::to_string(order) +
                              " has no antipodally symmetric rule (supported: 2, 6, 8, 12, 14, 26)");
  }
  return out;
}

class ModeSet {
public:
  ModeSet() = default;
  ModeSet(std::vector<Mode> modes, int radial_order, int angular_order, int n_shells)
      : modes_(std::move(modes)), radial_order_(radial_order), angular_order_(angular_order),
        shell_end_(static_cast<std::size_t>(n_shells) + 1, 0) {
    for (std::size_t j = 0; j < modes_.size(); ++j) {
      if (j > 0 && modes_[j].shell_index < modes_[j - 1].shell_index) {
        throw InvalidParameters("modes must be ordered by shell");
      }
    }
    for (int n = 0; n <= n_shells; ++n) {
      shell_end_[n] = static_cast<std::size_t>(
          std::count_if(modes_.begin(), modes_.end(), [n](const Mode& md) { return md.shell_index <= n; }));
    }
    fingerprint_ = compute_fingerprint();
  }

  std::span<const Mode> modes() const { return modes_; }
  const Mode& operator[](std::size_t j) const { return modes_[j]; }
  std::size_t size() const { return modes_.size(); }
  int radial_order() const { return radial_order_; }
  int angular_order() const { return angular_order_; }
  int n_shells() const { return static_cast<int>(shell_end_.size()) - 1; }

  /// Modes with shell_index <= n occupy the index prefix [0, active_count(n)).
  std::size_t active_count(int n) const {
    if (n < 0) return 0;
    return shell_end_[static_cast<std::size_t>(std::min(n, n_shells()))];
  }
  /// Index range [first, last) of the modes of shell n.
  std::pair<std::size_t, std::size_t> shell_range(int n) const {
    return {active_count(n - 1), active_count(n)};
  }

  std::uint64_t fingerprint() const { return fingerprint_; }

private:
  std::uint64_t compute_fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    };
    for (const auto& md : modes_) {
      mix(&md.k.x, sizeof(double));
      mix(&md.k.y, sizeof(double));
      mix(&md.k.z, sizeof(double));
      mix(&md.weight, sizeof(double));
      mix(&md.shell_index, sizeof(int));
    }
    return h;
  }

  std::vector<Mode> modes_;
  int radial_order_ = 0;
  int angular_order_ = 0;
  std::vector<std::size_t> shell_end_;
  std::uint64_t fingerprint_ = 0;
};

/// Per shell: Gauss-Legendre radii on [Lambda gamma^n, Lambda gamma^{n-1}] times the angular rule.
inline ModeSet build_modes(const ModelParams& params, int radial_order, int angular_order) {
  const auto dirs = angular_rule(angular_order);
  const auto [x, w] = gauss_legendre(radial_order);
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(params.n_steps) * x.size() * dirs.size());
  for (const Shell& s : shells(params)) {
    const double half = 0.5 * s.width();
    const double mid = 0.5 * (s.upper + s.lower);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = mid + half * x[i];
      const double radial_weight = half * w[i] * r * r;
      for (const auto& d : dirs) {
        modes.push_back({r * d.direction, radial_weight * d.weight, s.index});
      }
    }
  }
  return ModeSet(std::move(modes), radial_order, angular_order, params.n_steps);
}

/// Occupation-number state stored as the sorted multiset of occupied mode indices.
class OccState {
public:
  OccState() = default;
  explicit OccState(std::vector<std::uint32_t> sorted_modes) : modes_(std::move(sorted_modes)) {}

  static OccState from_occupations(const std::map<std::uint32_t, std::uint32_t>& occ) {
    std::vector<std::uint32_t> ms;
    for (auto [j, c] : occ) ms.insert(ms.end(), c, j);
    return OccState(std::move(ms));
  }

  std::span<const std::uint32_t> modes() const { return modes_; }
  std::size_t total_bosons() const { return modes_.size(); }

  std::uint32_t occupation(std::uint32_t j) const {
    const auto [lo, hi] = std::equal_range(modes_.begin(), modes_.end(), j);
    return static_cast<std::uint32_t>(hi - lo);
  }

  /// (mode, count) pairs in ascending mode order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> occupations() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (auto j : modes_) {
      if (!out.empty() && out.back().first == j) {
        ++out.back().second;
      } else {
        out.push_back({j, 1});
      }
    }
    return out;
  }

  /// Highest occupied mode index + 1, or 0 for the vacuum.
  std::uint32_t mode_bound() const { return modes_.empty() ? 0 : modes_.back() + 1; }

  OccState raised(std::uint32_t j) const {
    std::vector<std::uint32_t> ms = modes_;
    ms.insert(std::upper_bound(ms.begin(), ms.end(), j), j);
    return OccState(std::move(ms));
  }

  friend bool operator==(const OccState&, const OccState&) = default;
  friend auto operator<=>(const OccState& a, const OccState& b) {
    if (a.modes_.size() != b.modes_.size()) return a.modes_.size() <=> b.modes_.size();
    return a.modes_ <=> b.modes_;
  }

private:
  std::vector<std::uint32_t> modes_;
};

struct OccStateHash {
  std::size_t operator()(const OccState& s) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ s.total_bosons();
    for (auto j : s.modes()) h = (h ^ j) * 0x100000001b3ull + (h >> 29);
    return h;
  }
};

/// Sum over boson counts b <= b_max of C(M + b - 1, b); saturates at SIZE_MAX.
inline std::size_t basis_cardinality(std::size_t active_modes, int b_max) {
  std::size_t total = 0;
  long double term = 1.0L;  // C(M + b - 1, b)
  for (int b = 0; b <= b_max; ++b) {
    if (b > 0) term = term * static_cast<long double>(active_modes + b - 1) / b;
    total += static_cast<std::size_t>(std::min<long double>(term, 1e18L));
    if (term > 1e18L) return SIZE_MAX;
  }
  return total;
}

class FockBasis {
public:
  std::size_t size() const { return states_.size(); }
  const OccState& operator[](std::size_t i) const { return states_[i]; }
  std::span<const OccState> states() const { return states_; }
  int scale() const { return scale_; }
  int b_max() const { return b_max_; }
  std::size_t active_modes() const { return active_modes_; }
  std::uint64_t mode_fingerprint() const { return mode_fingerprint_; }

  std::optional<std::size_t> find(const OccState& s) const {
    const auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Number of states per boson count 0..b_max.
  std::vector<std::size_t> sector_sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(b_max_) + 1, 0);
    for (const auto& s : states_) ++out[s.total_bosons()];
    return out;
  }

private:
  friend FockBasis build_basis(const ModeSet&, int, int, std::size_t);
  std::vector<OccState> states_;
  std::unordered_map<OccState, std::size_t, OccStateHash> index_;
  int scale_ = 0;
  int b_max_ = 0;
  std::size_t active_modes_ = 0;
  std::uint64_t mode_fingerprint_ = 0;
};

inline constexpr std::size_t kDefaultBasisCap = 200000;

/// All states over modes of shells <= n with at most b_max bosons,
/// graded by boson number then lexicographic. Index 0 is the vacuum.
inline FockBasis build_basis(const ModeSet& modes, int n, int b_max,
                             std::size_t cap = kDefaultBasisCap) {
  if (n < 0 || n > modes.n_shells()) {
    throw InvalidParameters("scale " + std::to_string(n) + " outside 0.." +
                            std::to_string(modes.n_shells()));
  }
  if (b_max < 0) throw InvalidParameters("b_max must be >= 0");
  const std::size_t active = modes.active_count(n);
  const std::size_t expected = basis_cardinality(active, b_max);
  if (expected > cap) throw BasisTooLarge(expected, cap);

  FockBasis basis;
  basis.scale_ = n;
  basis.b_max_ = b_max;
  basis.active_modes_ = active;
  basis.mode_fingerprint_ = modes.fingerprint();
  basis.states_.reserve(expected);

  std::vector<std::uint32_t> combo;
  for (int b = 0; b <= b_max; ++b) {
    if (b > 0 && active == 0) break;
    combo.assign(static_cast<std::size_t>(b), 0);
    while (true) {
      basis.states_.emplace_back(combo);
      // next multiset in lexicographic order
      int pos = b - 1;
      while (pos >= 0 && combo[pos] + 1 == active) --pos;
      if (pos < 0) break;
      const std::uint32_t v = combo[pos] + 1;
      for (int q = pos; q < b; ++q) combo[q] = v;
    }
  }
  basis.index_.reserve(basis.states_.size());
  for (std::size_t i = 0; i < basis.states_.size(); ++i) basis.index_.emplace(basis.states_[i], i);
  return basis;
}

/// Position in `next` of every state of `prev` (the psi -> psi (x) Omega identification).
inline std::vector<std::size_t> embedding(const FockBasis& prev, const FockBasis& next) {
  if (prev.mode_fingerprint() != next.mode_fingerprint()) {
    throw DimensionMismatch("bases were built from different mode sets");
  }
  std::vector<std::size_t> out(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const auto j = next.find(prev[i]);
    if (!j) throw DimensionMismatch("basis at scale " + std::to_string(prev.scale()) +
                                    " does not embed into scale " + std::to_string(next.scale()));
    out[i] = *j;
  }
  return out;
}

inline Momentum3 field_momentum(const OccState& state, const ModeSet& modes) {
  Momentum3 p;
  for (auto j : state.modes()) p += modes[j].k;
  return p;
}

inline double field_energy(const OccState& state, const ModeSet& modes, const ModelParams& params) {
  double e = 0.0;
  for (auto j : state.modes()) e += omega(modes[j].k, params.mu);
  return e;
}

inline nlohmann::json to_json(const ModeSet& modes) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& md : modes.modes()) {
    list.push_back({{"k", {md.k.x, md.k.y, md.k.z}}, {"weight", md.weight}, {"shell", md.shell_index}});
  }
  return {{"radial_order", modes.radial_order()},
          {"angular_order", modes.angular_order()},
          {"n_shells", modes.n_shells()},
          {"modes", std::move(list)}};
}

inline nlohmann::json to_json(const FockBasis& basis) {
  return {{"scale", basis.scale()},
          {"b_max", basis.b_max()},
          {"active_modes", basis.active_modes()},
          {"size", basis.size()},
          {"sector_sizes", basis.sector_sizes()}};
}

}  // namespace yukawa
