#pragma once

// Ground state and gap by thick-restart Lanczos, shifted solves by
// preconditioned COCG, and the two realizations of the Riesz projector:
// trapezoidal contour quadrature and the Neumann series in one slice.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "yukawa/errors.hpp"
#include "yukawa/hamiltonian.hpp"
#include "yukawa/parallel.hpp"

namespace yukawa {

struct SolverOptions {
  double tol_eig = 1e-10;            // absolute eigen-residual target
  double tol_lin = 1e-12;            // relative residual of shifted solves
  double tol_proj = 1e-10;           // relative change between quadrature doublings
  int max_iter = 20000;              // matrix-vector products per eigen or linear solve
  int krylov_dim = 72;               // Lanczos basis size before a restart
  std::uint64_t seed = 20240611;     // start-vector generator seed
  int contour_points_init = 16;
  int contour_points_max = 256;
  double degeneracy_rel = 1e-10;     // gap < degeneracy_rel * |H| counts as degenerate
  int neumann_max_order = 400;
  int power_max_iter = 400;
  double power_tol = 1e-7;
  int jobs = 1;                      // threads for independent solves inside one step
};

/// Deterministic uniform(-1/2, 1/2) vector, independent of the standard library's distributions.
inline Vector seeded_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  }
  return v;
}

struct EigenPair {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  int iterations = 0;  // matrix-vector products
};

namespace detail {

inline void orthogonalize(Vector& r, const Eigen::MatrixXd& basis, Eigen::Index cols,
                          const std::vector<Vector>& locked) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : locked) r -= u.dot(r) * u;
    if (cols > 0) {
      const auto v = basis.leftCols(cols);
      r -= v * (v.transpose() * r);
    }
  }
}

template <SymmetricOperator Op>
double operator_norm_estimate(const Op& op) {
  if constexpr (requires { op.matrix().norm_bound(); }) {
    return op.matrix().norm_bound();
  } else if constexpr (requires { op.norm_bound(); }) {
    return op.norm_bound();
  } else {
    return op.diagonal().cwiseAbs().maxCoeff();
  }
}

template <SymmetricOperator Op>
bool is_diagonal(const Op& op) {
  if constexpr (requires { op.matrix().offdiag_empty(); }) {
    return op.matrix().offdiag_empty();
  } else if constexpr (requires { op.offdiag_empty(); }) {
    return op.offdiag_empty();
  } else {
    return false;
  }
}

/// Exact lowest diagonal entry outside the coordinate directions in `locked`; nullopt when
/// some locked vector is not a coordinate vector.
inline std::optional<EigenPair> diagonal_lowest(const Vector& diag, const std::vector<Vector>& locked) {
  std::vector<char> taken(static_cast<std::size_t>(diag.size()), 0);
  for (const auto& u : locked) {
    Eigen::Index at = -1;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u[i] == 0.0) continue;
      if (at >= 0) return std::nullopt;
      at = i;
    }
    if (at < 0) return std::nullopt;
    taken[static_cast<std::size_t>(at)] = 1;
  }
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!taken[static_cast<std::size_t>(i)] && (best < 0 || diag[i] < diag[best])) best = i;
  }
  if (best < 0) return std::nullopt;
  EigenPair p;
  p.value = diag[best];
  p.vector = Vector::Zero(diag.size());
  p.vector[best] = 1.0;
  return p;
}

/// Lowest eigenpair of `op` on the orthogonal complement of `locked` (orthonormal).
template <SymmetricOperator Op>
EigenPair lanczos_lowest(const Op& op, const std::vector<Vector>& locked, const SolverOptions& opt,
                         std::uint64_t seed) {
  const Eigen::Index n = op.dim();
  const Eigen::Index free_dim = n - static_cast<Eigen::Index>(locked.size());
  if (free_dim <= 0) throw SolverError("no vectors left outside the deflation space", 0.0);
  if (is_diagonal(op)) {
    if (auto exact = diagonal_lowest(op.diagonal(), locked)) return *exact;
  }

  const double op_norm = operator_norm_estimate(op);
  const double tol = std::max(opt.tol_eig, 64.0 * std::numeric_limits<double>::epsilon() * op_norm);
  const Eigen::Index m = std::min<Eigen::Index>(std::max(opt.krylov_dim, 8), free_dim);
  const Eigen::Index keep = std::max<Eigen::Index>(1, m / 2);

  Eigen::MatrixXd V(n, m);
  Eigen::MatrixXd W(n, m);
  std::uint64_t stream = seed;
  auto fresh = [&](Eigen::Index cols) -> std::optional<Vector> {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Vector r = seeded_vector(n, stream++);
      orthogonalize(r, V, cols, locked);
      const double nr = r.norm();
      if (nr > 1e-8) return Vector(r / nr);
    }
    return std::nullopt;
  };

  auto start = fresh(0);
  if (!start) throw SolverError("could not build a start vector", 0.0);
  V.col(0) = *start;
  Eigen::Index cols = 1;
  Eigen::Index applied = 0;
  int matvecs = 0;
  double best_residual = std::numeric_limits<double>::infinity();

  Vector w(n);
  while (true) {
    bool exhausted = false;
    while (true) {
      for (; applied < cols; ++applied) {
        Vector x = V.col(applied);
        op.apply_into(x, w);
        for (const auto& u : locked) w -= u.dot(w) * u;
        W.col(applied) = w;
        ++matvecs;
      }
      if (cols == m) break;
      Vector r = W.col(cols - 1);
      const double scale = r.norm();
      orthogonalize(r, V, cols, locked);
      const double nr = r.norm();
      if (nr > 1e-10 * std::max(scale, 1e-300)) {
        V.col(cols++) = r / nr;
      } else if (auto f = fresh(cols)) {
        V.col(cols++) = *f;
      } else {
        exhausted = true;
        break;
      }
    }

    const auto Vc = V.leftCols(cols);
    const auto Wc = W.leftCols(cols);
    Eigen::MatrixXd T = Vc.transpose() * Wc;
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Vector s = es.eigenvectors().col(0);
    const double theta = es.eigenvalues()[0];
    Vector x = Vc * s;
    const double xn = x.norm();
    x /= xn;
    const Vector hx = (Wc * s) / xn;
    const double res = (hx - theta * x).norm();
    best_residual = std::min(best_residual, res);
    // a Krylov space spanning the whole free space makes the Ritz pair exact
    if (res <= tol || exhausted || cols == free_dim) return {theta, x, res, matvecs};
    if (matvecs >= opt.max_iter) break;

    // thick restart: keep the lowest Ritz vectors plus the continuation direction
    Vector cont = W.col(cols - 1);
    orthogonalize(cont, V, cols, locked);
    const double cn = cont.norm();
    const Eigen::Index k = std::min(keep, cols - 1);
    const Eigen::MatrixXd S = es.eigenvectors().leftCols(k);
    Eigen::MatrixXd Vk = Vc * S;
    Eigen::MatrixXd Wk = Wc * S;
    V.leftCols(k) = Vk;
    W.leftCols(k) = Wk;
    cols = k;
    applied = k;
    // re-orthonormalize the kept block against drift
    for (Eigen::Index c = 0; c < k; ++c) {
      Vector col = V.col(c);
      const double before = col.norm();
      V.col(c) = col / before;
      W.col(c) /= before;
    }
    if (cn > 1e-12) {
      cont /= cn;
      orthogonalize(cont, V, cols, locked);
      V.col(cols++) = cont.normalized();
    } else if (auto f = fresh(cols)) {
      V.col(cols++) = *f;
    }
  }
  throw SolverError("Lanczos did not converge within " + std::to_string(opt.max_iter) +
                        " operator applications",
                    best_residual);
}

}  // namespace detail

struct GroundResult {
  double energy = 0.0;
  Vector vector;
  double gap = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;
  int iterations = 0;
};

/// Lowest eigenpair; the vector is normalized with its largest-magnitude entry positive.
template <SymmetricOperator Op>
GroundResult ground_state(const Op& op, const SolverOptions& opt = {}) {
  if (!(opt.tol_eig > 0.0)) throw InvalidParameters("tol_eig must be positive");
  if (op.dim() == 1) {
    Vector v = Vector::Ones(1);
    return {op.diagonal()[0], v, std::numeric_limits<double>::infinity(), 0.0, 0};
  }
  EigenPair p = detail::lanczos_lowest(op, {}, opt, opt.seed);
  Eigen::Index imax = 0;
  p.vector.cwiseAbs().maxCoeff(&imax);
  if (p.vector[imax] < 0) p.vector = -p.vector;
  return {p.value, p.vector, std::numeric_limits<double>::quiet_NaN(), p.residual, p.iterations};
}

/// Lowest eigenvalue on the complement of a known ground vector.
template <SymmetricOperator Op>
EigenPair second_eigenpair(const Op& op, const Vector& ground, const SolverOptions& opt = {}) {
  return detail::lanczos_lowest(op, {ground.normalized()}, opt, opt.seed ^ 0x5bd1e995ull);
}

/// Ground state together with the spectral gap; throws DegenerateGroundState.
template <SymmetricOperator Op>
GroundResult ground_and_gap(const Op& op, const SolverOptions& opt = {}) {
  GroundResult g = ground_state(op, opt);
  if (op.dim() == 1) return g;
  const EigenPair second = second_eigenpair(op, g.vector, opt);
  g.gap = std::max(0.0, second.value - g.energy);
  g.iterations += second.iterations;
  const double scale = std::max(1.0, detail::operator_norm_estimate(op));
  if (g.gap < opt.degeneracy_rel * scale) throw DegenerateGroundState(g.gap);
  return g;
}

template <SymmetricOperator Op>
double gap(const Op& op, const SolverOptions& opt = {}) {
  return ground_and_gap(op, opt).gap;
}

struct LinearSolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (H - z) x = b with Jacobi-preconditioned conjugate-orthogonal CG
/// (plain PCG when everything is real).
template <SymmetricOperator Op, class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> resolvent_solve(const Op& op, Scalar z,
                                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                                                         double tol, int max_iter = 20000,
                                                         LinearSolveInfo* info = nullptr) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (b.size() != op.dim()) {
    throw DimensionMismatch("right-hand side of size " + std::to_string(b.size()) +
                            " for operator of size " + std::to_string(op.dim()));
  }
  const double bnorm = b.norm();
  Vec x = Vec::Zero(b.size());
  if (bnorm == 0.0) {
    if (info) *info = {0, 0.0};
    return x;
  }
  Vec inv_diag(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const Scalar d = Scalar(op.diagonal()[i]) - z;
    inv_diag[i] = std::abs(d) > 1e-300 ? Scalar(1) / d : Scalar(1);
  }
  auto apply_shifted = [&](const Vec& v, Vec& out) {
    op.apply_into(v, out);
    out -= z * v;
  };

  Vec r = b;
  Vec s = inv_diag.cwiseProduct(r);
  Vec p = s;
  Vec q(b.size());
  Scalar rho = r.transpose() * s;
  double best = 1.0;
  Vec best_x = x;
  for (int it = 1; it <= max_iter; ++it) {
    apply_shifted(p, q);
    const Scalar mu = p.transpose() * q;
    if (std::abs(mu) < 1e-300 || std::abs(rho) < 1e-300) {
      throw SolverError("shifted solve broke down (shift close to the spectrum)", best);
    }
    const Scalar alpha = rho / mu;
    x += alpha * p;
    r -= alpha * q;
    const double rel = r.norm() / bnorm;
    if (rel < best) {
      best = rel;
      best_x = x;
    }
    if (rel <= tol) {
      // confirm with the true residual to rule out recurrence drift
      Vec check(b.size());
      apply_shifted(x, check);
      const double true_rel = (b - check).norm() / bnorm;
      if (true_rel <= 10.0 * tol) {
        if (info) *info = {it, true_rel};
        return x;
      }
      r = b - check;
    }
    s = inv_diag.cwiseProduct(r);
    const Scalar rho_new = r.transpose() * s;
    p = s + (rho_new / rho) * p;
    rho = rho_new;
  }
  throw SolverError("shifted solve hit the iteration cap of " + std::to_string(max_iter), best);
}

template <SymmetricOperator Op>
CVector resolvent_solve(const Op& op, Complex z, const Vector& b, double tol, int max_iter = 20000,
                        LinearSolveInfo* info = nullptr) {
  return resolvent_solve<Op, Complex>(op, z, CVector(b.cast<Complex>()), tol, max_iter, info);
}

/// Circle of the Riesz projector.
struct Contour {
  double center = 0.0;
  double radius = 0.0;
  int quad_points = 16;

  void validate() const {
    if (!(radius > 0.0)) throw InvalidParameters("contour radius must be positive");
    if (quad_points < 8 || quad_points % 2 != 0) {
      throw InvalidParameters("contour quad_points must be even and >= 8");
    }
  }
  Complex point(int k, int m) const {
    const double t = 2.0 * std::numbers::pi * (k + 0.5) / m;
    return {center + radius * std::cos(t), radius * std::sin(t)};
  }
  /// Radius-scaled distance of x to the circle.
  double relative_distance(double x) const { return std::abs(std::abs(x - center) - radius) / radius; }
};

struct ProjectorResult {
  Vector vector;
  int quad_points = 0;
  double last_change = 0.0;  // relative change at the final doubling
  std::vector<std::string> warnings;
};

namespace detail {

/// -(1/2 pi i) sum over the M-point trapezoid rule, folding conjugate pairs:
/// only the upper half of the circle is solved and the result is real.
template <class Resolvent>
Vector trapezoid_projection(const Contour& c, int m, Eigen::Index dim, const Resolvent& resolve,
                            int jobs) {
  const int half = m / 2;
  std::vector<Vector> parts(static_cast<std::size_t>(half));
  parallel_for(static_cast<std::size_t>(half), jobs, [&](std::size_t k) {
    const Complex z = c.point(static_cast<int>(k), m);
    const Complex phase = (z - c.center) / c.radius;
    const CVector x = resolve(z);
    parts[k] = (phase * x).real();
  });
  Vector sum = Vector::Zero(dim);
  for (const auto& p : parts) sum += p;
  return (-2.0 * c.radius / m) * sum;
}

template <class Resolvent>
ProjectorResult converge_projection(const Contour& contour, Eigen::Index dim, const Resolvent& resolve,
                                    const SolverOptions& opt) {
  contour.validate();
  ProjectorResult out;
  int m = std::max(contour.quad_points, opt.contour_points_init);
  if (m % 2) ++m;
  Vector prev = trapezoid_projection(contour, m, dim, resolve, opt.jobs);
  double change = std::numeric_limits<double>::infinity();
  while (2 * m <= opt.contour_points_max) {
    m *= 2;
    Vector next = trapezoid_projection(contour, m, dim, resolve, opt.jobs);
    const double scale = std::max(next.norm(), 1e-300);
    change = (next - prev).norm() / scale;
    // an absolute floor covers the case where the projection itself vanishes
    const bool settled = change <= opt.tol_proj || (next - prev).norm() <= opt.tol_proj;
    prev = std::move(next);
    if (settled) {
      out.vector = std::move(prev);
      out.quad_points = m;
      out.last_change = change;
      return out;
    }
  }
  throw QuadratureError("contour quadrature did not settle by " + std::to_string(opt.contour_points_max) +
                        " points (last relative change " + std::to_string(change) + ")");
}

inline std::vector<std::string> conditioning_warnings(const Contour& c,
                                                      const std::vector<double>& known_eigenvalues) {
  std::vector<std::string> out;
  for (double e : known_eigenvalues) {
    if (std::isfinite(e) && c.relative_distance(e) < 0.1) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "eigenvalue %.12g lies within 10%% of the radius from the contour (center %.12g, radius %.6g)",
                    e, c.center, c.radius);
      out.emplace_back(buf);
    }
  }
  return out;
}

}  // namespace detail

/// Trapezoidal -(1/2 pi i) \oint (H - z)^{-1} v dz, doubling the point count until settled.
/// `known_eigenvalues` are only used for the conditioning warning.
template <SymmetricOperator Op>
ProjectorResult contour_projector(const Op& op, const Contour& contour, const Vector& v,
                                  const SolverOptions& opt = {},
                                  const std::vector<double>& known_eigenvalues = {}) {
  if (v.size() != op.dim()) throw DimensionMismatch("projector input has the wrong size");
  const CVector cv = v.cast<Complex>();
  auto resolve = [&](Complex z) { return resolvent_solve<Op, Complex>(op, z, cv, opt.tol_lin, opt.max_iter); };
  ProjectorResult out = detail::converge_projection(contour, op.dim(), resolve, opt);
  out.warnings = detail::conditioning_warnings(contour, known_eigenvalues);
  return out;
}

struct SeriesReport {
  std::vector<double> term_norms;  // max over contour points of the order-j term norm
  int max_order = 0;               // highest order used at any point
  double fitted_ratio = std::numeric_limits<double>::quiet_NaN();  // geometric fit of term norms
};

struct NeumannResult {
  ProjectorResult projection;
  SeriesReport series;
};

namespace detail {

inline double geometric_ratio(const std::vector<double>& norms) {
  // least-squares slope of log(norm) against order, skipping the zeroth term
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 1; j < norms.size(); ++j) {
    if (!(norms[j] > 0.0)) continue;
    const double x = static_cast<double>(j), y = std::log(norms[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace detail

/// Same projection as contour_projector on op_prev + slice, with each resolvent
/// expanded as R_prev sum_j (-slice R_prev)^j. Throws SeriesDivergence.
template <SymmetricOperator OpPrev, SymmetricOperator Slice>
NeumannResult neumann_projector(const OpPrev& op_prev, const Slice& slice, const Contour& contour,
                                const Vector& v, const SolverOptions& opt = {},
                                const std::vector<double>& known_eigenvalues = {}) {
  if (v.size() != op_prev.dim() || slice.dim() != op_prev.dim()) {
    throw DimensionMismatch("Neumann projector operands have inconsistent sizes");
  }
  const CVector cv = v.cast<Complex>();
  std::mutex report_mutex;
  SeriesReport report;

  auto resolve = [&](Complex z) {
    std::vector<double> norms;
    CVector term = resolvent_solve<OpPrev, Complex>(op_prev, z, cv, opt.tol_lin, opt.max_iter);
    CVector sum = term;
    norms.push_back(term.norm());
    CVector tmp(term.size());
    int rising = 0;
    int order = 0;
    while (true) {
      const double tn = norms.back();
      if (tn <= opt.tol_lin * std::max(sum.norm(), 1e-300) || tn == 0.0) break;
      if (order >= opt.neumann_max_order) {
        throw SeriesDivergence("Neumann series did not reach tolerance by order " +
                                   std::to_string(order),
                               order);
      }
      slice.apply_into(term, tmp);
      tmp = -tmp;
      term = resolvent_solve<OpPrev, Complex>(op_prev, z, tmp, opt.tol_lin, opt.max_iter);
      ++order;
      sum += term;
      norms.push_back(term.norm());
      rising = norms.back() >= norms[norms.size() - 2] ? rising + 1 : 0;
      if (rising >= 3) {
        throw SeriesDivergence("Neumann series terms stopped decreasing at order " +
                                   std::to_string(order) + " (slice too strong for this shell)",
                               order);
      }
    }
    {
      std::lock_guard lock(report_mutex);
      if (norms.size() > report.term_norms.size()) report.term_norms.resize(norms.size(), 0.0);
      for (std::size_t j = 0; j < norms.size(); ++j) {
        report.term_norms[j] = std::max(report.term_norms[j], norms[j]);
      }
      report.max_order = std::max(report.max_order, order);
    }
    return sum;
  };
  NeumannResult out;
  out.projection = detail::converge_projection(contour, op_prev.dim(), resolve, opt);
  out.projection.warnings = detail::conditioning_warnings(contour, known_eigenvalues);
  report.fitted_ratio = detail::geometric_ratio(report.term_norms);
  out.series = std::move(report);
  return out;
}

/// Spectral radius of (H_prev - z)^{-1} slice from the Ritz values of an Arnoldi
/// recursion; stops once the largest Ritz modulus settles to power_tol.
template <SymmetricOperator OpPrev, SymmetricOperator Slice>
double contraction_norm(const OpPrev& op_prev, const Slice& slice, Complex z, const SolverOptions& opt = {}) {
  if (slice.dim() != op_prev.dim()) throw DimensionMismatch("slice and operator sizes differ");
  const Eigen::Index n = op_prev.dim();
  const Eigen::Index kmax = std::min<Eigen::Index>(n, std::max(2, opt.power_max_iter));
  Eigen::MatrixXcd v(n, kmax + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(kmax + 1, kmax);
  CVector tmp(n);
  v.col(0) = seeded_vector(n, opt.seed ^ 0x9e3779b97f4a7c15ull).cast<Complex>().normalized();
  double prev = -1.0;
  double estimate = 0.0;
  int settled = 0;
  for (Eigen::Index k = 0; k < kmax; ++k) {
    slice.apply_into(CVector(v.col(k)), tmp);
    CVector w = tmp.norm() == 0.0 ? CVector(CVector::Zero(n))
                                  : resolvent_solve<OpPrev, Complex>(op_prev, z, tmp, opt.tol_lin * 100.0, opt.max_iter);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i <= k; ++i) {
        const Complex c = v.col(i).dot(w);
        h(i, k) += c;
        w -= c * v.col(i);
      }
    }
    h(k + 1, k) = w.norm();
    const Eigen::MatrixXcd hk = h.topLeftCorner(k + 1, k + 1);
    estimate = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(hk, false).eigenvalues().cwiseAbs().maxCoeff();
    const double scale = std::max(estimate, std::abs(h(0, 0)));
    if (std::abs(h(k + 1, k)) <= 1e-12 * std::max(scale, 1e-300)) return estimate;  // invariant subspace
    if (prev >= 0.0 && std::abs(estimate - prev) <= opt.power_tol * estimate) {
      if (++settled >= 2) return estimate;
    } else {
      settled = 0;
    }
    prev = estimate;
    v.col(k + 1) = w / h(k + 1, k).real();
  }
  if (kmax == n) return estimate;
  throw SolverError("Arnoldi estimate of the contraction norm did not settle", estimate);
}

/// Largest contraction over four points on the upper half of the contour.
template <SymmetricOperator OpPrev, SymmetricOperator Slice>
double contraction_on_contour(const OpPrev& op_prev, const Slice& slice, const Contour& contour,
                              const SolverOptions& opt = {}) {
  std::vector<double> vals(4, 0.0);
  parallel_for(4, opt.jobs, [&](std::size_t k) {
    const double t = std::numbers::pi * (static_cast<double>(k) + 0.5) / 4.0;
    const Complex z{contour.center + contour.radius * std::cos(t), contour.radius * std::sin(t)};
    vals[k] = contraction_norm(op_prev, slice, z, opt);
  });
  return *std::max_element(vals.begin(), vals.end());
}

}  // namespace yukawa
