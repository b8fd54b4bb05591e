#pragma once

// Shell-by-shell construction: Psi_0 = Omega, Psi_n = Q_n Psi_{n-1}, where Q_n is
// the Riesz projector of H_{P,n} on the circle centered at E_{P,n-1}. Each step
// records energies, gaps, the second-order quantities alpha and Delta E, and
// projector diagnostics.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "yukawa/errors.hpp"
#include "yukawa/fock.hpp"
#include "yukawa/hamiltonian.hpp"
#include "yukawa/model.hpp"
#include "yukawa/observables.hpp"
#include "yukawa/parallel.hpp"
#include "yukawa/spectral.hpp"

namespace yukawa {

enum class Backend { contour, neumann };
enum class GapPolicy { warn, error };

inline std::string to_string(Backend b) { return b == Backend::contour ? "contour" : "neumann"; }
inline Backend parse_backend(const std::string& s) {
  if (s == "contour") return Backend::contour;
  if (s == "neumann") return Backend::neumann;
  throw InvalidParameters("unknown backend '" + s + "' (expected contour or neumann)");
}
inline std::string to_string(GapPolicy g) { return g == GapPolicy::warn ? "warn" : "error"; }
inline GapPolicy parse_gap_policy(const std::string& s) {
  if (s == "warn") return GapPolicy::warn;
  if (s == "error") return GapPolicy::error;
  throw InvalidParameters("unknown gap policy '" + s + "' (expected warn or error)");
}

struct Discretization {
  int radial_order = 1;
  int angular_order = 6;
  int b_max = 2;
  std::size_t basis_cap = kDefaultBasisCap;
};

struct TrajectoryOptions {
  Backend backend = Backend::contour;
  GapPolicy gap_policy = GapPolicy::warn;
  SolverOptions solver;
  bool compute_contraction = true;
  bool compute_ab = false;
  bool allow_p_beyond_max = false;
  double eps_zero = 1e-6;     // collapse threshold, relative to the incoming norm
  double gap_tol = 1e-8;      // slack of the gap-ladder check
  double monotone_tol = 1e-10;
};

struct ABValues {
  Momentum3 a;
  Momentum3 b;
};

struct ScaleRecord {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  int n = 0;
  double lambda_n = 0.0;        // Lambda gamma^n
  double energy = nan;          // E_{P,n} from the direct eigensolve
  double gap = nan;             // gap of H_{P,n} on F_n
  double gap_bound = nan;       // zeta omega(Lambda gamma^{n+1})
  double gap_prev_on_next = nan;  // gap of H_{P,n-1} on F_n
  double gap_prev_bound = nan;    // zeta omega(Lambda gamma^n)
  double norm_sq = 1.0;         // |Psi_{P,n}|^2
  double norm_ratio = nan;      // |Psi_n|^2 / |Psi_{n-1}|^2
  double alpha = nan;
  double delta_e = nan;
  double contraction = nan;
  Backend backend = Backend::contour;
  double center = nan;
  double radius = nan;
  bool radius_fallback = false;
  int quad_points = 0;
  int neumann_order = 0;
  double neumann_ratio = nan;
  std::vector<double> neumann_terms;
  double rayleigh = nan;        // <Psi_n, H Psi_n> / |Psi_n|^2
  double overlap = nan;         // |<Psi_n^hat, ground vector>|
  Momentum3 velocity;           // Hellmann-Feynman velocity of the scale-n ground state
  std::size_t basis_size = 1;
  double eig_residual = 0.0;
  std::optional<ABValues> ab;
  std::vector<std::string> warnings;
};

struct Trajectory {
  ModelParams params;
  Momentum3 p;
  Discretization disc;
  TrajectoryOptions options;
  std::vector<ScaleRecord> records;
  Vector final_state;  // unit vector on the scale-N basis
  std::shared_ptr<const FockBasis> final_basis;
  std::shared_ptr<const ModeSet> modes;

  double final_energy() const { return records.back().energy; }
};

/// Sum of w_j rho_j^2 / omega_j over all modes: E_{P,n} >= -g^2 S_total.
inline double s_total(const ModeSet& modes, const ModelParams& params) {
  return completed_square_constant(modes, params, modes.n_shells());
}

/// H + sigma psi psi^T, used to solve on the complement of a known kernel direction.
class RankOneShifted {
public:
  RankOneShifted(const FiberOperator& op, Vector psi, double sigma)
      : op_(op), psi_(std::move(psi)), sigma_(sigma), diag_(op.diagonal() + sigma * psi_.cwiseAbs2()) {}

  Eigen::Index dim() const { return op_.dim(); }
  const Vector& diagonal() const { return diag_; }
  double norm_bound() const { return op_.matrix().norm_bound() + std::abs(sigma_); }
  template <class Scalar>
  void apply_into(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) const {
    op_.apply_into(x, y);
    const Scalar c = psi_.cast<Scalar>().dot(x);
    y += (sigma_ * c) * psi_.cast<Scalar>();
  }

private:
  const FiberOperator& op_;
  Vector psi_;
  double sigma_;
  Vector diag_;
};

struct SecondOrder {
  double alpha = 0.0;
  double delta_e = 0.0;
  std::vector<Vector> excitations;  // y_j = b_j^* psi_hat, shell modes in order
  std::vector<Vector> resolved;     // x_j = (H_prev - E_prev)^{-1} y_j
};

/// alpha = sum_j w_j rho_j^2 |R y_j|^2 and Delta E = g^2 sum_j w_j rho_j^2 <y_j, R y_j>,
/// with R = (H_{n-1} - E_{n-1})^{-1} on the scale-n basis. The shell modes occupy
/// disjoint invariant sectors, so one solve per mode is exact.
inline SecondOrder second_order(const Vector& psi_hat, const FiberOperator& op_prev, double e_prev, int n,
                                const ModelParams& params, const ModeSet& modes, const SolverOptions& opt,
                                bool keep_vectors = false) {
  const FockBasis& basis = *op_prev.basis();
  const auto [first, last] = modes.shell_range(n);
  const std::size_t count = last - first;
  std::vector<Vector> ys(count), xs(count);
  std::vector<double> a_terms(count, 0.0), e_terms(count, 0.0);
  parallel_for(count, opt.jobs, [&](std::size_t idx) {
    const std::size_t j = first + idx;
    Vector y = raise_mode(psi_hat, basis, basis, static_cast<std::uint32_t>(j));
    Vector x = resolvent_solve<FiberOperator, double>(op_prev, e_prev, y, opt.tol_lin, opt.max_iter);
    const double r = rho(modes[j].k, params.mu);
    const double wr2 = modes[j].weight * r * r;
    a_terms[idx] = wr2 * x.squaredNorm();
    e_terms[idx] = wr2 * y.dot(x);
    ys[idx] = std::move(y);
    xs[idx] = std::move(x);
  });
  SecondOrder out;
  for (std::size_t idx = 0; idx < count; ++idx) {
    out.alpha += a_terms[idx];
    out.delta_e += e_terms[idx];
  }
  out.delta_e *= params.g * params.g;
  if (keep_vectors) {
    out.excitations = std::move(ys);
    out.resolved = std::move(xs);
  }
  return out;
}

inline double compute_alpha(const Vector& psi_hat, const FiberOperator& op_prev, double e_prev, int n,
                            const ModelParams& params, const ModeSet& modes, const SolverOptions& opt = {}) {
  return second_order(psi_hat, op_prev, e_prev, n, params, modes, opt).alpha;
}

inline double compute_delta_e(const Vector& psi_hat, const FiberOperator& op_prev, double e_prev, int n,
                              const ModelParams& params, const ModeSet& modes, const SolverOptions& opt = {}) {
  return second_order(psi_hat, op_prev, e_prev, n, params, modes, opt).delta_e;
}

/// A_i = g^2 <R phi^* psi, V_i R phi^* psi> and
/// B_i = 2 g^2 Re <Q~perp R phi R phi^* psi, V_i psi>, with Q~ the contour projection
/// of H_{n-1} onto its ground direction.
inline ABValues ab_diagnostics(const Vector& psi_hat, const FiberOperator& op_prev, double e_prev,
                               const Contour& contour_prev, int n, const ModelParams& params,
                               const ModeSet& modes, const SolverOptions& opt) {
  const FockBasis& basis = *op_prev.basis();
  const SecondOrder so = second_order(psi_hat, op_prev, e_prev, n, params, modes, opt, true);
  const Eigen::MatrixX3d vdiag = velocity_diagonals(op_prev.p(), basis, modes, params);
  const auto [first, last] = modes.shell_range(n);
  const double g2 = params.g * params.g;

  ABValues out;
  Vector u = Vector::Zero(psi_hat.size());
  for (std::size_t idx = 0; idx < last - first; ++idx) {
    const std::size_t j = first + idx;
    const double r = rho(modes[j].k, params.mu);
    const double wr2 = modes[j].weight * r * r;
    const Vector& x = so.resolved[idx];
    for (int i = 0; i < 3; ++i) out.a[i] += g2 * wr2 * x.dot(vdiag.col(i).cwiseProduct(x));
    u += wr2 * lower_mode(x, basis, static_cast<std::uint32_t>(j));
  }
  const Vector u_par = contour_projector(op_prev, contour_prev, u, opt).vector;
  const Vector u_perp = u - u_par;
  const Vector psi = psi_hat.normalized();
  const RankOneShifted deflated(op_prev, psi, 1.0);
  Vector x = resolvent_solve<RankOneShifted, double>(deflated, e_prev, u_perp, opt.tol_lin, opt.max_iter);
  x -= psi.dot(x) * psi;
  for (int i = 0; i < 3; ++i) out.b[i] = 2.0 * g2 * x.dot(vdiag.col(i).cwiseProduct(psi_hat));
  return out;
}

namespace detail {

inline Vector embed_vector(const Vector& v, const std::vector<std::size_t>& map, std::size_t next_size) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(next_size));
  for (std::size_t i = 0; i < map.size(); ++i) out[Eigen::Index(map[i])] = v[Eigen::Index(i)];
  return out;
}

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace detail

/// Runs the induction n = 0..N at total momentum P.
inline Trajectory run_trajectory(const Momentum3& p, const ModelParams& params, const Discretization& disc,
                                 const TrajectoryOptions& options = {},
                                 ValidationOverrides overrides = {}) {
  require_valid(params, overrides);
  if (!options.allow_p_beyond_max && !(p.norm() < params.p_max)) {
    throw InvalidParameters("|P| = " + std::to_string(p.norm()) + " is not below p_max = " +
                            std::to_string(params.p_max));
  }
  const SolverOptions& opt = options.solver;
  AssembleOptions aopt{options.allow_p_beyond_max};

  Trajectory traj;
  traj.params = params;
  traj.p = p;
  traj.disc = disc;
  traj.options = options;
  auto modes = std::make_shared<const ModeSet>(build_modes(params, disc.radial_order, disc.angular_order));
  traj.modes = modes;

  // scale 0: F_0 = C Omega
  auto basis_prev = std::make_shared<const FockBasis>(build_basis(*modes, 0, disc.b_max, disc.basis_cap));
  Vector psi = Vector::Ones(1);
  {
    const FiberOperator h0 = assemble(p, 0, params, basis_prev, *modes, aopt);
    ScaleRecord r;
    r.n = 0;
    r.lambda_n = params.scale_point(0);
    r.energy = h0.diagonal()[0];
    r.gap = basis_prev->size() == 1 ? std::numeric_limits<double>::infinity() : ground_and_gap(h0, opt).gap;
    r.gap_bound = gap_bound(params, 0);
    r.norm_sq = 1.0;
    r.backend = options.backend;
    r.rayleigh = r.energy;
    r.overlap = 1.0;
    r.velocity = hf_velocity(psi, p, *basis_prev, *modes, params);
    r.basis_size = basis_prev->size();
    traj.records.push_back(std::move(r));
  }

  for (int n = 1; n <= params.n_steps; ++n) {
    const ScaleRecord& prev = traj.records.back();
    ScaleRecord r;
    r.n = n;
    r.lambda_n = params.scale_point(n);
    r.backend = options.backend;
    r.gap_bound = gap_bound(params, n);
    r.gap_prev_bound = params.zeta * omega(params.scale_point(n), params.mu);

    auto basis = std::make_shared<const FockBasis>(build_basis(*modes, n, disc.b_max, disc.basis_cap));
    r.basis_size = basis->size();
    const Vector psi_prev = detail::embed_vector(psi, embedding(*basis_prev, *basis), basis->size());
    const double prev_norm = psi_prev.norm();
    const Vector psi_hat = psi_prev / prev_norm;

    const FiberOperator op_prev = assemble(p, n - 1, params, basis, *modes, aopt);
    const FiberOperator op = assemble(p, n, params, basis, *modes, aopt);
    const SlicePiece slice = slice_piece(n, params, basis, *modes);

    GroundResult ground;
    try {
      ground = ground_and_gap(op, opt);
    } catch (const Error& e) {
      throw TrajectoryError(n, e.what());
    }
    r.energy = ground.energy;
    r.gap = ground.gap;
    r.eig_residual = ground.residual;
    r.velocity = hf_velocity(ground.vector, p, *basis, *modes, params);

    try {
      r.gap_prev_on_next = ground_and_gap(op_prev, opt).gap;
    } catch (const DegenerateGroundState& e) {
      r.gap_prev_on_next = e.gap();
    }

    // contour around E_{n-1}; shrink to a quarter of the observed gap if the ladder failed below
    Contour contour;
    contour.center = prev.energy;
    contour.radius = 0.5 * params.zeta * omega(params.scale_point(n + 1), params.mu);
    contour.quad_points = opt.contour_points_init;
    if (!(prev.gap >= prev.gap_bound - options.gap_tol)) {
      contour.radius = 0.25 * prev.gap;
      r.radius_fallback = true;
      r.warnings.push_back(detail::fmt(
          "gap check failed at the previous scale; contour radius set to a quarter of the observed gap %.6g",
          prev.gap));
    }
    r.center = contour.center;
    r.radius = contour.radius;
    const std::vector<double> known = {ground.energy, ground.energy + ground.gap};

    Vector next;
    try {
      if (options.backend == Backend::contour) {
        ProjectorResult pr = contour_projector(op, contour, psi_prev, opt, known);
        next = std::move(pr.vector);
        r.quad_points = pr.quad_points;
        for (auto& w : pr.warnings) r.warnings.push_back(std::move(w));
      } else {
        NeumannResult nr = neumann_projector(op_prev, slice, contour, psi_prev, opt, known);
        next = std::move(nr.projection.vector);
        r.quad_points = nr.projection.quad_points;
        r.neumann_order = nr.series.max_order;
        r.neumann_ratio = nr.series.fitted_ratio;
        r.neumann_terms = nr.series.term_norms;
        for (auto& w : nr.projection.warnings) r.warnings.push_back(std::move(w));
      }
    } catch (const Error& e) {
      throw TrajectoryError(n, e.what());
    }

    const double next_norm = next.norm();
    if (!(next_norm >= options.eps_zero * prev_norm)) {
      throw TrajectoryError(n, detail::fmt("projected vector collapsed (norm %.3g of incoming %.3g)",
                                           next_norm, prev_norm));
    }
    r.norm_sq = next.squaredNorm();
    r.norm_ratio = r.norm_sq / prev.norm_sq;
    const Vector hv = op.apply(next);
    r.rayleigh = next.dot(hv) / r.norm_sq;
    r.overlap = std::abs(next.dot(ground.vector)) / next_norm;

    try {
      const SecondOrder so = second_order(psi_hat, op_prev, prev.energy, n, params, *modes, opt);
      r.alpha = so.alpha;
      r.delta_e = so.delta_e;
      if (options.compute_contraction) r.contraction = contraction_on_contour(op_prev, slice, contour, opt);
      if (options.compute_ab) {
        Contour cprev = contour;
        cprev.radius = 0.5 * params.zeta * omega(params.scale_point(n), params.mu);
        if (std::isfinite(r.gap_prev_on_next)) cprev.radius = std::min(cprev.radius, 0.5 * r.gap_prev_on_next);
        r.ab = ab_diagnostics(psi_hat, op_prev, prev.energy, cprev, n, params, *modes, opt);
      }
    } catch (const Error& e) {
      throw TrajectoryError(n, e.what());
    }

    if (!(r.gap >= r.gap_bound - options.gap_tol)) {
      const std::string msg = detail::fmt("gap %.10g below the bound %.10g", r.gap, r.gap_bound);
      if (options.gap_policy == GapPolicy::error) throw TrajectoryError(n, msg);
      r.warnings.push_back(msg);
    }
    if (!(r.gap_prev_on_next >= r.gap_prev_bound - options.gap_tol)) {
      r.warnings.push_back(detail::fmt("previous-scale operator on F_n has gap %.10g below %.10g",
                                       r.gap_prev_on_next, r.gap_prev_bound));
    }
    if (r.energy > prev.energy + options.monotone_tol) {
      r.warnings.push_back(detail::fmt("energy increased by %.3g", r.energy - prev.energy));
    }
    if (std::abs(r.rayleigh - r.energy) > 10.0 * opt.tol_eig * std::max(1.0, std::abs(r.energy))) {
      r.warnings.push_back(detail::fmt("projected-state Rayleigh quotient differs from E by %.3g",
                                       r.rayleigh - r.energy));
    }

    psi = std::move(next);
    basis_prev = basis;
    traj.records.push_back(std::move(r));
  }

  traj.final_basis = basis_prev;
  Vector fin = psi / psi.norm();
  Eigen::Index imax = 0;
  fin.cwiseAbs().maxCoeff(&imax);
  if (fin[imax] < 0) fin = -fin;
  traj.final_state = std::move(fin);
  return traj;
}

struct LadderEntry {
  int n = 0;
  double gap = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // gap - bound
  bool pass = true;
  double prev_gap = std::numeric_limits<double>::quiet_NaN();
  double prev_bound = std::numeric_limits<double>::quiet_NaN();
  bool prev_pass = true;
};

struct LadderReport {
  std::vector<LadderEntry> entries;
  bool all_pass = true;
};

inline LadderReport check_gap_ladder(const Trajectory& t, double tol = 1e-8) {
  LadderReport out;
  for (const auto& r : t.records) {
    LadderEntry e;
    e.n = r.n;
    e.gap = r.gap;
    e.bound = r.gap_bound;
    e.margin = r.gap - r.gap_bound;
    e.pass = r.gap >= r.gap_bound - tol;
    if (r.n > 0) {
      e.prev_gap = r.gap_prev_on_next;
      e.prev_bound = r.gap_prev_bound;
      e.prev_pass = r.gap_prev_on_next >= r.gap_prev_bound - tol;
    }
    out.all_pass = out.all_pass && e.pass && e.prev_pass;
    out.entries.push_back(e);
  }
  return out;
}

struct GrossEntry {
  int n = 0;
  double difference = 0.0;  // E_{P,n} - E_{0,n}
  double violation = 0.0;   // max(0, -difference)
  bool pass = true;
};

struct GrossReport {
  std::vector<GrossEntry> entries;
  bool all_pass = true;
  double worst_violation = 0.0;
};

inline GrossReport check_gross(const Trajectory& at_p, const Trajectory& at_zero, double tol = 1e-6) {
  if (at_p.records.size() != at_zero.records.size() ||
      at_p.modes->fingerprint() != at_zero.modes->fingerprint() || at_p.disc.b_max != at_zero.disc.b_max) {
    throw DimensionMismatch("Gross check needs trajectories with identical parameters and discretization");
  }
  GrossReport out;
  for (std::size_t i = 0; i < at_p.records.size(); ++i) {
    GrossEntry e;
    e.n = at_p.records[i].n;
    e.difference = at_p.records[i].energy - at_zero.records[i].energy;
    e.violation = std::max(0.0, -e.difference);
    e.pass = e.difference >= -tol;
    out.all_pass = out.all_pass && e.pass;
    out.worst_violation = std::max(out.worst_violation, e.violation);
    out.entries.push_back(e);
  }
  return out;
}

/// prod_n (1 - g^2 alpha_n) and its logarithm per ln Lambda.
struct DampingResult {
  double product = 1.0;
  double log_product = 0.0;
  double log_per_log_lambda = 0.0;  // empirical -g^2 c_1
  double alpha_sum = 0.0;
};

inline DampingResult damping_product(const Trajectory& t) {
  DampingResult out;
  const double g2 = t.params.g * t.params.g;
  for (const auto& r : t.records) {
    if (r.n == 0) continue;
    if (!std::isfinite(r.alpha)) throw InvalidParameters("trajectory lacks alpha at scale " + std::to_string(r.n));
    const double f = 1.0 - g2 * r.alpha;
    if (!(f > 0.0)) {
      throw InvalidParameters(detail::fmt("damping factor %.6g at scale %.0f is not positive", f, r.n));
    }
    out.log_product += std::log(f);
    out.alpha_sum += r.alpha;
  }
  out.product = std::exp(out.log_product);
  out.log_per_log_lambda = out.log_product / std::log(t.params.lambda);
  return out;
}

}  // namespace yukawa
