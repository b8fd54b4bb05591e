#pragma once

// Trajectory-level observables: finite-difference velocity, damping product,
// power-law fits and the parameter sweeps (lambda, g, gamma, p).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yukawa/errors.hpp"
#include "yukawa/multiscale.hpp"
#include "yukawa/parallel.hpp"

namespace yukawa {

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;   // y ~ prefactor * x^exponent
  double residual = 0.0;    // root-mean-square of the log-space residuals
  std::size_t n_points = 0;
};

/// Ordinary least squares of ln y against ln x.
inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit needs equally many x and y values");
  if (x.size() < 2) throw InvalidParameters("fit needs at least two points");
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw InvalidParameters("zero signal: every observable value is 0");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw InvalidParameters("log-log fit needs positive values (point " + std::to_string(i) + ")");
    }
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 1e-12 * n * sxx)) throw InvalidParameters("fit needs at least two distinct x values");
  PowerLawFit f;
  f.exponent = (n * sxy - sx * sy) / den;
  const double intercept = (sy - f.exponent * sx) / n;
  f.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - (intercept + f.exponent * std::log(x[i]));
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.n_points = x.size();
  return f;
}

struct SweepPoint {
  double value = 0.0;       // swept parameter
  double observable = std::numeric_limits<double>::quiet_NaN();
  int n_steps = 0;
  double gamma = 0.0;
  std::map<std::string, double> extra;  // axis-specific columns
  bool ok = true;
  std::string error;
  std::optional<Trajectory> trajectory;
};

struct SweepResult {
  std::string axis;            // lambda | g | gamma | p
  std::string observable;      // name of the fitted quantity
  std::vector<SweepPoint> points;
  std::optional<PowerLawFit> fit;
  std::string fit_error;       // why no fit was produced
  std::map<std::string, double> summary;  // axis-specific derived numbers
  std::vector<std::string> notes;

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return !p.ok; }));
  }
};

/// Everything a sweep needs besides the swept axis.
struct SweepSetup {
  ModelParams base;
  Momentum3 p;
  Discretization disc;
  TrajectoryOptions options;
  ValidationOverrides overrides;
  double gamma_target = 0.0;  // shell-ladder fineness kept fixed across a lambda sweep (0: from base)
  int jobs = 1;
  bool keep_trajectories = false;
};

namespace detail {

template <class Eval>
std::vector<SweepPoint> run_points(const std::vector<double>& values, int jobs, Eval&& eval) {
  std::vector<SweepPoint> pts(values.size());
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    pts[i].value = values[i];
    try {
      eval(pts[i]);
    } catch (const std::exception& e) {
      pts[i].ok = false;
      pts[i].error = e.what();
    }
  });
  return pts;
}

inline void fit_points(SweepResult& r, bool use_abs = false) {
  std::vector<double> xs, ys;
  for (const auto& p : r.points) {
    if (!p.ok) continue;
    xs.push_back(p.value);
    ys.push_back(use_abs ? std::abs(p.observable) : p.observable);
  }
  try {
    if (xs.size() < 4) throw InvalidParameters("fewer than 4 successful sweep points");
    r.fit = fit_power_law(xs, ys);
  } catch (const Error& e) {
    r.fit_error = e.what();
  }
}

inline double gamma_target_of(const SweepSetup& s) {
  return s.gamma_target > 0.0 ? s.gamma_target : s.base.gamma();
}

}  // namespace detail

/// sqrt(P^2 + m^2) - E_{P,Lambda} against Lambda, with N chosen to keep gamma near the template's.
inline SweepResult self_energy_sweep(const SweepSetup& s, const std::vector<double>& lambdas,
                                     const Momentum3& p = {}) {
  if (lambdas.size() < 4) throw InvalidParameters("self-energy sweep needs at least 4 cutoffs");
  SweepResult r;
  r.axis = "lambda";
  r.observable = "self_energy";
  const double gt = detail::gamma_target_of(s);
  r.points = detail::run_points(lambdas, s.jobs, [&](SweepPoint& pt) {
    ModelParams mp = s.base;
    mp.lambda = pt.value;
    mp.n_steps = steps_for_gamma(mp.lambda, mp.kappa, gt);
    pt.n_steps = mp.n_steps;
    pt.gamma = mp.gamma();
    Trajectory t = run_trajectory(p, mp, s.disc, s.options, s.overrides);
    const double e_free = free_energy(p, mp.m);
    pt.observable = e_free - t.final_energy();
    pt.extra["energy"] = t.final_energy();
    pt.extra["s_total"] = s_total(*t.modes, mp);
    pt.extra["self_energy_per_g2"] = mp.g != 0.0 ? pt.observable / (mp.g * mp.g) : 0.0;
    pt.extra["basis_size"] = static_cast<double>(t.records.back().basis_size);
    if (s.keep_trajectories) pt.trajectory = std::move(t);
  });
  detail::fit_points(r);
  if (r.fit && s.base.g != 0.0) r.summary["prefactor_per_g2"] = r.fit->prefactor / (s.base.g * s.base.g);
  return r;
}

/// Self-energy at fixed cutoff against |g|; the fitted exponent is the g-power of the prefactor.
inline SweepResult coupling_sweep(const SweepSetup& s, const std::vector<double>& gs) {
  SweepResult r;
  r.axis = "g";
  r.observable = "self_energy";
  r.points = detail::run_points(gs, s.jobs, [&](SweepPoint& pt) {
    ModelParams mp = s.base;
    mp.g = pt.value;
    pt.n_steps = mp.n_steps;
    pt.gamma = mp.gamma();
    Trajectory t = run_trajectory(s.p, mp, s.disc, s.options, s.overrides);
    pt.observable = free_energy(s.p, mp.m) - t.final_energy();
    pt.extra["energy"] = t.final_energy();
    double max_c = 0.0;
    for (const auto& rec : t.records) {
      if (std::isfinite(rec.contraction)) max_c = std::max(max_c, rec.contraction);
    }
    pt.extra["max_contraction"] = max_c;
    if (s.keep_trajectories) pt.trajectory = std::move(t);
  });
  for (auto& pt : r.points) pt.value = std::abs(pt.value);
  detail::fit_points(r);
  return r;
}

/// alpha at shell 1 against (1 - gamma), with N chosen from each gamma target at fixed cutoff.
inline SweepResult alpha_gamma_sweep(const SweepSetup& s, const std::vector<double>& gamma_targets) {
  SweepResult r;
  r.axis = "gamma";
  r.observable = "alpha_shell1";
  r.points = detail::run_points(gamma_targets, s.jobs, [&](SweepPoint& pt) {
    ModelParams mp = s.base;
    mp.n_steps = steps_for_gamma(mp.lambda, mp.kappa, pt.value);
    pt.n_steps = mp.n_steps;
    pt.gamma = mp.gamma();
    Trajectory t = run_trajectory(s.p, mp, s.disc, s.options, s.overrides);
    pt.extra["gamma_target"] = pt.value;
    pt.extra["one_minus_gamma"] = 1.0 - pt.gamma;
    pt.observable = t.records.at(1).alpha;
    double amin = std::numeric_limits<double>::infinity();
    for (const auto& rec : t.records) {
      if (rec.n > 0) amin = std::min(amin, rec.alpha);
    }
    pt.extra["alpha_min"] = amin;
    if (s.keep_trajectories) pt.trajectory = std::move(t);
  });
  // fit against 1 - gamma (the realized fineness, not the target)
  std::vector<double> xs, ys;
  for (const auto& pt : r.points) {
    if (!pt.ok) continue;
    xs.push_back(1.0 - pt.gamma);
    ys.push_back(pt.observable);
  }
  try {
    if (xs.size() < 4) throw InvalidParameters("fewer than 4 successful sweep points");
    r.fit = fit_power_law(xs, ys);
  } catch (const Error& e) {
    r.fit_error = e.what();
  }
  return r;
}

/// Central-difference gradient of E_{P,N}; both the step-h and step-h/2 estimates and
/// their Richardson combination are returned.
struct FdVelocity {
  Momentum3 coarse;      // step h
  Momentum3 fine;        // step h/2
  Momentum3 richardson;  // (4 fine - coarse) / 3
  double h = 0.0;
};

inline FdVelocity fd_velocity(const ModelParams& params, const Momentum3& p, double h, const Discretization& disc,
                              const TrajectoryOptions& options, ValidationOverrides overrides = {}, int jobs = 1) {
  if (!(h > 0.0)) throw InvalidParameters("finite-difference step must be positive");
  if (!options.allow_p_beyond_max && !(p.norm() + h < params.p_max)) {
    throw InvalidParameters("|P| + h must stay below p_max");
  }
  TrajectoryOptions o = options;
  o.compute_contraction = false;
  o.compute_ab = false;
  // 12 energies: component i, step (h, h/2), sign (+, -)
  std::vector<double> energies(12, 0.0);
  parallel_for(12, jobs, [&](std::size_t k) {
    const int i = static_cast<int>(k / 4);
    const double step = (k / 2) % 2 == 0 ? h : 0.5 * h;
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    Momentum3 q = p;
    q[i] += sign * step;
    energies[k] = run_trajectory(q, params, disc, o, overrides).final_energy();
  });
  FdVelocity out;
  out.h = h;
  for (int i = 0; i < 3; ++i) {
    const double* e = &energies[static_cast<std::size_t>(4 * i)];
    out.coarse[i] = (e[0] - e[1]) / (2.0 * h);
    out.fine[i] = (e[2] - e[3]) / h;
    out.richardson[i] = (4.0 * out.fine[i] - out.coarse[i]) / 3.0;
  }
  return out;
}

/// Velocity along a line of momenta |P| e_3, compared with the free dispersion.
inline SweepResult momentum_sweep(const SweepSetup& s, const std::vector<double>& ps) {
  SweepResult r;
  r.axis = "p";
  r.observable = "hf_velocity_3";
  r.points = detail::run_points(ps, s.jobs, [&](SweepPoint& pt) {
    const Momentum3 q{0.0, 0.0, pt.value};
    pt.n_steps = s.base.n_steps;
    pt.gamma = s.base.gamma();
    Trajectory t = run_trajectory(q, s.base, s.disc, s.options, s.overrides);
    const Momentum3 v = t.records.back().velocity;
    pt.observable = v.z;
    pt.extra["free_velocity_3"] = pt.value / free_energy(q, s.base.m);
    pt.extra["energy"] = t.final_energy();
    pt.extra["velocity_1"] = v.x;
    pt.extra["velocity_2"] = v.y;
    if (s.keep_trajectories) pt.trajectory = std::move(t);
  });
  detail::fit_points(r, true);
  return r;
}

struct FlatteningModel {
  double c1 = 0.0;
  double floor = 0.0;
  double residual = 0.0;  // RMS of velocity residuals
};

/// Fits v(Lambda) = v_free Lambda^{-g^2 c1} + floor: floor by linear least squares for
/// each c1, c1 by golden-section search on the remaining residual.
inline FlatteningModel fit_flattening(const std::vector<double>& lambdas, const std::vector<double>& v,
                                      double v_free, double g) {
  const double g2 = g * g;
  auto eval = [&](double c1, double* floor_out) {
    double mean = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) mean += v[i] - v_free * std::pow(lambdas[i], -g2 * c1);
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = v[i] - v_free * std::pow(lambdas[i], -g2 * c1) - mean;
      ss += r * r;
    }
    if (floor_out) *floor_out = mean;
    return std::sqrt(ss / static_cast<double>(v.size()));
  };
  FlatteningModel out;
  if (g2 == 0.0) {
    out.residual = eval(0.0, &out.floor);
    return out;
  }
  double lo = 0.0, hi = 10.0 / g2;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = eval(a, nullptr), fb = eval(b, nullptr);
  for (int it = 0; it < 200; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = eval(a, nullptr);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = eval(b, nullptr);
    }
  }
  out.c1 = 0.5 * (lo + hi);
  out.residual = eval(out.c1, &out.floor);
  return out;
}

/// |v_3| at scale N against Lambda at fixed P != 0, with damping products per point.
inline SweepResult flattening_sweep(const SweepSetup& s, const std::vector<double>& lambdas,
                                    double monotone_tol = 1e-3) {
  if (lambdas.size() < 4) throw InvalidParameters("flattening sweep needs at least 4 cutoffs");
  SweepResult r;
  r.axis = "lambda";
  r.observable = "abs_hf_velocity_3";
  const double gt = detail::gamma_target_of(s);
  r.points = detail::run_points(lambdas, s.jobs, [&](SweepPoint& pt) {
    ModelParams mp = s.base;
    mp.lambda = pt.value;
    mp.n_steps = steps_for_gamma(mp.lambda, mp.kappa, gt);
    pt.n_steps = mp.n_steps;
    pt.gamma = mp.gamma();
    Trajectory t = run_trajectory(s.p, mp, s.disc, s.options, s.overrides);
    pt.observable = std::abs(t.records.back().velocity.z);
    const DampingResult d = damping_product(t);
    pt.extra["damping_product"] = d.product;
    pt.extra["log_damping_per_log_lambda"] = d.log_per_log_lambda;
    pt.extra["alpha_sum"] = d.alpha_sum;
    pt.extra["energy"] = t.final_energy();
    if (s.keep_trajectories) pt.trajectory = std::move(t);
  });

  std::vector<double> ls, vs, logd, lnl;
  for (const auto& pt : r.points) {
    if (!pt.ok) continue;
    ls.push_back(pt.value);
    vs.push_back(pt.observable);
    logd.push_back(std::log(pt.extra.at("damping_product")));
    lnl.push_back(std::log(pt.value));
  }
  bool monotone = true;
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    worst_rise = std::max(worst_rise, vs[i] - vs[i - 1]);
    if (vs[i] > vs[i - 1] + monotone_tol) monotone = false;
  }
  r.summary["monotone"] = monotone ? 1.0 : 0.0;
  r.summary["worst_rise"] = worst_rise;
  const double v_free = std::abs(s.p.z) / free_energy(s.p, s.base.m);
  r.summary["free_velocity"] = v_free;
  if (ls.size() >= 3) {
    const FlatteningModel fm = fit_flattening(ls, vs, v_free, s.base.g);
    r.summary["model_c1"] = fm.c1;
    r.summary["model_floor"] = fm.floor;
    r.summary["model_residual"] = fm.residual;
    // slope of ln(product) against ln(Lambda): the damping estimate of -g^2 c1
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      sx += lnl[i];
      sy += logd[i];
      sxx += lnl[i] * lnl[i];
      sxy += lnl[i] * logd[i];
    }
    const double n = static_cast<double>(ls.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.summary["damping_slope"] = slope;
    // floor-free comparison: slope of ln|v| against ln(Lambda)
    double vy = 0, vxy = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      vy += std::log(vs[i]);
      vxy += lnl[i] * std::log(vs[i]);
    }
    const double vslope = (n * vxy - sx * vy) / (n * sxx - sx * sx);
    r.summary["velocity_log_slope"] = vslope;
    if (slope != 0.0) r.summary["velocity_vs_damping_rel_diff"] = std::abs(vslope / slope - 1.0);
    if (s.base.g != 0.0) r.summary["damping_c1"] = -slope / (s.base.g * s.base.g);
    // stability of ln(product)/ln(Lambda) across the three largest cutoffs
    std::vector<double> top;
    for (std::size_t i = ls.size() >= 3 ? ls.size() - 3 : 0; i < ls.size(); ++i) top.push_back(logd[i] / lnl[i]);
    const auto [mn, mx] = std::minmax_element(top.begin(), top.end());
    r.summary["top3_log_damping_min"] = *mn;
    r.summary["top3_log_damping_max"] = *mx;
    r.summary["top3_log_damping_spread"] = (*mx - *mn) / std::max(std::abs(*mx), std::abs(*mn));
  }
  detail::fit_points(r);
  return r;
}

/// Largest |g| with every shell's contraction below 1, extrapolated linearly from one run.
struct CouplingWindow {
  double g_max = std::numeric_limits<double>::infinity();
  int limiting_shell = 0;
  std::vector<double> per_shell_slope;  // contraction / |g|
};

inline CouplingWindow coupling_window(const Trajectory& t) {
  CouplingWindow out;
  const double g = std::abs(t.params.g);
  if (g == 0.0) throw InvalidParameters("coupling window needs a run with g != 0");
  for (const auto& r : t.records) {
    if (r.n == 0) continue;
    if (!std::isfinite(r.contraction)) throw InvalidParameters("trajectory was run without contraction norms");
    const double slope = r.contraction / g;
    out.per_shell_slope.push_back(slope);
    if (slope > 0.0 && 1.0 / slope < out.g_max) {
      out.g_max = 1.0 / slope;
      out.limiting_shell = r.n;
    }
  }
  return out;
}

/// Final energy for several boson caps on the same instance.
struct TruncationRow {
  int b_max = 0;
  double energy = 0.0;
  std::size_t basis_size = 0;
};

inline std::vector<TruncationRow> truncation_report(const ModelParams& params, const Momentum3& p,
                                                    const Discretization& disc, const TrajectoryOptions& options,
                                                    const std::vector<int>& caps = {1, 2, 3}) {
  TrajectoryOptions o = options;
  o.compute_contraction = false;
  std::vector<TruncationRow> rows;
  for (int b : caps) {
    Discretization d = disc;
    d.b_max = b;
    const Trajectory t = run_trajectory(p, params, d, o);
    rows.push_back({b, t.final_energy(), t.records.back().basis_size});
  }
  return rows;
}

}  // namespace yukawa
