// Command-line entry point: validate, trajectory, sweep and report subcommands
// over a flat key = value run configuration.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "yukawa/config.hpp"
#include "yukawa/io.hpp"
#include "yukawa/multiscale.hpp"
#include "yukawa/report.hpp"
#include "yukawa/sweeps.hpp"

namespace fs = std::filesystem;
using namespace yukawa;

namespace {

struct CliState {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::string backend;
  std::string strict_gap;
  std::string axis;
  std::string report_dir;
};

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

RunConfig resolve_config(const CliState& st) {
  RunConfig cfg = st.config_path.empty() ? RunConfig{} : load_config(st.config_path);
  if (!st.backend.empty()) set_key(cfg, "backend", st.backend, "--backend");
  if (!st.strict_gap.empty()) set_key(cfg, "strict_gap", st.strict_gap, "--strict-gap");
  cfg.set_jobs(st.jobs);
  return cfg;
}

fs::path output_dir(const CliState& st, const RunConfig& cfg) {
  if (!st.out_dir.empty()) return st.out_dir;
  if (const char* env = std::getenv("YUKAWA_OUT_DIR"); env && *env) return env;
  return cfg.out_dir;
}

std::string line(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

int cmd_validate(const CliState& st) {
  const RunConfig cfg = resolve_config(st);
  const auto checks = check_constraints(cfg.model, cfg.overrides);
  bool ok = true;
  std::cout << "parameter window check (" << (st.config_path.empty() ? "defaults" : st.config_path) << ")\n";
  for (const auto& c : checks) {
    std::cout << "  [" << (c.pass ? (c.overridden ? "OVERRIDE" : "PASS") : "FAIL") << "] " << c.constraint
              << "   (" << c.detail << ")\n";
    ok = ok && c.pass;
  }
  if (!(cfg.p.norm() < cfg.model.p_max)) {
    std::cout << "  [" << (cfg.traj.allow_p_beyond_max ? "OVERRIDE" : "FAIL") << "] |P| < p_max   (|P| = "
              << cfg.p.norm() << ")\n";
    ok = ok && cfg.traj.allow_p_beyond_max;
  } else {
    std::cout << "  [PASS] |P| < p_max   (|P| = " << cfg.p.norm() << ")\n";
  }
  std::cout << (ok ? "all constraints hold\n" : "constraint violations found\n");
  return ok ? kExitOk : kExitFailure;
}

nlohmann::ordered_json trajectory_extras(const Trajectory& t, const RunConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  // Gross companion at P = 0
  TrajectoryOptions quiet = cfg.traj;
  quiet.compute_contraction = false;
  quiet.compute_ab = false;
  const Trajectory t0 = t.p.norm2() == 0.0 ? t : run_trajectory({}, cfg.model, cfg.disc, quiet, cfg.overrides);
  const GrossReport gross = check_gross(t, t0);
  nlohmann::ordered_json diffs = nlohmann::ordered_json::array();
  for (const auto& e : gross.entries) diffs.push_back(json_number(e.difference));
  j["gross"] = {{"differences", diffs}, {"worst_violation", gross.worst_violation}, {"pass", gross.all_pass}};

  const LadderReport ladder = check_gap_ladder(t, cfg.traj.gap_tol);
  nlohmann::ordered_json margins = nlohmann::ordered_json::array();
  for (const auto& e : ladder.entries) margins.push_back(json_number(e.margin));
  j["gap_ladder"] = {{"margins", margins}, {"pass", ladder.all_pass}};

  try {
    const DampingResult d = damping_product(t);
    j["damping"] = {{"product", d.product},
                    {"log_product", d.log_product},
                    {"log_per_log_lambda", d.log_per_log_lambda},
                    {"alpha_sum", d.alpha_sum}};
  } catch (const Error& e) {
    j["damping"] = {{"error", e.what()}};
  }

  if (cfg.traj.compute_contraction && cfg.model.g != 0.0) {
    const CouplingWindow w = coupling_window(t);
    j["coupling_window"] = {{"g_max", json_number(w.g_max)},
                            {"limiting_shell", w.limiting_shell},
                            {"contraction_per_g", w.per_shell_slope}};
  }

  // Hellmann-Feynman against central differences of E_{P,N}
  const double h = cfg.fd_step;
  if (t.p.norm() + h < cfg.model.p_max || cfg.traj.allow_p_beyond_max) {
    const FdVelocity fd = fd_velocity(cfg.model, t.p, h, cfg.disc, quiet, cfg.overrides, cfg.traj.solver.jobs);
    const Momentum3 hf = t.records.back().velocity;
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(hf[i] - fd.richardson[i]));
    j["velocity_check"] = {{"h", h},
                           {"hf", json_vec3(hf)},
                           {"fd_h", json_vec3(fd.coarse)},
                           {"fd_h_half", json_vec3(fd.fine)},
                           {"fd_richardson", json_vec3(fd.richardson)},
                           {"free", json_vec3((1.0 / free_energy(t.p, cfg.model.m)) * t.p)},
                           {"max_abs_difference", worst},
                           {"allowed", std::max(1e-4, h * h)}};
  }

  // boson-cap convergence on a reduced angular grid
  Discretization reduced = cfg.disc;
  reduced.angular_order = 2;
  nlohmann::ordered_json trunc = nlohmann::ordered_json::array();
  for (const auto& row : truncation_report(cfg.model, t.p, reduced, quiet)) {
    trunc.push_back({{"b_max", row.b_max}, {"energy", row.energy}, {"basis_size", row.basis_size}});
  }
  j["truncation"] = {{"angular_order", reduced.angular_order}, {"rows", trunc}};
  return j;
}

int cmd_trajectory(const CliState& st) {
  const RunConfig cfg = resolve_config(st);
  require_valid(cfg.model, cfg.overrides);
  Trajectory t;
  try {
    t = run_trajectory(cfg.p, cfg.model, cfg.disc, cfg.traj, cfg.overrides);
  } catch (const TrajectoryError& e) {
    std::cerr << "error: trajectory failed at " << e.what() << "\n";
    return kExitFailure;
  }
  for (const auto& r : t.records) {
    std::cout << line("n=%2d  lambda_n=%-10.6g E=%.12f  gap=%-10.6g bound=%-10.6g alpha=%-12.6g dE=%-12.6g "
                      "norm^2=%.12f  contraction=%.4g%s\n",
                      r.n, r.lambda_n, r.energy, r.gap, r.gap_bound, r.alpha, r.delta_e, r.norm_sq, r.contraction,
                      r.warnings.empty() ? "" : "  [warnings]");
    for (const auto& w : r.warnings) std::cout << "      warning: " << w << "\n";
  }
  auto j = trajectory_json(t, cfg);
  const auto extras = trajectory_extras(t, cfg);
  for (const auto& [k, v] : extras.items()) j[k] = v;
  OutputSet out(output_dir(st, cfg));
  out.add("trajectory.json", j.dump(2) + "\n");
  out.add("trajectory.csv", trajectory_csv(t, cfg));
  for (const auto& p : out.commit()) std::cout << "wrote " << p.string() << "\n";
  return kExitOk;
}

RunConfig point_config(const RunConfig& base, const Trajectory& t) {
  RunConfig c = base;
  c.model = t.params;
  c.p = t.p;
  return c;
}

void add_sweep(OutputSet& out, const fs::path& sub, const std::string& stem, const SweepResult& s,
               const RunConfig& cfg, bool with_points) {
  const std::string csv = stem == "sweep" ? "sweep.csv" : stem + ".csv";
  const std::string fit = stem == "sweep" ? "fit.json" : stem + ".json";
  const std::string dat = stem == "sweep" ? "plot.dat" : stem + "_plot.dat";
  out.add(sub / csv, sweep_csv(s, cfg));
  out.add(sub / fit, fit_json(s, cfg).dump(2) + "\n");
  out.add(sub / dat, plot_dat(s, cfg));
  if (!with_points) return;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& pt = s.points[i];
    if (!pt.trajectory) continue;
    const RunConfig pc = point_config(cfg, *pt.trajectory);
    const std::string name = line("%s_%02zu", stem.c_str(), i);
    out.add(sub / "points" / (name + ".json"), trajectory_json(*pt.trajectory, pc, "sweep point").dump(2) + "\n");
    out.add(sub / "points" / (name + ".csv"), trajectory_csv(*pt.trajectory, pc, "sweep point"));
  }
}

void print_sweep(const SweepResult& s) {
  for (const auto& p : s.points) {
    if (p.ok) {
      std::cout << line("  %s=%-10.6g N=%-3d gamma=%.6f  %s=%.12g\n", s.axis.c_str(), p.value, p.n_steps, p.gamma,
                        s.observable.c_str(), p.observable);
    } else {
      std::cout << line("  %s=%-10.6g FAILED: %s\n", s.axis.c_str(), p.value, p.error.c_str());
    }
  }
  if (s.fit) {
    std::cout << line("  fit: exponent %.6f  prefactor %.6g  residual %.3g  (%zu points)\n", s.fit->exponent,
                      s.fit->prefactor, s.fit->residual, s.fit->n_points);
  } else {
    std::cout << "  no fit: " << s.fit_error << "\n";
  }
  for (const auto& [k, v] : s.summary) std::cout << line("  %s = %.6g\n", k.c_str(), v);
}

int cmd_sweep(const CliState& st) {
  RunConfig cfg = resolve_config(st);
  if (!st.axis.empty()) set_key(cfg, "sweep_axis", st.axis, "--axis");
  require_valid(cfg.model, cfg.overrides);
  SweepSetup s;
  s.base = cfg.model;
  s.p = cfg.p;
  s.disc = cfg.disc;
  s.options = cfg.traj;
  s.options.solver.jobs = 1;  // parallelism goes to independent points
  s.overrides = cfg.overrides;
  s.gamma_target = cfg.sweep.gamma_target;
  s.jobs = cfg.traj.solver.jobs;
  s.keep_trajectories = true;

  const std::string axis = cfg.sweep.axis;
  const fs::path sub = "sweep_" + axis;
  OutputSet out(output_dir(st, cfg));
  std::vector<const SweepResult*> all;
  SweepResult main, flat;
  if (axis == "lambda") {
    main = self_energy_sweep(s, cfg.sweep.lambda_values);
    add_sweep(out, sub, "sweep", main, cfg, true);
    std::cout << "self-energy sweep (P = 0)\n";
    print_sweep(main);
    all.push_back(&main);
    if (cfg.p.norm2() > 0.0) {
      flat = flattening_sweep(s, cfg.sweep.lambda_values);
      add_sweep(out, sub, "flattening", flat, cfg, true);
      std::cout << "flattening sweep (P = " << cfg.p.x << ", " << cfg.p.y << ", " << cfg.p.z << ")\n";
      print_sweep(flat);
      all.push_back(&flat);
    }
  } else if (axis == "g") {
    s.p = {};
    main = coupling_sweep(s, cfg.sweep.g_values);
    add_sweep(out, sub, "sweep", main, cfg, true);
    std::cout << "coupling sweep (self-energy at P = 0)\n";
    print_sweep(main);
    all.push_back(&main);
  } else if (axis == "gamma") {
    main = alpha_gamma_sweep(s, cfg.sweep.gamma_values);
    add_sweep(out, sub, "sweep", main, cfg, true);
    std::cout << "fineness sweep (alpha at shell 1 against 1 - gamma)\n";
    print_sweep(main);
    all.push_back(&main);
  } else {
    main = momentum_sweep(s, cfg.sweep.p_values);
    add_sweep(out, sub, "sweep", main, cfg, true);
    std::cout << "momentum sweep (velocity along e_3)\n";
    print_sweep(main);
    all.push_back(&main);
  }

  std::size_t failed = 0, total = 0;
  for (const auto* r : all) {
    failed += r->failures();
    total += r->points.size();
  }
  for (const auto& p : out.commit()) std::cout << "wrote " << p.string() << "\n";
  if (4 * failed > total) {
    std::cerr << "error: " << failed << " of " << total << " sweep points failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_report(const CliState& st) {
  const RunConfig cfg = resolve_config(st);
  const fs::path dir = !st.report_dir.empty() ? fs::path(st.report_dir) : output_dir(st, cfg);
  if (!fs::is_directory(dir)) {
    std::cerr << "error: run directory " << dir.string() << " does not exist\n";
    return kExitFailure;
  }
  const ReportResult rep = build_report(dir);
  OutputSet out(dir);
  out.add("report.md", rep.markdown);
  out.commit();
  std::cout << rep.markdown;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale ground-state laboratory for the one-nucleon Yukawa fiber Hamiltonians"};
  app.require_subcommand(1);
  CliState st;
  app.add_option("--config", st.config_path, "flat key = value configuration (or a JSON output to rerun)");
  app.add_option("--out", st.out_dir, "output directory (default $YUKAWA_OUT_DIR or ./out)");
  app.add_option("--jobs", st.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--backend", st.backend, "projector backend")->check(CLI::IsMember({"contour", "neumann"}));
  app.add_option("--strict-gap", st.strict_gap, "gap-ladder violations")->check(CLI::IsMember({"warn", "error"}));

  auto* validate = app.add_subcommand("validate", "check the parameter window");
  auto* trajectory = app.add_subcommand("trajectory", "run the shell-by-shell construction");
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and fit its scaling law");
  sweep->add_option("--axis", st.axis, "lambda, g, gamma or p")->check(CLI::IsMember({"lambda", "g", "gamma", "p"}));
  auto* report = app.add_subcommand("report", "render report.md from a run directory");
  report->add_option("dir", st.report_dir, "run directory (default: --out)");
  for (auto* sub : {validate, trajectory, sweep, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*validate) return cmd_validate(st);
    if (*trajectory) return cmd_trajectory(st);
    if (*sweep) return cmd_sweep(st);
    if (*report) return cmd_report(st);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
