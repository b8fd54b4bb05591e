#pragma once

// Serialization of trajectories and sweeps (JSON, CSV, plot.dat) and atomic
// file output: every file goes to a temporary name and is renamed into place
// only after all outputs of a command have been produced.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "yukawa/config.hpp"
#include "yukawa/multiscale.hpp"
#include "yukawa/sweeps.hpp"

namespace yukawa {

inline constexpr const char* kVersion = "1.0.0";

using ojson = nlohmann::ordered_json;

/// %.17g for finite values, "inf"/"-inf", and an empty cell for NaN.
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON numbers; non-finite values become null.
inline ojson json_number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

inline ojson json_vec3(const Momentum3& v) { return ojson::array({json_number(v.x), json_number(v.y), json_number(v.z)}); }

inline ojson provenance_json(const RunConfig& cfg, const std::string& command) {
  ojson p = ojson::object();
  p["program"] = "yukawa";
  p["version"] = kVersion;
  p["command"] = command;
  p["seed"] = cfg.traj.solver.seed;
  p["config"] = config_json(cfg);
  return p;
}

inline std::string provenance_comment(const RunConfig& cfg, const std::string& command) {
  std::string out = "# yukawa " + std::string(kVersion) + " " + command + "\n";
  out += "# seed = " + std::to_string(cfg.traj.solver.seed) + "\n";
  for (const auto& [k, v] : resolved_entries(cfg)) out += "# config " + k + " = " + v + "\n";
  return out;
}

inline ojson record_json(const ScaleRecord& r) {
  ojson j = ojson::object();
  j["n"] = r.n;
  j["lambda_n"] = json_number(r.lambda_n);
  j["E"] = json_number(r.energy);
  j["gap"] = json_number(r.gap);
  j["gap_bound"] = json_number(r.gap_bound);
  j["gap_prev_on_next"] = json_number(r.gap_prev_on_next);
  j["gap_prev_bound"] = json_number(r.gap_prev_bound);
  j["norm_sq"] = json_number(r.norm_sq);
  j["norm_ratio"] = json_number(r.norm_ratio);
  j["alpha"] = json_number(r.alpha);
  j["delta_e"] = json_number(r.delta_e);
  j["contraction"] = json_number(r.contraction);
  j["projector_backend"] = to_string(r.backend);
  j["contour_center"] = json_number(r.center);
  j["contour_radius"] = json_number(r.radius);
  j["radius_fallback"] = r.radius_fallback;
  j["in_proven_annulus"] = r.n > 0 && !r.radius_fallback;
  j["quad_points"] = r.quad_points;
  j["neumann_order"] = r.neumann_order;
  j["neumann_ratio"] = json_number(r.neumann_ratio);
  ojson terms = ojson::array();
  for (double t : r.neumann_terms) terms.push_back(json_number(t));
  j["neumann_term_norms"] = terms;
  j["rayleigh"] = json_number(r.rayleigh);
  j["overlap"] = json_number(r.overlap);
  j["velocity"] = json_vec3(r.velocity);
  j["basis_size"] = r.basis_size;
  j["eig_residual"] = json_number(r.eig_residual);
  if (r.ab) {
    j["A"] = json_vec3(r.ab->a);
    j["B"] = json_vec3(r.ab->b);
  }
  j["warnings"] = r.warnings;
  return j;
}

inline ojson trajectory_json(const Trajectory& t, const RunConfig& cfg, const std::string& command = "trajectory") {
  ojson j = ojson::object();
  j["provenance"] = provenance_json(cfg, command);
  j["P"] = json_vec3(t.p);
  j["gamma"] = t.params.gamma();
  j["s_total"] = s_total(*t.modes, t.params);
  j["free_energy"] = free_energy(t.p, t.params.m);
  j["mode_count"] = t.modes->size();
  j["mode_fingerprint"] = t.modes->fingerprint();
  ojson recs = ojson::array();
  for (const auto& r : t.records) recs.push_back(record_json(r));
  j["records"] = recs;
  const auto ladder = check_gap_ladder(t, t.options.gap_tol);
  j["gap_ladder_pass"] = ladder.all_pass;
  return j;
}

/// Frozen leading columns; later columns are append-only.
inline const std::vector<std::string>& trajectory_csv_columns() {
  static const std::vector<std::string> cols = {
      "n", "lambda_n", "E", "gap", "gap_bound", "alpha", "delta_e", "norm_sq", "contraction",
      "gap_prev_on_next", "norm_ratio", "rayleigh", "overlap", "velocity_1", "velocity_2", "velocity_3",
      "basis_size", "quad_points", "neumann_order", "contour_radius", "radius_fallback", "warnings"};
  return cols;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string join_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out + "\r\n";
}

inline std::string trajectory_csv(const Trajectory& t, const RunConfig& cfg, const std::string& command = "trajectory") {
  std::string out = provenance_comment(cfg, command);
  out += join_row(trajectory_csv_columns());
  for (const auto& r : t.records) {
    std::string warn;
    for (const auto& w : r.warnings) warn += (warn.empty() ? "" : "; ") + w;
    out += join_row({std::to_string(r.n), csv_number(r.lambda_n), csv_number(r.energy), csv_number(r.gap),
                     csv_number(r.gap_bound), csv_number(r.alpha), csv_number(r.delta_e), csv_number(r.norm_sq),
                     csv_number(r.contraction), csv_number(r.gap_prev_on_next), csv_number(r.norm_ratio),
                     csv_number(r.rayleigh), csv_number(r.overlap), csv_number(r.velocity.x),
                     csv_number(r.velocity.y), csv_number(r.velocity.z), std::to_string(r.basis_size),
                     std::to_string(r.quad_points), std::to_string(r.neumann_order), csv_number(r.radius),
                     r.radius_fallback ? "1" : "0", csv_escape(warn)});
  }
  return out;
}

inline ojson fit_json(const SweepResult& s, const RunConfig& cfg) {
  ojson j = ojson::object();
  j["provenance"] = provenance_json(cfg, "sweep " + s.axis);
  j["axis"] = s.axis;
  j["observable"] = s.observable;
  if (s.fit) {
    j["fit"] = {{"exponent", s.fit->exponent},
                {"prefactor", s.fit->prefactor},
                {"residual", s.fit->residual},
                {"n_points", s.fit->n_points}};
  } else {
    j["fit"] = nullptr;
    j["fit_error"] = s.fit_error;
  }
  ojson summary = ojson::object();
  for (const auto& [k, v] : s.summary) summary[k] = json_number(v);
  j["summary"] = summary;
  j["n_points"] = s.points.size();
  j["n_failed"] = s.failures();
  ojson pts = ojson::array();
  for (const auto& p : s.points) {
    ojson q = ojson::object();
    q["value"] = json_number(p.value);
    q["observable"] = json_number(p.observable);
    q["n_steps"] = p.n_steps;
    q["gamma"] = json_number(p.gamma);
    for (const auto& [k, v] : p.extra) q[k] = json_number(v);
    q["ok"] = p.ok;
    if (!p.ok) q["error"] = p.error;
    pts.push_back(q);
  }
  j["points"] = pts;
  j["notes"] = s.notes;
  return j;
}

inline std::string sweep_csv(const SweepResult& s, const RunConfig& cfg) {
  std::vector<std::string> extra_keys;
  for (const auto& p : s.points) {
    for (const auto& [k, v] : p.extra) {
      if (std::find(extra_keys.begin(), extra_keys.end(), k) == extra_keys.end()) extra_keys.push_back(k);
    }
  }
  std::sort(extra_keys.begin(), extra_keys.end());
  std::string out = provenance_comment(cfg, "sweep " + s.axis);
  std::vector<std::string> head = {"value", "n_steps", "gamma", s.observable, "status"};
  head.insert(head.end(), extra_keys.begin(), extra_keys.end());
  out += join_row(head);
  for (const auto& p : s.points) {
    std::vector<std::string> row = {csv_number(p.value), std::to_string(p.n_steps), csv_number(p.gamma),
                                    csv_number(p.observable), p.ok ? "ok" : csv_escape("failed: " + p.error)};
    for (const auto& k : extra_keys) {
      const auto it = p.extra.find(k);
      row.push_back(it == p.extra.end() ? "" : csv_number(it->second));
    }
    out += join_row(row);
  }
  return out;
}

/// Two whitespace-separated columns: swept value and observable (failed points omitted),
/// after '#' comment lines carrying the provenance and the column names.
inline std::string plot_dat(const SweepResult& s, const RunConfig& cfg) {
  std::string out = provenance_comment(cfg, "sweep " + s.axis);
  out += "# " + s.axis + " " + s.observable + "\n";
  for (const auto& p : s.points) {
    if (!p.ok) continue;
    out += csv_number(p.value) + " " + csv_number(p.observable) + "\n";
  }
  return out;
}

/// Collects outputs in memory and renames them into place together.
class OutputSet {
public:
  explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

  void add(const std::filesystem::path& relative, std::string content) {
    files_.emplace_back(relative, std::move(content));
  }

  std::vector<std::filesystem::path> commit() const {
    namespace fs = std::filesystem;
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
      for (const auto& [rel, content] : files_) {
        const fs::path target = root_ / rel;
        fs::create_directories(target.parent_path());
        fs::path tmp = target;
        tmp += ".partial";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) throw Error("failed to write " + tmp.string());
        staged.emplace_back(tmp, target);
      }
    } catch (...) {
      for (const auto& [tmp, target] : staged) {
        std::error_code ec;
        fs::remove(tmp, ec);
      }
      throw;
    }
    std::vector<fs::path> written;
    for (const auto& [tmp, target] : staged) {
      fs::rename(tmp, target);
      written.push_back(target);
    }
    return written;
  }

private:
  std::filesystem::path root_;
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace yukawa
