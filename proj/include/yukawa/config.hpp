#pragma once

// Flat key = value run configuration. Every key is validated before any
// computation; the fully resolved key list is embedded into every output so a
// run can be reconstructed from its artifacts alone.

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "yukawa/errors.hpp"
#include "yukawa/multiscale.hpp"

namespace yukawa {

struct SweepConfig {
  std::string axis = "lambda";  // lambda | g | gamma | p
  std::vector<double> lambda_values = {16, 32, 64, 128, 160};
  std::vector<double> g_values = {0.01, 0.02, 0.04, 0.08};
  std::vector<double> gamma_values = {0.6, 0.71, 0.8, 0.9};
  std::vector<double> p_values = {0.05, 0.1, 0.15, 0.2};
  double gamma_target = 0.0;  // 0: keep the base configuration's gamma
};

struct RunConfig {
  ModelParams model;
  Momentum3 p{0.0, 0.0, 0.2};
  ValidationOverrides overrides;
  Discretization disc;
  TrajectoryOptions traj;
  SweepConfig sweep;
  double fd_step = 5e-3;
  std::string out_dir = "out";

  void set_jobs(int jobs) { traj.solver.jobs = std::max(1, jobs); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(where, "expected a number, got '" + t + "'");
  }
  return out;
}

inline long long parse_int(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(where, "expected an integer, got '" + t + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& where) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(where, "expected true or false, got '" + t + "'");
}

inline std::vector<double> parse_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  std::string item;
  std::string s = v;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  while (in >> item) out.push_back(parse_double(item, where));
  if (out.empty()) throw ConfigError(where, "expected a list of numbers");
  return out;
}

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

struct KeySpec {
  const char* key;
  const char* doc;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define YK_DOUBLE(name, field, doc)                                                                \
  KeySpec{name, doc, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = parse_double(v, w); }, \
          [](const RunConfig& c) { return num(c.field); }}
#define YK_INT(name, field, type, doc)                                                             \
  KeySpec{name, doc,                                                                               \
          [](RunConfig& c, const std::string& v, const std::string& w) { c.field = static_cast<type>(parse_int(v, w)); }, \
          [](const RunConfig& c) { return std::to_string(c.field); }}
#define YK_BOOL(name, field, doc)                                                                  \
  KeySpec{name, doc, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = parse_bool(v, w); }, \
          [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define YK_LIST(name, field, doc)                                                                  \
  KeySpec{name, doc, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = parse_list(v, w); }, \
          [](const RunConfig& c) { return join(c.field); }}

inline const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      YK_DOUBLE("m", model.m, "nucleon mass (energy units)"),
      YK_DOUBLE("mu", model.mu, "meson mass (energy units)"),
      YK_DOUBLE("g", model.g, "coupling constant (dimensionless)"),
      YK_DOUBLE("lambda", model.lambda, "ultraviolet cutoff (momentum units)"),
      YK_DOUBLE("kappa", model.kappa, "infrared cutoff (momentum units)"),
      YK_INT("n_steps", model.n_steps, int, "number of momentum shells N"),
      KeySpec{"p", "total momentum P as three components (momentum units)",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                const auto l = parse_list(v, w);
                if (l.size() != 3) throw ConfigError(w, "p needs exactly three components");
                c.p = {l[0], l[1], l[2]};
              },
              [](const RunConfig& c) { return join({c.p.x, c.p.y, c.p.z}); }},
      YK_DOUBLE("p_max", model.p_max, "bound on |P| (momentum units)"),
      YK_DOUBLE("theta", model.theta, "gap parameter theta"),
      YK_DOUBLE("zeta", model.zeta, "gap parameter zeta"),
      YK_BOOL("allow_mu_le_1", overrides.allow_mu_le_1, "accept mu <= 1 (gap guarantees unproven)"),
      YK_BOOL("allow_p_beyond_max", traj.allow_p_beyond_max, "accept |P| >= p_max"),
      YK_INT("radial_order", disc.radial_order, int, "Gauss-Legendre radii per shell"),
      YK_INT("angular_order", disc.angular_order, int, "directions per radius (2, 6, 8, 12, 14, 26)"),
      YK_INT("b_max", disc.b_max, int, "boson-number truncation"),
      YK_INT("basis_cap", disc.basis_cap, std::size_t, "hard cap on the basis size"),
      YK_DOUBLE("tol_eig", traj.solver.tol_eig, "eigen-residual tolerance (energy units)"),
      YK_DOUBLE("tol_lin", traj.solver.tol_lin, "relative residual of shifted solves"),
      YK_DOUBLE("tol_proj", traj.solver.tol_proj, "relative change accepted between quadrature doublings"),
      YK_INT("max_iter", traj.solver.max_iter, int, "operator applications per solve"),
      YK_INT("krylov_dim", traj.solver.krylov_dim, int, "Lanczos basis size before restart"),
      YK_INT("seed", traj.solver.seed, std::uint64_t, "start-vector generator seed"),
      YK_INT("contour_points_init", traj.solver.contour_points_init, int, "initial trapezoid points"),
      YK_INT("contour_points_max", traj.solver.contour_points_max, int, "trapezoid point cap"),
      YK_DOUBLE("degeneracy_rel", traj.solver.degeneracy_rel, "degenerate if gap < this times |H|"),
      YK_INT("neumann_max_order", traj.solver.neumann_max_order, int, "Neumann series order cap"),
      YK_INT("power_max_iter", traj.solver.power_max_iter, int, "power-iteration cap for contraction norms"),
      YK_DOUBLE("power_tol", traj.solver.power_tol, "relative tolerance of the contraction estimate"),
      KeySpec{"backend", "projector backend: contour or neumann",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                try {
                  c.traj.backend = parse_backend(trim(v));
                } catch (const Error& e) {
                  throw ConfigError(w, e.what());
                }
              },
              [](const RunConfig& c) { return to_string(c.traj.backend); }},
      KeySpec{"strict_gap", "gap-ladder violations: warn or error",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                try {
                  c.traj.gap_policy = parse_gap_policy(trim(v));
                } catch (const Error& e) {
                  throw ConfigError(w, e.what());
                }
              },
              [](const RunConfig& c) { return to_string(c.traj.gap_policy); }},
      YK_BOOL("compute_contraction", traj.compute_contraction, "record slice contraction norms"),
      YK_BOOL("compute_ab", traj.compute_ab, "record the A/B velocity diagnostics"),
      YK_DOUBLE("eps_zero", traj.eps_zero, "collapse threshold of the projected norm (relative)"),
      YK_DOUBLE("gap_tol", traj.gap_tol, "slack of the gap-ladder check (energy units)"),
      YK_DOUBLE("fd_step", fd_step, "finite-difference step h (momentum units)"),
      KeySpec{"sweep_axis", "default sweep axis: lambda, g, gamma or p",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                const std::string a = trim(v);
                if (a != "lambda" && a != "g" && a != "gamma" && a != "p") {
                  throw ConfigError(w, "sweep_axis must be lambda, g, gamma or p");
                }
                c.sweep.axis = a;
              },
              [](const RunConfig& c) { return c.sweep.axis; }},
      YK_LIST("sweep_lambda", sweep.lambda_values, "cutoffs of the lambda sweep"),
      YK_LIST("sweep_g", sweep.g_values, "couplings of the g sweep"),
      YK_LIST("sweep_gamma", sweep.gamma_values, "fineness targets of the gamma sweep"),
      YK_LIST("sweep_p", sweep.p_values, "|P| values (along e_3) of the p sweep"),
      YK_DOUBLE("sweep_gamma_target", sweep.gamma_target, "fineness kept across a lambda sweep (0: from n_steps)"),
      KeySpec{"out_dir", "output directory (overridden by --out or YUKAWA_OUT_DIR)",
              [](RunConfig& c, const std::string& v, const std::string&) { c.out_dir = trim(v); },
              [](const RunConfig& c) { return c.out_dir; }},
  };
  return specs;
}

#undef YK_DOUBLE
#undef YK_INT
#undef YK_BOOL
#undef YK_LIST

}  // namespace detail

inline void set_key(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  for (const auto& spec : detail::key_specs()) {
    if (key == spec.key) {
      spec.set(cfg, value, where);
      return;
    }
  }
  throw ConfigError(where, "unknown key '" + key + "'");
}

/// Parses `key = value` lines; '#' starts a comment.
inline RunConfig parse_config_text(const std::string& text, const std::string& source = "config") {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where, "missing key");
    if (value.empty()) throw ConfigError(where, "missing value for '" + key + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    }
    seen[key] = lineno;
    set_key(cfg, key, value, where);
  }
  return cfg;
}

/// Ordered (key, value) pairs of the fully resolved configuration.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& spec : detail::key_specs()) out.emplace_back(spec.key, spec.get(cfg));
  return out;
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : resolved_entries(cfg)) j[k] = v;
  return j;
}

/// The flat text form; parsing it back yields an identical configuration.
inline std::string config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : resolved_entries(cfg)) out += k + " = " + v + "\n";
  return out;
}

inline RunConfig config_from_json(const nlohmann::json& j, const std::string& source) {
  const nlohmann::json* obj = &j;
  if (j.contains("provenance") && j["provenance"].contains("config")) obj = &j["provenance"]["config"];
  else if (j.contains("config")) obj = &j["config"];
  if (!obj->is_object()) throw ConfigError(source, "no configuration object found");
  RunConfig cfg;
  for (const auto& [k, v] : obj->items()) {
    if (!v.is_string()) throw ConfigError(source + ":" + k, "configuration values are stored as strings");
    set_key(cfg, k, v.get<std::string>(), source + ":" + k);
  }
  return cfg;
}

/// Loads a flat config file, or the configuration embedded in a JSON output file.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ":byte " + std::to_string(e.byte), "malformed JSON");
    }
    return config_from_json(j, path);
  }
  return parse_config_text(text, path);
}

/// Key documentation, for --help style listings.
inline std::vector<std::pair<std::string, std::string>> config_key_docs() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& spec : detail::key_specs()) out.emplace_back(spec.key, spec.doc);
  return out;
}

}  // namespace yukawa
