#pragma once

// Markdown report over a run directory. Output depends only on the artifact
// contents, so identical artifacts render byte-identical reports.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "yukawa/io.hpp"

namespace yukawa {

struct Verdict {
  std::string claim;
  std::string measured;
  std::string criterion;
  bool pass = false;
};

struct ReportResult {
  std::string markdown;
  std::vector<Verdict> verdicts;
  std::vector<std::string> missing;

  bool all_pass() const {
    return missing.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
};

namespace detail {

inline std::optional<nlohmann::json> load_json(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) return std::nullopt;
  try {
    return nlohmann::json::parse(read_text(p));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string g6(const nlohmann::json& v, const char* fmt = "%.6g") {
  if (!v.is_number()) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v.get<double>());
  return buf;
}

inline std::string g6(double v, const char* fmt = "%.6g") {
  if (!std::isfinite(v)) return std::isnan(v) ? "-" : (v > 0 ? "inf" : "-inf");
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline double num_or_nan(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

/// Escapes '|' so absolute-value bars do not split a table cell.
inline std::string cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline ReportResult build_report(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  using detail::g6;
  ReportResult rep;
  std::string md = "# Multi-scale ground-state run report\n\n";
  md += "Run directory artifacts are summarized below. Verdicts are PASS when the measured value lies in the "
        "stated window and WARN otherwise (or when the artifact is missing).\n\n";

  const auto traj = detail::load_json(dir / "trajectory.json");
  const auto lam = detail::load_json(dir / "sweep_lambda" / "fit.json");
  const auto flat = detail::load_json(dir / "sweep_lambda" / "flattening.json");
  const auto gsw = detail::load_json(dir / "sweep_g" / "fit.json");
  const auto gam = detail::load_json(dir / "sweep_gamma" / "fit.json");
  const auto psw = detail::load_json(dir / "sweep_p" / "fit.json");

  // parameter table from the first artifact that carries a configuration
  const nlohmann::json* cfg_src = nullptr;
  for (const auto* a : {&traj, &lam, &gsw, &gam, &psw}) {
    if (*a && (**a).contains("provenance")) {
      cfg_src = &**a;
      break;
    }
  }
  md += "## Parameters\n\n";
  if (cfg_src) {
    const auto& prov = (*cfg_src)["provenance"];
    md += "| key | value |\n|---|---|\n";
    for (const auto& [k, v] : prov["config"].items()) md += "| " + k + " | " + v.get<std::string>() + " |\n";
    md += "| seed | " + std::to_string(prov.value("seed", 0ull)) + " |\n";
    md += "| version | " + prov.value("version", std::string("?")) + " |\n\n";
  } else {
    md += "WARN: no artifact with an embedded configuration found.\n\n";
  }

  auto add = [&](Verdict v) { rep.verdicts.push_back(std::move(v)); };

  md += "## Per-scale diagnostics\n\n";
  if (traj) {
    const auto& t = *traj;
    md += "| n | lambda_n | E | gap | gap bound | alpha | delta E | norm^2 | contraction | v_3 |\n";
    md += "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : t["records"]) {
      md += "| " + std::to_string(r["n"].get<int>()) + " | " + g6(r["lambda_n"], "%.6g") + " | " +
            g6(r["E"], "%.12f") + " | " + g6(r["gap"], "%.6g") + " | " + g6(r["gap_bound"], "%.6g") + " | " +
            g6(r["alpha"], "%.6e") + " | " + g6(r["delta_e"], "%.6e") + " | " + g6(r["norm_sq"], "%.12f") +
            " | " + g6(r["contraction"], "%.4e") + " | " + g6(r["velocity"][2], "%.10f") + " |\n";
    }
    md += "\n";
    const auto& recs = t["records"];
    // monotone ladder
    double worst = std::numeric_limits<double>::infinity();
    bool bracket = true;
    const double g = std::stod(t["provenance"]["config"]["g"].get<std::string>());
    const double lower = -g * g * t["s_total"].get<double>();
    const double upper = t["free_energy"].get<double>();
    const double tol = 1e-10;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const double e = recs[i]["E"].get<double>();
      if (i > 0) worst = std::min(worst, recs[i - 1]["E"].get<double>() - e);
      if (!(e >= lower - tol && e <= upper + tol)) bracket = false;
    }
    add({"energy ladder is non-increasing in n", "smallest decrease " + g6(worst, "%.3e"), "each decrease >= -1e-10",
         worst >= -1e-10});
    add({"energy bracketing -g^2 S_total <= E <= sqrt(P^2+m^2)", bracket ? "all scales inside" : "violated",
         "tolerance 1e-10", bracket});
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      const double gp = r["gap"].is_number() ? r["gap"].get<double>() : std::numeric_limits<double>::infinity();
      min_margin = std::min(min_margin, gp - r["gap_bound"].get<double>());
    }
    add({"gap ladder gap >= zeta omega(Lambda gamma^{n+1})", "smallest margin " + g6(min_margin, "%.6g"),
         "margin >= -1e-8", min_margin >= -1e-8});
    double max_norm = 0.0;
    for (const auto& r : recs) max_norm = std::max(max_norm, r["norm_sq"].get<double>());
    add({"projected norms |Psi_n|^2 <= 1", "max " + g6(max_norm, "%.15f"), "<= 1 + 1e-12", max_norm <= 1.0 + 1e-12});
    if (t.contains("gross")) {
      const double wv = t["gross"]["worst_violation"].get<double>();
      add({"Gross inequality E_{P,n} >= E_{0,n}", "worst violation " + g6(wv, "%.3e"), "violation <= 1e-6",
           wv <= 1e-6});
    } else {
      rep.missing.push_back("no Gross companion run in trajectory.json");
    }
    if (t.contains("velocity_check")) {
      const auto& vc = t["velocity_check"];
      const double d = vc["max_abs_difference"].get<double>();
      const double allowed = vc["allowed"].get<double>();
      add({"Hellmann-Feynman velocity equals dE/dP", "max |hf - fd| = " + g6(d, "%.3e"),
           "<= " + g6(allowed, "%.3e"), d <= allowed});
    } else {
      rep.missing.push_back("no finite-difference velocity check in trajectory.json");
    }
  } else {
    md += "WARN: no trajectory found (trajectory.json missing).\n\n";
    rep.missing.push_back("no trajectory found");
  }

  md += "## Scaling laws\n\n";
  if (lam && (*lam)["fit"].is_object()) {
    const double e = (*lam)["fit"]["exponent"].get<double>();
    add({"self-energy grows linearly in Lambda", "exponent " + g6(e, "%.4f") + " over " +
                                                   std::to_string((*lam)["fit"]["n_points"].get<int>()) + " cutoffs",
         "exponent in [0.9, 1.1]", e >= 0.9 && e <= 1.1});
  } else {
    rep.missing.push_back("no lambda sweep found");
  }
  if (gsw && (*gsw)["fit"].is_object()) {
    const double e = (*gsw)["fit"]["exponent"].get<double>();
    add({"self-energy prefactor scales as g^2", "g-exponent " + g6(e, "%.4f"), "exponent in [1.9, 2.1]",
         e >= 1.9 && e <= 2.1});
  } else {
    rep.missing.push_back("no g sweep found");
  }
  if (gam && (*gam)["fit"].is_object()) {
    const double e = (*gam)["fit"]["exponent"].get<double>();
    bool positive = true;
    for (const auto& p : (*gam)["points"]) {
      if (p["ok"].get<bool>() && !(p["alpha_min"].get<double>() > 0.0)) positive = false;
    }
    add({"alpha scales as (1 - gamma)", "exponent " + g6(e, "%.4f") + (positive ? ", alpha > 0" : ", alpha <= 0 seen"),
         "exponent in [0.85, 1.15] and alpha > 0", e >= 0.85 && e <= 1.15 && positive});
  } else {
    rep.missing.push_back("no gamma sweep found");
  }
  if (flat) {
    const auto& s = (*flat)["summary"];
    const bool mono = detail::num_or_nan(s, "monotone") == 1.0;
    const double lo = detail::num_or_nan(s, "top3_log_damping_min");
    const double hi = detail::num_or_nan(s, "top3_log_damping_max");
    const double spread = detail::num_or_nan(s, "top3_log_damping_spread");
    add({"velocity |v_3| non-increasing in Lambda", "worst rise " + g6(detail::num_or_nan(s, "worst_rise"), "%.3e"),
         "tolerance 1e-3", mono});
    add({"ln(damping product)/ln(Lambda) negative and stable",
         "top-3 range [" + g6(lo, "%.4e") + ", " + g6(hi, "%.4e") + "], spread " + g6(spread, "%.3f"),
         "all < 0, spread <= 0.3", hi < 0.0 && spread <= 0.3});
    md += "Flattening model v = v_free Lambda^{-g^2 c1} + floor: c1 = " + g6(detail::num_or_nan(s, "model_c1")) +
          ", floor = " + g6(detail::num_or_nan(s, "model_floor"), "%.10f") +
          "; damping-product estimate c1 = " + g6(detail::num_or_nan(s, "damping_c1")) +
          "; floor-free velocity slope " + g6(detail::num_or_nan(s, "velocity_log_slope"), "%.4e") +
          " vs damping slope " + g6(detail::num_or_nan(s, "damping_slope"), "%.4e") + ".\n\n";
  } else {
    rep.missing.push_back("no flattening sweep found");
  }
  if (psw && psw->contains("points")) {
    double worst = 0.0;
    for (const auto& p : (*psw)["points"]) {
      if (!p["ok"].get<bool>()) continue;
      worst = std::max(worst, std::abs(p["observable"].get<double>()));
    }
    add({"velocity bound |v_i| <= 1 along the p sweep", "max |v_3| " + g6(worst, "%.6f"), "<= 1", worst <= 1.0});
  }

  md += "| claim | measured | criterion | verdict |\n|---|---|---|---|\n";
  for (const auto& v : rep.verdicts) {
    md += "| " + detail::cell(v.claim) + " | " + detail::cell(v.measured) + " | " + detail::cell(v.criterion) + " | " +
          (v.pass ? "PASS" : "WARN") + " |\n";
  }
  for (const auto& m : rep.missing) md += "| " + m + " | - | - | WARN |\n";
  md += "\n";
  rep.markdown = std::move(md);
  return rep;
}

}  // namespace yukawa
