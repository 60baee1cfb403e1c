#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyposym/report.hpp"

namespace hyposym {

inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

struct ParseResult {
  RunConfig config;
  bool ok = false;
  int exit_code = exit_usage;
  std::string message;  // help text or usage error
};

namespace detail {

inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw CLI::ValidationError(m); };
  if (!(c.h > 0)) fail("h must be > 0");
  const bool uses_delta = c.command == "variation" || c.command == "all";
  for (double d : c.deltas)
    if (uses_delta)
      if (!(d >= 9 * c.h)) fail("delta must be >= 9h (delta=" + std::to_string(d) + ", h=" + std::to_string(c.h) + ")");
  if (!(c.tol >= 0) || !(c.equality_tol >= 0) || !(c.symmetry_tol >= 0)) fail("tolerances must be >= 0");
  if (!(c.delta_eval >= 2 * c.h)) fail("delta-eval must be >= 2h");
  if (!(c.h_t > 0)) fail("ht must be > 0");
  if (c.audit_fields < 0) fail("audit must be >= 0");
  if (c.r && !(*c.r > 0)) fail("r must be > 0");
  if (c.ball_rho && !(*c.ball_rho > 0)) fail("ball-rho must be > 0");
  const auto& p = c.params;
  for (double v : {p.r, p.a, p.c, p.R0, p.rho})
    if (!(v > 0)) fail("surface parameters must be > 0");
  if (!(p.eps >= 0)) fail("eps must be >= 0");
  if (c.command == "corpus-list") return;
  if (c.surface.empty()) fail("--surface is required for " + c.command);
  CorpusInfo info;
  try {
    info = corpus_info(c.surface);
  } catch (const Error&) {
    fail("unknown surface '" + c.surface + "' (see corpus-list)");
  }
  if (info.kind == "curve" && c.command == "variation") fail("variation needs a double-graph surface, not a curve");
  if (c.surface == "torus" && !(p.rho < p.R0)) fail("torus needs rho < R0");
}

} // namespace detail

// Parses argv (without the program name). Flags override config-file values.
inline ParseResult parse_config(const std::vector<std::string>& args) {
  ParseResult out;
  RunConfig& c = out.config;
  CLI::App app{"Numerical checks for hypersurfaces between two graphs", "hyposym"};
  app.set_help_flag("--help", "print this help and exit");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "TOML/INI file with option values");
  app.add_option("command", c.command, "check | variation | symmetry | corpus-list | all")
      ->required()
      ->check(CLI::IsMember({"check", "variation", "symmetry", "corpus-list", "all"}));
  app.add_option("--surface", c.surface, "corpus entry (see corpus-list)");
  app.add_option("--h", c.h, "grid spacing")->capture_default_str();
  app.add_option("--delta", c.deltas, "cutoff widths (repeatable)")->capture_default_str();
  app.add_option("--r", c.r, "Condition S' ball radius");
  app.add_option("--ball-rho", c.ball_rho, "interior ball radius used by the collar bound");
  app.add_option("--tol", c.tol, "Main Assumption tolerance")->capture_default_str();
  app.add_option("--eq-tol", c.equality_tol, "curvature equality tolerance")->capture_default_str();
  app.add_option("--sym-tol", c.symmetry_tol, "symmetry tolerance")->capture_default_str();
  app.add_option("--delta-eval", c.delta_eval, "Main Assumption evaluated on R_delta")->capture_default_str();
  app.add_option("--ht", c.h_t, "deformation step")->capture_default_str();
  app.add_option("--audit", c.audit_fields, "random fields in the first-variation audit")->capture_default_str();
  app.add_option("--seed", c.seed, "seed of the audit fields")->capture_default_str();
  app.add_option("--radius", c.params.r, "sphere / circle radius")->capture_default_str();
  app.add_option("--a", c.params.a, "ellipsoid semi-axis in x'")->capture_default_str();
  app.add_option("--c", c.params.c, "ellipsoid semi-axis in y")->capture_default_str();
  app.add_option("--R0", c.params.R0, "torus centre radius")->capture_default_str();
  app.add_option("--rho", c.params.rho, "torus tube radius")->capture_default_str();
  app.add_option("--eps", c.params.eps, "perturbation size")->capture_default_str();
  app.add_option("--shift", c.params.shift, "vertical offset of the surface")->capture_default_str();
  app.add_option("--out", c.out, "JSON report path (stdout if empty)");
  app.add_option("--csv-dir", c.csv_dir, "directory for field dumps");
  bool no_profile = false;
  app.add_flag("--no-profile", no_profile, "ignore expected corpus profiles");

  if (args.empty()) {
    out.message = app.help();
    return out;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
    c.use_profile = !no_profile;
    detail::validate(c);
  } catch (const CLI::CallForHelp&) {
    out.message = app.help();
    out.exit_code = exit_pass;
    return out;
  } catch (const CLI::Error& e) {
    out.message = std::string("error: ") + e.what() + "\nRun with --help for usage.\n";
    return out;
  }
  out.ok = true;
  out.exit_code = exit_pass;
  return out;
}

inline ParseResult parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

} // namespace hyposym
