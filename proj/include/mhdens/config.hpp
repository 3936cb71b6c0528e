// Run configuration: key=value files, command-line overrides, per-experiment
// defaults, and the resolved-config echo.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace mhdens {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raw settings as given; unset fields fall back to experiment defaults.
struct RunConfig {
  std::optional<std::string> experiment;  // converge | channel | energy
  std::optional<double> nu, nu_m, dt, t_end, eps;
  std::optional<int> levels, ensemble_size, n, cells_per_unit, snapshot_interval, threads;
  std::optional<std::string> out_dir, solver, convection, bootstrap;
  std::optional<bool> naive;
};

/// Everything pinned down. Converge runs derive dt per level from t_end.
struct ResolvedConfig {
  std::string experiment;
  double nu = 0.0;
  double nu_m = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  double eps = 0.0;
  int levels = 0;
  int ensemble_size = 0;
  int n = 0;
  int cells_per_unit = 0;
  int snapshot_interval = 0;
  int threads = 1;
  std::string out_dir;
  std::string solver;      // direct | iterative
  std::string convection;  // standard | skew
  std::string bootstrap;   // be | exact
  bool naive = false;
};

/// Parses key=value lines; '#' starts a comment. Unknown keys and malformed
/// values raise ConfigError naming the key.
RunConfig parse_config_text(const std::string& text);

/// Fields set in `overrides` win over `base` (command line over file).
RunConfig merge_config(RunConfig base, const RunConfig& overrides);

/// Applies experiment defaults and validates enumerated values.
ResolvedConfig resolve_config(const RunConfig& config);

/// One "key = value" line per resolved key, each key exactly once.
std::string echo_config(const ResolvedConfig& config);

}  // namespace mhdens
