#include "mhdens/config.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

namespace mhdens {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int parsed = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + value + "'");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "experiment") config.experiment = value;
    else if (key == "nu") config.nu = parse_double(key, value);
    else if (key == "num") config.nu_m = parse_double(key, value);
    else if (key == "dt") config.dt = parse_double(key, value);
    else if (key == "T") config.t_end = parse_double(key, value);
    else if (key == "eps") config.eps = parse_double(key, value);
    else if (key == "levels") config.levels = parse_int(key, value);
    else if (key == "J") config.ensemble_size = parse_int(key, value);
    else if (key == "n") config.n = parse_int(key, value);
    else if (key == "cells_per_unit") config.cells_per_unit = parse_int(key, value);
    else if (key == "snapshot_interval") config.snapshot_interval = parse_int(key, value);
    else if (key == "threads") config.threads = parse_int(key, value);
    else if (key == "out") config.out_dir = value;
    else if (key == "solver") config.solver = value;
    else if (key == "convection") config.convection = value;
    else if (key == "bootstrap") config.bootstrap = value;
    else if (key == "naive") config.naive = parse_bool(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  return config;
}

RunConfig merge_config(RunConfig base, const RunConfig& overrides) {
  auto take = [](auto& dst, const auto& src) {
    if (src.has_value()) dst = src;
  };
  take(base.experiment, overrides.experiment);
  take(base.nu, overrides.nu);
  take(base.nu_m, overrides.nu_m);
  take(base.dt, overrides.dt);
  take(base.t_end, overrides.t_end);
  take(base.eps, overrides.eps);
  take(base.levels, overrides.levels);
  take(base.ensemble_size, overrides.ensemble_size);
  take(base.n, overrides.n);
  take(base.cells_per_unit, overrides.cells_per_unit);
  take(base.snapshot_interval, overrides.snapshot_interval);
  take(base.threads, overrides.threads);
  take(base.out_dir, overrides.out_dir);
  take(base.solver, overrides.solver);
  take(base.convection, overrides.convection);
  take(base.bootstrap, overrides.bootstrap);
  take(base.naive, overrides.naive);
  return base;
}

ResolvedConfig resolve_config(const RunConfig& config) {
  if (!config.experiment.has_value()) throw ConfigError("config: missing experiment");
  ResolvedConfig out;
  out.experiment = *config.experiment;
  const bool channel = out.experiment == "channel";
  const bool energy = out.experiment == "energy";
  if (!channel && !energy && out.experiment != "converge")
    throw ConfigError("config: unknown experiment '" + out.experiment + "'");

  out.nu = config.nu.value_or(channel ? 0.001 : 0.01);
  out.nu_m = config.nu_m.value_or(channel ? 1.0 : 0.001);
  out.t_end = config.t_end.value_or(channel ? 2.0 : 0.001);
  out.dt = config.dt.value_or(channel ? 0.001 : energy ? out.t_end / 16.0 : out.t_end / 4.0);
  out.eps = config.eps.value_or(0.001);
  out.levels = config.levels.value_or(5);
  out.ensemble_size = config.ensemble_size.value_or(4);
  out.n = config.n.value_or(8);
  out.cells_per_unit = config.cells_per_unit.value_or(1);
  out.snapshot_interval = config.snapshot_interval.value_or(100);
  out.threads = config.threads.value_or(1);
  out.out_dir = config.out_dir.value_or(".");
  out.solver = config.solver.value_or("direct");
  out.convection = config.convection.value_or("standard");
  out.bootstrap = config.bootstrap.value_or(channel ? "be" : "exact");
  out.naive = config.naive.value_or(false);

  if (out.nu <= 0 || out.nu_m <= 0) throw ConfigError("config: nu and num must be positive");
  if (out.dt <= 0 || out.t_end <= 0) throw ConfigError("config: dt and T must be positive");
  if (out.eps < 0) throw ConfigError("config: eps must be nonnegative");
  if (out.levels < 1) throw ConfigError("config: levels must be >= 1");
  if (out.ensemble_size < 1) throw ConfigError("config: J must be >= 1");
  if (out.n < 1 || out.cells_per_unit < 1) throw ConfigError("config: mesh sizes must be >= 1");
  if (out.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (out.solver != "direct" && out.solver != "iterative")
    throw ConfigError("config: solver must be direct or iterative");
  if (out.convection != "standard" && out.convection != "skew")
    throw ConfigError("config: convection must be standard or skew");
  if (out.bootstrap != "be" && out.bootstrap != "exact")
    throw ConfigError("config: bootstrap must be be or exact");
  return out;
}

std::string echo_config(const ResolvedConfig& config) {
  std::ostringstream out;
  out << "experiment = " << config.experiment << "\n";
  out << "nu = " << num(config.nu) << "\n";
  out << "num = " << num(config.nu_m) << "\n";
  out << "dt = " << num(config.dt) << "\n";
  out << "T = " << num(config.t_end) << "\n";
  out << "eps = " << num(config.eps) << "\n";
  out << "levels = " << config.levels << "\n";
  out << "J = " << config.ensemble_size << "\n";
  out << "n = " << config.n << "\n";
  out << "cells_per_unit = " << config.cells_per_unit << "\n";
  out << "snapshot_interval = " << config.snapshot_interval << "\n";
  out << "threads = " << config.threads << "\n";
  out << "out = " << config.out_dir << "\n";
  out << "solver = " << config.solver << "\n";
  out << "convection = " << config.convection << "\n";
  out << "bootstrap = " << config.bootstrap << "\n";
  out << "naive = " << (config.naive ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace mhdens
