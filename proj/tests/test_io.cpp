#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mhdens/config.hpp"
#include "mhdens/io.hpp"
#include "mhdens/mms.hpp"

using namespace mhdens;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("empty config with the converge experiment resolves to the reference defaults") {
  RunConfig raw = parse_config_text("");
  raw.experiment = "converge";
  const ResolvedConfig cfg = resolve_config(raw);
  CHECK(cfg.nu == 0.01);
  CHECK(cfg.nu_m == 0.001);
  CHECK(cfg.t_end == 0.001);
  CHECK(cfg.eps == 0.001);
  CHECK(cfg.ensemble_size == 4);
  CHECK(cfg.levels == 5);
  CHECK(cfg.solver == "direct");
  CHECK(cfg.convection == "standard");
  CHECK(cfg.bootstrap == "exact");
  CHECK_FALSE(cfg.naive);
}

TEST_CASE("channel experiment has its own defaults") {
  RunConfig raw;
  raw.experiment = "channel";
  const ResolvedConfig cfg = resolve_config(raw);
  CHECK(cfg.nu == 0.001);
  CHECK(cfg.nu_m == 1.0);
  CHECK(cfg.dt == 0.001);
  CHECK(cfg.t_end == 2.0);
  CHECK(cfg.bootstrap == "be");
  CHECK(cfg.cells_per_unit == 1);
}

TEST_CASE("flags override file values") {
  const RunConfig file = parse_config_text("eps = 0.01\nnu = 0.5\n");
  RunConfig flags;
  flags.eps = 0.1;
  RunConfig merged = merge_config(file, flags);
  merged.experiment = "converge";
  const ResolvedConfig cfg = resolve_config(merged);
  CHECK(cfg.eps == 0.1);   // flag wins
  CHECK(cfg.nu == 0.5);    // file survives where no flag is given
}

TEST_CASE("config parse errors name the offending key") {
  try {
    parse_config_text("foo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  try {
    parse_config_text("eps = banana\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("eps") != std::string::npos);
  }
  CHECK_THROWS_AS(resolve_config(RunConfig{}), ConfigError);  // missing experiment
  RunConfig bad;
  bad.experiment = "waffles";
  CHECK_THROWS_AS(resolve_config(bad), ConfigError);
}

TEST_CASE("config file supports comments and blank lines") {
  const RunConfig raw = parse_config_text("# a comment\n\n  eps = 0.01  # trailing\nJ = 2\n");
  CHECK(raw.eps.has_value());
  CHECK(*raw.eps == 0.01);
  CHECK(*raw.ensemble_size == 2);
}

TEST_CASE("echo lists every resolved key exactly once") {
  RunConfig raw;
  raw.experiment = "energy";
  const std::string echo = echo_config(resolve_config(raw));
  std::map<std::string, int> counts;
  std::istringstream in(echo);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(' ') + 1);
    ++counts[key];
  }
  const std::vector<std::string> expected = {"experiment", "nu",   "num",     "dt",      "T",
                                             "eps",        "levels", "J",     "n",       "cells_per_unit",
                                             "snapshot_interval", "threads", "out", "solver", "convection",
                                             "bootstrap",  "naive"};
  CHECK(counts.size() == expected.size());
  for (const auto& key : expected) CHECK(counts[key] == 1);
}

TEST_CASE("rate table CSV: layout, blank first-row rates, round trip") {
  RateTable table;
  table.rows.push_back({0.5, 0.00025, 3.65e-4, std::nan(""), 7.168e-4, std::nan("")});
  const std::string one = format_rate_table(table);
  CHECK(one == "h,dt,err_v,rate_v,err_w,rate_w\n0.5,0.00025,0.000365,,0.0007168,\n");

  table.rows.push_back({0.25, 0.000125, 1.008e-4, 1.857, 1.93e-4, 1.893});
  const std::string two = format_rate_table(table);
  const RateTable parsed = parse_rate_table(two);
  REQUIRE(parsed.rows.size() == 2);
  CHECK(std::isnan(parsed.rows[0].rate_v));
  CHECK(parsed.rows[1].err_v == doctest::Approx(1.008e-4).epsilon(1e-12));
  CHECK(parsed.rows[1].rate_w == doctest::Approx(1.893).epsilon(1e-12));

  // Six significant digits in the emitted text.
  CHECK(two.find("1.008e-05") == std::string::npos);
  CHECK(two.find("0.000365") != std::string::npos);

  RateTable empty;
  CHECK_THROWS_AS(format_rate_table(empty), std::invalid_argument);
}

TEST_CASE("emitted CSV files are byte-identical across runs (determinism)") {
  const PhysParams phys(0.01, 0.001);
  const auto dir = std::filesystem::temp_directory_path() / "mhdens_io_test";
  std::filesystem::create_directories(dir);

  auto emit_once = [&](const std::string& name) {
    const RateTable table = convergence_study(standard_levels(2, 0.001), 0.001, phys, 0.001, 4);
    const std::string path = (dir / name).string();
    emit_rate_table(table, path);
    return slurp(path);
  };
  const std::string a = emit_once("a.csv");
  const std::string b = emit_once("b.csv");
  CHECK(a == b);
  CHECK(a.substr(0, 31) == "h,dt,err_v,rate_v,err_w,rate_w\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable path raises") {
  RateTable table;
  table.rows.push_back({0.5, 0.1, 1.0, std::nan(""), 1.0, std::nan("")});
  CHECK_THROWS_AS(emit_rate_table(table, "/nonexistent_dir_zzz/table.csv"), std::runtime_error);
}
