// Command-line driver: convergence study, channel benchmark, energy report.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mhdens/channel.hpp"
#include "mhdens/config.hpp"
#include "mhdens/io.hpp"
#include "mhdens/mms.hpp"

namespace {

using namespace mhdens;

struct CliOptions {
  std::string config_path;
  RunConfig flags;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (key=value lines)");
  cmd->add_option("--nu", [&opts](const std::vector<std::string>& v) { opts.flags.nu = std::stod(v[0]); return true; },
                  "kinematic viscosity");
  cmd->add_option("--num", [&opts](const std::vector<std::string>& v) { opts.flags.nu_m = std::stod(v[0]); return true; },
                  "magnetic resistivity");
  cmd->add_option("--dt", [&opts](const std::vector<std::string>& v) { opts.flags.dt = std::stod(v[0]); return true; },
                  "time step");
  cmd->add_option("--T", [&opts](const std::vector<std::string>& v) { opts.flags.t_end = std::stod(v[0]); return true; },
                  "end time");
  cmd->add_option("--eps", [&opts](const std::vector<std::string>& v) { opts.flags.eps = std::stod(v[0]); return true; },
                  "perturbation parameter");
  cmd->add_option("--levels", [&opts](const std::vector<std::string>& v) { opts.flags.levels = std::stoi(v[0]); return true; },
                  "number of refinement levels (converge)");
  cmd->add_option("--J", [&opts](const std::vector<std::string>& v) { opts.flags.ensemble_size = std::stoi(v[0]); return true; },
                  "ensemble size");
  cmd->add_option("--n", [&opts](const std::vector<std::string>& v) { opts.flags.n = std::stoi(v[0]); return true; },
                  "unit-square resolution (energy)");
  cmd->add_option("--cells-per-unit",
                  [&opts](const std::vector<std::string>& v) { opts.flags.cells_per_unit = std::stoi(v[0]); return true; },
                  "channel mesh density");
  cmd->add_option("--snapshot-interval",
                  [&opts](const std::vector<std::string>& v) { opts.flags.snapshot_interval = std::stoi(v[0]); return true; },
                  "steps between VTK snapshots (channel)");
  cmd->add_option("--out", [&opts](const std::vector<std::string>& v) { opts.flags.out_dir = v[0]; return true; },
                  "output directory");
  cmd->add_option("--threads", [&opts](const std::vector<std::string>& v) { opts.flags.threads = std::stoi(v[0]); return true; },
                  "thread count (recorded; execution is serial)");
  cmd->add_option("--solver", [&opts](const std::vector<std::string>& v) { opts.flags.solver = v[0]; return true; },
                  "direct | iterative");
  cmd->add_option("--convection", [&opts](const std::vector<std::string>& v) { opts.flags.convection = v[0]; return true; },
                  "standard | skew");
  cmd->add_option("--bootstrap", [&opts](const std::vector<std::string>& v) { opts.flags.bootstrap = v[0]; return true; },
                  "be | exact");
  cmd->add_flag("--naive", [&opts](std::int64_t) { opts.flags.naive = true; },
                "disable matrix sharing (assemble + factor per member)");
}

ResolvedConfig resolve(const CliOptions& opts, const std::string& experiment) {
  RunConfig from_file;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("config: cannot open " + opts.config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    from_file = parse_config_text(buffer.str());
  }
  RunConfig merged = merge_config(from_file, opts.flags);
  merged.experiment = experiment;
  return resolve_config(merged);
}

MmsOptions mms_options(const ResolvedConfig& cfg) {
  MmsOptions opts;
  opts.convection = cfg.convection == "skew" ? ConvectionForm::skew : ConvectionForm::standard;
  opts.bootstrap = cfg.bootstrap == "be" ? BootstrapMode::backward_euler : BootstrapMode::exact_interpolation;
  opts.solver = cfg.solver == "iterative" ? SolverKind::iterative : SolverKind::direct;
  opts.share_matrix = !cfg.naive;
  return opts;
}

void print_perf(const PerfCounters& perf) {
  std::printf("perf: assemblies=%ld factorizations=%ld solves=%ld wall=%.3fs\n", perf.matrix_assemblies,
              perf.factorizations, perf.rhs_solves, perf.seconds);
}

int run_converge(const ResolvedConfig& cfg) {
  const PhysParams phys(cfg.nu, cfg.nu_m);
  std::vector<MmsLevelResult> details;
  const RateTable table = convergence_study(standard_levels(cfg.levels, cfg.t_end), cfg.eps, phys, cfg.t_end,
                                            cfg.ensemble_size, mms_options(cfg), &details);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "rate_table.csv").string();
  emit_rate_table(table, path);
  std::cout << format_rate_table(table);
  std::cout << "wrote " << path << "\n";
  PerfCounters total;
  double max_div = 0.0, max_rho = 0.0;
  for (const auto& d : details) {
    total.matrix_assemblies += d.perf.matrix_assemblies;
    total.factorizations += d.perf.factorizations;
    total.rhs_solves += d.perf.rhs_solves;
    total.seconds += d.perf.seconds;
    max_div = std::max(max_div, d.max_div_residual);
    max_rho = std::max(max_rho, d.max_rho);
  }
  print_perf(total);
  std::printf("max divergence residual = %.3e, max timestep-monitor rho = %.3e\n", max_div, max_rho);
  return 0;
}

int run_channel_cmd(const ResolvedConfig& cfg) {
  ChannelConfig channel;
  channel.cells_per_unit = cfg.cells_per_unit;
  channel.dt = cfg.dt;
  channel.t_end = cfg.t_end;
  channel.eps = cfg.eps;
  channel.nu = cfg.nu;
  channel.nu_m = cfg.nu_m;
  channel.ensemble_size = cfg.ensemble_size;
  channel.snapshot_interval = cfg.snapshot_interval;
  channel.out_dir = cfg.out_dir;
  channel.convection = cfg.convection == "skew" ? ConvectionForm::skew : ConvectionForm::standard;
  channel.solver = cfg.solver == "iterative" ? SolverKind::iterative : SolverKind::direct;
  channel.share_matrix = !cfg.naive;

  const ChannelResult result = run_channel(channel);
  std::printf("channel: %d steps, %zu snapshots, max div residual %.3e, elsasser consistency %.3e\n",
              result.steps_completed, result.snapshot_files.size(), result.max_div_residual,
              result.elsasser_consistency);
  print_perf(result.perf);
  return 0;
}

int run_energy(const ResolvedConfig& cfg) {
  const PhysParams phys(cfg.nu, cfg.nu_m);
  MmsOptions opts = mms_options(cfg);
  opts.track_forcing_norms = true;
  const MmsLevelResult result =
      run_mms_level(cfg.n, cfg.dt, cfg.t_end, cfg.eps, phys, cfg.ensemble_size, opts);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "energy.csv").string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("energy: cannot open " + path);
  out << "member,level,norm_v2,norm_w2,extrap_v2,extrap_w2\n";
  for (std::size_t j = 0; j < result.energy.members.size(); ++j) {
    const auto& m = result.energy.members[j];
    for (std::size_t level = 0; level < m.norm_v2.size(); ++level)
      out << j + 1 << "," << level << "," << m.norm_v2[level] << "," << m.norm_w2[level] << ","
          << m.extrap_v2[level] << "," << m.extrap_w2[level] << "\n";
  }
  std::cout << "wrote " << path << "\n";

  for (std::size_t j = 0; j < result.energy.members.size(); ++j) {
    const auto& m = result.energy.members[j];
    std::printf("member %zu: lhs=%.8e rhs=%.8e diffusion=%.3e forcing=%.3e bounded=%s\n", j + 1, m.lhs,
                m.rhs, m.cum_diffusion, m.cum_forcing, m.bounded ? "yes" : "no");
  }
  if (cfg.convection != "skew")
    std::cout << "note: with the standard convection form the bound is reported, not asserted\n";
  std::printf("errors: |<e_v>|_{2,1}=%.6e |<e_w>|_{2,1}=%.6e\n", result.err21_v, result.err21_w);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order decoupled MHD flow-ensemble simulator (Elsasser variables)"};
  app.require_subcommand(1);

  CliOptions opts;
  CLI::App* converge = app.add_subcommand("converge", "manufactured-solution convergence study");
  CLI::App* channel = app.add_subcommand("channel", "channel flow over a step benchmark");
  CLI::App* energy = app.add_subcommand("energy", "stability-bound energy report");
  for (CLI::App* cmd : {converge, channel, energy}) add_common_flags(cmd, opts);

  try {
    app.parse(argc, argv);
    const std::string experiment =
        converge->parsed() ? "converge" : channel->parsed() ? "channel" : "energy";
    const ResolvedConfig cfg = resolve(opts, experiment);
    std::cout << "# resolved configuration\n" << echo_config(cfg);
    if (experiment == "converge") return run_converge(cfg);
    if (experiment == "channel") return run_channel_cmd(cfg);
    return run_energy(cfg);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mhdens::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mhdens::SingularMatrixError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const mhdens::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
