// MHD channel flow over a step: boundary data, perturbed ensemble setup, and
// the benchmark driver with VTK snapshots.
#pragma once

#include <string>
#include <vector>

#include "mhdens/ensemble.hpp"

namespace mhdens {

struct ChannelConfig {
  int cells_per_unit = 1;
  double dt = 0.001;
  double t_end = 2.0;
  double eps = 0.001;
  double nu = 0.001;
  double nu_m = 1.0;
  int ensemble_size = 4;
  bool perturb_b = false;  // scale the magnetic data by the member factors too
  int snapshot_interval = 100;  // steps between VTK snapshots (final always written)
  std::string out_dir = ".";
  ConvectionForm convection = ConvectionForm::standard;
  SolverKind solver = SolverKind::direct;
  bool share_matrix = true;
  bool write_snapshots = true;
};

struct ChannelBcValue {
  Vec2 u;
  Vec2 b;
};

/// Physical-variable boundary data: no-slip walls and step with B = (0,1);
/// the parabolic profile u = (y(10-y)/25, 0) with B = (0,1) at inlet and
/// outlet. Throws on the interior tag.
ChannelBcValue channel_bc(BoundaryTag tag, double x, double y, double t);

/// Elsässer-variable problem data for one member: boundary traces and the
/// initial fields (inflow profile extended across the channel), with the
/// velocity parts scaled by the member factor.
MemberProblem make_channel_member(double factor, bool perturb_b = false);

struct ChannelResult {
  int steps_completed = 0;
  double max_div_residual = 0.0;
  double elsasser_consistency = 0.0;  // max |(u+B) - v| over emitted snapshots
  std::vector<std::string> snapshot_files;
  EnergyReport energy;
  PerfCounters perf;
};

ChannelResult run_channel(const ChannelConfig& config);

}  // namespace mhdens
