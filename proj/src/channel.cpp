#include "mhdens/channel.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "mhdens/mms.hpp"
#include "mhdens/vtk.hpp"

namespace mhdens {

ChannelBcValue channel_bc(BoundaryTag tag, double, double y, double) {
  switch (tag) {
    case BoundaryTag::wall:
    case BoundaryTag::step:
      return {Vec2(0.0, 0.0), Vec2(0.0, 1.0)};
    case BoundaryTag::inlet:
    case BoundaryTag::outlet:
      return {Vec2(y * (10.0 - y) / 25.0, 0.0), Vec2(0.0, 1.0)};
    case BoundaryTag::interior:
      break;
  }
  throw std::invalid_argument("channel_bc: not a boundary tag");
}

MemberProblem make_channel_member(double factor, bool perturb_b) {
  MemberProblem member;
  const double b_factor = perturb_b ? factor : 1.0;
  member.v_bc = [factor, b_factor](BoundaryTag tag, double x, double y, double t) {
    const ChannelBcValue bc = channel_bc(tag, x, y, t);
    return Vec2(factor * bc.u + b_factor * bc.b);
  };
  member.w_bc = [factor, b_factor](BoundaryTag tag, double x, double y, double t) {
    const ChannelBcValue bc = channel_bc(tag, x, y, t);
    return Vec2(factor * bc.u - b_factor * bc.b);
  };
  // Initial data: the inflow profile extended across the channel, B = (0,1).
  member.v_init = [factor, b_factor](double, double y, double) {
    return Vec2(factor * y * (10.0 - y) / 25.0, b_factor);
  };
  member.w_init = [factor, b_factor](double, double y, double) {
    return Vec2(factor * y * (10.0 - y) / 25.0, -b_factor);
  };
  return member;
}

ChannelResult run_channel(const ChannelConfig& config) {
  const Mesh mesh = step_channel(config.cells_per_unit);
  const MixedSpace space = make_mixed_space(mesh);

  SchemeParams params{PhysParams(config.nu, config.nu_m), TimeParams(config.dt, config.t_end)};
  params.convection = config.convection;
  params.bootstrap = BootstrapMode::backward_euler;
  params.solver = config.solver;
  params.share_matrix = config.share_matrix;

  std::vector<MemberProblem> members;
  for (const double s : perturbation_factors(config.ensemble_size, config.eps))
    members.push_back(make_channel_member(s, config.perturb_b));

  EnsembleStepper stepper(space, params, std::move(members));

  ChannelResult result;
  const std::size_t nv = mesh.n_vertices();

  auto vertex_fields = [&](const Vec& v, const Vec& w) {
    // Physical fields at mesh vertices (the leading Q2 nodes).
    std::vector<Vec2> u(nv), b(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      const Vec2 vv(v[2 * i], v[2 * i + 1]);
      const Vec2 ww(w[2 * i], w[2 * i + 1]);
      u[i] = 0.5 * (vv + ww);
      b[i] = 0.5 * (vv - ww);
      result.elsasser_consistency =
          std::max(result.elsasser_consistency, ((u[i] + b[i]) - vv).cwiseAbs().maxCoeff());
    }
    return std::pair(std::move(u), std::move(b));
  };

  auto write_snapshot = [&](int level, const EnsembleState& state) {
    std::vector<Vec> vs, ws;
    for (const auto& m : state.members) {
      vs.push_back(m.v);
      ws.push_back(m.w);
    }
    const Vec mean_v = mean_fluct_of(vs).mean;
    const Vec mean_w = mean_fluct_of(ws).mean;

    auto emit = [&](const std::string& field, const Vec& v, const Vec& w) {
      auto [u, b] = vertex_fields(v, w);
      VtkPointData data;
      std::vector<double> umag(nv), bmag(nv);
      for (std::size_t i = 0; i < nv; ++i) {
        umag[i] = u[i].norm();
        bmag[i] = b[i].norm();
      }
      data.vectors.push_back({"u", std::move(u)});
      data.vectors.push_back({"B", std::move(b)});
      data.scalars.push_back({"u_mag", std::move(umag)});
      data.scalars.push_back({"B_mag", std::move(bmag)});
      const std::string path =
          (std::filesystem::path(config.out_dir) / ("channel_" + field + "_" + std::to_string(level) + ".vtk"))
              .string();
      write_vtk(path, mesh, "MHD channel flow over a step, step " + std::to_string(level), data);
      result.snapshot_files.push_back(path);
    };

    emit("mean", mean_v, mean_w);
    for (std::size_t j = 0; j < vs.size(); ++j)
      emit("member" + std::to_string(j + 1), vs[j], ws[j]);
  };

  if (config.write_snapshots) std::filesystem::create_directories(config.out_dir);

  stepper.set_level_callback([&](int level, double, const EnsembleState& state) {
    if (!config.write_snapshots) return;
    const bool due = config.snapshot_interval > 0 && level % config.snapshot_interval == 0;
    if (level == params.time.steps || due) write_snapshot(level, state);
  });

  try {
    stepper.run();
  } catch (const SolverError& e) {
    throw SolverError("channel: solver failure at step " + std::to_string(stepper.state().level + 1) +
                      ": " + e.what());
  } catch (const SingularMatrixError& e) {
    throw SolverError("channel: solver failure at step " + std::to_string(stepper.state().level + 1) +
                      ": " + e.what());
  }

  result.steps_completed = stepper.state().level;
  result.max_div_residual = stepper.max_divergence_residual();
  result.energy = stepper.energy_report();
  result.perf = stepper.perf();
  return result;
}

}  // namespace mhdens
