#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhdens/channel.hpp"
#include "mhdens/quadrature.hpp"

using namespace mhdens;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ChannelConfig quick_config(const std::string& out_dir) {
  ChannelConfig cfg;
  cfg.cells_per_unit = 1;
  cfg.dt = 0.001;
  cfg.t_end = 0.005;
  cfg.eps = 0.001;
  cfg.snapshot_interval = 0;  // final snapshot only
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("channel boundary data") {
  const ChannelBcValue mid = channel_bc(BoundaryTag::inlet, 0.0, 5.0, 0.0);
  CHECK(mid.u[0] == doctest::Approx(1.0).epsilon(1e-15));  // 25/25
  CHECK(mid.u[1] == 0.0);
  CHECK(mid.b[0] == 0.0);
  CHECK(mid.b[1] == 1.0);
  const auto [v, w] = std::pair(Vec2(mid.u + mid.b), Vec2(mid.u - mid.b));
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == -1.0);

  // The profile vanishes where the inlet meets the walls.
  CHECK(channel_bc(BoundaryTag::inlet, 0.0, 0.0, 0.0).u.norm() == 0.0);
  CHECK(channel_bc(BoundaryTag::inlet, 0.0, 10.0, 0.0).u.norm() == 0.0);

  const ChannelBcValue wall = channel_bc(BoundaryTag::wall, 3.0, 0.0, 1.0);
  CHECK(wall.u.norm() == 0.0);
  CHECK((Vec2(wall.u + wall.b) - Vec2(0, 1)).norm() == 0.0);
  CHECK((Vec2(wall.u - wall.b) - Vec2(0, -1)).norm() == 0.0);

  CHECK_THROWS_AS(channel_bc(BoundaryTag::interior, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("imposed inflow flux integrates to 100/15") {
  const Mesh mesh = step_channel(2);
  const Rule1D rule = gauss_legendre(3);
  double flux = 0.0;
  for (const auto& f : mesh.facets) {
    if (f.tag != BoundaryTag::inlet) continue;
    const auto& a = mesh.vertices[f.vertices[0]];
    const auto& b = mesh.vertices[f.vertices[1]];
    const double len = std::abs(b[1] - a[1]);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double y = 0.5 * (a[1] + b[1]) + 0.5 * (b[1] - a[1]) * rule.points[q];
      flux += 0.5 * len * rule.weights[q] * channel_bc(BoundaryTag::inlet, 0.0, y, 0.0).u[0];
    }
  }
  CHECK(flux == doctest::Approx(100.0 / 15.0).epsilon(1e-10));
}

TEST_CASE("zero perturbation keeps all members bit-identical") {
  const MixedSpace space = make_mixed_space(step_channel(1));
  SchemeParams params{PhysParams(0.001, 1.0), TimeParams(0.001, 0.003)};
  params.bootstrap = BootstrapMode::backward_euler;

  std::vector<MemberProblem> members;
  for (int j = 0; j < 4; ++j) members.push_back(make_channel_member(1.0));  // eps = 0: factor 1
  EnsembleStepper stepper(space, params, std::move(members));
  stepper.run();
  const auto& state = stepper.state();
  for (int j = 1; j < 4; ++j) {
    CHECK((state.members[j].v - state.members[0].v).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((state.members[j].w - state.members[0].w).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("desk-scale channel run: invariants, snapshots, steady boundary data") {
  const std::string out = (std::filesystem::temp_directory_path() / "mhdens_channel_test").string();
  std::filesystem::remove_all(out);
  ChannelConfig cfg = quick_config(out);

  const ChannelResult result = run_channel(cfg);
  CHECK(result.steps_completed == 5);
  CHECK(result.max_div_residual <= 1e-8);
  CHECK(result.elsasser_consistency <= 1e-13);
  REQUIRE(!result.snapshot_files.empty());

  // Snapshot files exist and carry the three advertised fields.
  const std::string text = slurp(result.snapshot_files.front());
  CHECK(text.find("VECTORS u double") != std::string::npos);
  CHECK(text.find("VECTORS B double") != std::string::npos);
  CHECK(text.find("SCALARS B_mag double 1") != std::string::npos);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);

  // mean + one file per member
  CHECK(result.snapshot_files.size() == 1 + cfg.ensemble_size);

  // No blow-up: the energy accumulations stay finite.
  for (const auto& m : result.energy.members) {
    CHECK(std::isfinite(m.lhs));
    CHECK(std::isfinite(m.cum_diffusion));
  }

  std::filesystem::remove_all(out);
}

TEST_CASE("steady boundary data leaves boundary DOFs constant across steps") {
  const Mesh mesh = step_channel(1);
  const MixedSpace space = make_mixed_space(mesh);
  SchemeParams params{PhysParams(0.001, 1.0), TimeParams(0.001, 0.003)};
  params.bootstrap = BootstrapMode::backward_euler;

  MemberProblem member;
  member.v_bc = [](BoundaryTag tag, double x, double y, double t) {
    const ChannelBcValue bc = channel_bc(tag, x, y, t);
    return Vec2(bc.u + bc.b);
  };
  member.w_bc = [](BoundaryTag tag, double x, double y, double t) {
    const ChannelBcValue bc = channel_bc(tag, x, y, t);
    return Vec2(bc.u - bc.b);
  };
  member.v_init = [](double, double y, double) { return Vec2(y * (10 - y) / 25.0, 1.0); };
  member.w_init = [](double, double y, double) { return Vec2(y * (10 - y) / 25.0, -1.0); };

  EnsembleStepper stepper(space, params, {member});
  stepper.initialize();
  std::vector<double> first;
  const auto dofs = boundary_velocity_dofs(space);
  for (const int dof : dofs) first.push_back(stepper.state().members[0].v[dof]);
  while (stepper.state().level < params.time.steps) stepper.advance();
  for (std::size_t k = 0; k < dofs.size(); ++k)
    CHECK(stepper.state().members[0].v[dofs[k]] == first[k]);
}
