#include "mhdens/mms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mhdens {

Vec2 ManufacturedSolution::v(double x, double y, double t) const {
  const double a = 1.0 + t;
  return {std::cos(y) + a * std::sin(y), std::sin(x) + a * std::cos(x)};
}

Vec2 ManufacturedSolution::w(double x, double y, double t) const {
  const double a = 1.0 + t;
  return {std::cos(y) - a * std::sin(y), std::sin(x) - a * std::cos(x)};
}

Vec2 ManufacturedSolution::v_t(double x, double y, double) const { return {std::sin(y), std::cos(x)}; }

Vec2 ManufacturedSolution::w_t(double x, double y, double) const { return {-std::sin(y), -std::cos(x)}; }

Eigen::Matrix2d ManufacturedSolution::grad_v(double x, double y, double t) const {
  const double a = 1.0 + t;
  Eigen::Matrix2d g;
  g << 0.0, -std::sin(y) + a * std::cos(y),  //
      std::cos(x) - a * std::sin(x), 0.0;
  return g;
}

Eigen::Matrix2d ManufacturedSolution::grad_w(double x, double y, double t) const {
  const double a = 1.0 + t;
  Eigen::Matrix2d g;
  g << 0.0, -std::sin(y) - a * std::cos(y),  //
      std::cos(x) + a * std::sin(x), 0.0;
  return g;
}

Vec2 ManufacturedSolution::lap_v(double x, double y, double t) const { return -v(x, y, t); }

Vec2 ManufacturedSolution::lap_w(double x, double y, double t) const { return -w(x, y, t); }

double ManufacturedSolution::p(double x, double y, double t) const { return (x - y) * (1.0 + t); }

Vec2 ManufacturedSolution::grad_p(double, double, double t) const { return {1.0 + t, -(1.0 + t)}; }

std::vector<double> perturbation_factors(int ensemble_size, double eps) {
  if (ensemble_size < 1) throw std::invalid_argument("perturbation_factors: ensemble size must be >= 1");
  std::vector<double> factors(ensemble_size, 1.0);
  for (int j = 0; j + 1 < ensemble_size; j += 2) {
    const double scale = (j / 2 + 1) * eps;
    factors[j] = 1.0 + scale;
    factors[j + 1] = 1.0 - scale;
  }
  return factors;
}

Vec2 mms_forcing_f1(const ManufacturedSolution& sol, const PhysParams& phys, double s, double x, double y,
                    double t) {
  const Vec2 advect = sol.grad_v(x, y, t) * sol.w(x, y, t);  // (w . grad) v
  return s * sol.v_t(x, y, t) + (s * s) * advect + sol.grad_p(x, y, t) -
         s * 0.5 * (phys.nu + phys.nu_m) * sol.lap_v(x, y, t) -
         s * 0.5 * (phys.nu - phys.nu_m) * sol.lap_w(x, y, t);
}

Vec2 mms_forcing_f2(const ManufacturedSolution& sol, const PhysParams& phys, double s, double x, double y,
                    double t) {
  const Vec2 advect = sol.grad_w(x, y, t) * sol.v(x, y, t);  // (v . grad) w
  return s * sol.w_t(x, y, t) + (s * s) * advect + sol.grad_p(x, y, t) -
         s * 0.5 * (phys.nu + phys.nu_m) * sol.lap_w(x, y, t) -
         s * 0.5 * (phys.nu - phys.nu_m) * sol.lap_v(x, y, t);
}

MemberProblem make_mms_member(const PhysParams& phys, double factor) {
  const ManufacturedSolution sol;
  MemberProblem member;
  member.f1 = [sol, phys, factor](double x, double y, double t) {
    return mms_forcing_f1(sol, phys, factor, x, y, t);
  };
  member.f2 = [sol, phys, factor](double x, double y, double t) {
    return mms_forcing_f2(sol, phys, factor, x, y, t);
  };
  member.v_exact = [sol, factor](double x, double y, double t) { return Vec2(factor * sol.v(x, y, t)); };
  member.w_exact = [sol, factor](double x, double y, double t) { return Vec2(factor * sol.w(x, y, t)); };
  member.v_bc = [sol, factor](BoundaryTag, double x, double y, double t) {
    return Vec2(factor * sol.v(x, y, t));
  };
  member.w_bc = [sol, factor](BoundaryTag, double x, double y, double t) {
    return Vec2(factor * sol.w(x, y, t));
  };
  return member;
}

MmsLevelResult run_mms_level(int n, double dt, double t_end, double eps, const PhysParams& phys,
                             int ensemble_size, const MmsOptions& options) {
  const Mesh mesh = unit_square(n);
  const MixedSpace space = make_mixed_space(mesh);

  SchemeParams params{phys, TimeParams(dt, t_end)};
  params.convection = options.convection;
  params.bootstrap = options.bootstrap;
  params.solver = options.solver;
  params.share_matrix = options.share_matrix;
  params.lag = options.lag;
  params.track_forcing_norms = options.track_forcing_norms;

  std::vector<MemberProblem> members;
  for (const double s : perturbation_factors(ensemble_size, eps)) members.push_back(make_mms_member(phys, s));

  EnsembleStepper stepper(space, params, std::move(members));
  stepper.set_audit_levels(options.audit_levels);

  const ManufacturedSolution sol;
  MmsLevelResult result;
  double err2_v = 0.0, err2_w = 0.0;
  double final_l2_v = 0.0, final_l2_w = 0.0;

  const int last_level = params.time.steps;
  // The ensemble-mean error against the true mean <v>(t) = v(t) (the member
  // factors average to one), with the exact gradient evaluated at quadrature
  // points.
  stepper.set_level_callback([&](int level, double time, const EnsembleState& state) {
    if (level < 1) return;
    std::vector<Vec> vs, ws;
    vs.reserve(state.members.size());
    ws.reserve(state.members.size());
    for (const auto& m : state.members) {
      vs.push_back(m.v);
      ws.push_back(m.w);
    }
    const Vec mean_v = mean_fluct_of(vs).mean;
    const Vec mean_w = mean_fluct_of(ws).mean;
    const double hv = h1_error_velocity(
        space, mean_v, [&](double x, double y, double t) { return sol.grad_v(x, y, t); }, time);
    const double hw = h1_error_velocity(
        space, mean_w, [&](double x, double y, double t) { return sol.grad_w(x, y, t); }, time);
    err2_v += dt * hv * hv;
    err2_w += dt * hw * hw;
    if (level == last_level) {
      final_l2_v = l2_error_velocity(
          space, mean_v, [&](double x, double y, double t) { return Vec2(sol.v(x, y, t)); }, time);
      final_l2_w = l2_error_velocity(
          space, mean_w, [&](double x, double y, double t) { return Vec2(sol.w(x, y, t)); }, time);
    }
  });

  stepper.run();

  result.err21_v = std::sqrt(err2_v);
  result.err21_w = std::sqrt(err2_w);
  result.final_l2_v = final_l2_v;
  result.final_l2_w = final_l2_w;
  result.max_div_residual = stepper.max_divergence_residual();
  result.monitor_warnings = stepper.monitor_warnings();
  for (const auto& rec : stepper.step_records()) {
    result.max_rho = std::max(result.max_rho, rec.rho);
    if (rec.audited && !rec.shared_matrix_ok) result.audits_passed = false;
  }
  result.perf = stepper.perf();
  result.energy = stepper.energy_report();
  return result;
}

std::vector<LevelSpec> standard_levels(int count, double t_end) {
  std::vector<LevelSpec> levels;
  int n = 2;
  double dt = t_end / 4.0;
  for (int i = 0; i < count; ++i) {
    levels.push_back({n, dt});
    n *= 2;
    dt *= 0.5;
  }
  return levels;
}

RateTable convergence_study(const std::vector<LevelSpec>& levels, double eps, const PhysParams& phys,
                            double t_end, int ensemble_size, const MmsOptions& options,
                            std::vector<MmsLevelResult>* details) {
  RateTable table;
  for (const auto& level : levels) {
    const MmsLevelResult res = run_mms_level(level.n, level.dt, t_end, eps, phys, ensemble_size, options);
    RateRow row;
    row.h = 1.0 / level.n;
    row.dt = level.dt;
    row.err_v = res.err21_v;
    row.err_w = res.err21_w;
    row.rate_v = row.rate_w = std::numeric_limits<double>::quiet_NaN();
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      row.rate_v = std::log2(prev.err_v / row.err_v);
      row.rate_w = std::log2(prev.err_w / row.err_w);
    }
    table.rows.push_back(row);
    if (details) details->push_back(res);
  }
  return table;
}

}  // namespace mhdens
