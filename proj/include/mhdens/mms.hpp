// Manufactured-solution harness: closed-form Elsässer fields on the unit
// square, the perturbed ensemble built from them, analytic forcing, error
// norms of the ensemble mean, and the h/dt convergence study.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mhdens/ensemble.hpp"

namespace mhdens {

// v = (cos y + (1+t) sin y, sin x + (1+t) cos x)
// w = (cos y - (1+t) sin y, sin x - (1+t) cos x)
// p = (x - y)(1 + t), lambda = 0 (so q = r = p)
struct ManufacturedSolution {
  Vec2 v(double x, double y, double t) const;
  Vec2 w(double x, double y, double t) const;
  Vec2 v_t(double x, double y, double t) const;
  Vec2 w_t(double x, double y, double t) const;
  Eigen::Matrix2d grad_v(double x, double y, double t) const;  // (i,j) = d v_i / d x_j
  Eigen::Matrix2d grad_w(double x, double y, double t) const;
  Vec2 lap_v(double x, double y, double t) const;
  Vec2 lap_w(double x, double y, double t) const;
  double p(double x, double y, double t) const;
  Vec2 grad_p(double x, double y, double t) const;
};

/// Member scale factors: 1 +/- eps for the first pair, 1 +/- 2 eps for the
/// second, and so on; an unpaired trailing member gets factor 1, so the mean
/// of the factors is always exactly 1.
std::vector<double> perturbation_factors(int ensemble_size, double eps);

/// Forcing of the member with scale factor s, assembled from the analytic
/// pieces: time derivative, advection (scales with s^2), pressure gradient,
/// and the two diffusion terms.
Vec2 mms_forcing_f1(const ManufacturedSolution& sol, const PhysParams& phys, double s, double x, double y,
                    double t);
Vec2 mms_forcing_f2(const ManufacturedSolution& sol, const PhysParams& phys, double s, double x, double y,
                    double t);

/// Problem data (forcing, Dirichlet traces, exact fields) for one member.
MemberProblem make_mms_member(const PhysParams& phys, double factor);

struct MmsOptions {
  ConvectionForm convection = ConvectionForm::standard;
  BootstrapMode bootstrap = BootstrapMode::exact_interpolation;
  SolverKind solver = SolverKind::direct;
  bool share_matrix = true;
  TimeLag lag = TimeLag::bdf2;
  bool track_forcing_norms = false;
  std::vector<int> audit_levels;
};

struct MmsLevelResult {
  double err21_v = 0.0;  // (dt sum_n |grad(<e_v>^n)|^2)^(1/2), n = 1..M
  double err21_w = 0.0;
  double final_l2_v = 0.0;
  double final_l2_w = 0.0;
  double max_div_residual = 0.0;
  int monitor_warnings = 0;
  double max_rho = 0.0;
  bool audits_passed = true;
  PerfCounters perf;
  EnergyReport energy;
};

/// One run on unit_square(n) with the given time step.
MmsLevelResult run_mms_level(int n, double dt, double t_end, double eps, const PhysParams& phys,
                             int ensemble_size, const MmsOptions& options = {});

struct RateRow {
  double h = 0.0;  // nominal grid size 1/n
  double dt = 0.0;
  double err_v = 0.0;
  double rate_v = 0.0;  // NaN on the first row
  double err_w = 0.0;
  double rate_w = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
};

struct LevelSpec {
  int n;
  double dt;
};

/// The standard refinement ladder: (n, dt) = (2, T/4), (4, T/8), ... halving
/// h and dt together.
std::vector<LevelSpec> standard_levels(int count, double t_end);

/// Runs every level and fills observed rates between consecutive rows.
RateTable convergence_study(const std::vector<LevelSpec>& levels, double eps, const PhysParams& phys,
                            double t_end, int ensemble_size, const MmsOptions& options = {},
                            std::vector<MmsLevelResult>* details = nullptr);

}  // namespace mhdens
