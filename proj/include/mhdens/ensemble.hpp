// Decoupled second-order ensemble time stepper in Elsässer variables.
//
// Each time step solves two Oseen-type saddle-point problems (one per
// Elsässer field). The implicit coefficient matrix of each sub-step depends
// only on the ensemble mean of the extrapolated fields, so all J members
// share one factorization per sub-step; member data enters through the
// right-hand sides and the Dirichlet values only.
#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "mhdens/fem.hpp"
#include "mhdens/linsolve.hpp"

namespace mhdens {

struct PhysParams {
  double nu;
  double nu_m;
  double alpha;  // nu + nu_m - |nu - nu_m|

  PhysParams(double nu_, double nu_m_);
};

struct TimeParams {
  double dt;
  double t_end;
  int steps;  // M = T / dt

  TimeParams(double dt_, double t_end_);
};

enum class BootstrapMode { backward_euler, exact_interpolation };

/// first_order lags the extrapolated quantities (mean, fluctuations, cross
/// diffusion, transported field) at u^n instead of 2u^n - u^{n-1}. It exists
/// as a negative control for the convergence study.
enum class TimeLag { bdf2, first_order };

struct SchemeParams {
  PhysParams phys;
  TimeParams time;
  ConvectionForm convection = ConvectionForm::standard;
  BootstrapMode bootstrap = BootstrapMode::backward_euler;
  SolverKind solver = SolverKind::direct;
  bool share_matrix = true;  // false: assemble + factor per member (benchmark mode)
  TimeLag lag = TimeLag::bdf2;
  double monitor_c = 1.0;   // constant C of the timestep-restriction monitor
  double monitor_ci = 1.0;  // inverse-inequality constant C_i
  bool track_forcing_norms = false;  // accumulate the forcing side of the energy bound
};

struct MemberProblem {
  VectorField f1;  // forcing of the v equation; empty means zero
  VectorField f2;
  BoundaryField v_bc;  // Dirichlet data per boundary tag
  BoundaryField w_bc;
  VectorField v_exact;  // optional analytic fields (exact bootstrap, initial data)
  VectorField w_exact;
  VectorField v_init;  // used at t = 0 when set, else v_exact
  VectorField w_init;
};

struct MemberState {
  Vec v, v_prev;  // levels n and n-1
  Vec w, w_prev;
  Vec q, r;  // pressure multipliers at level n
};

struct EnsembleState {
  std::vector<MemberState> members;
  int level = 0;
  double time = 0.0;
};

// --- Elsässer conversions ---

std::pair<Vec, Vec> to_elsasser(const Vec& u, const Vec& b);    // v = u+B, w = u-B
std::pair<Vec, Vec> from_elsasser(const Vec& v, const Vec& w);  // u = (v+w)/2, B = (v-w)/2

// --- ensemble statistics ---

struct MeanFluct {
  Vec mean;
  std::vector<Vec> fluct;
};

/// Mean of the given per-member fields and the member deviations from it.
/// The per-entry reduction sorts the J values before summing, so relabeling
/// members permutes the output exactly.
MeanFluct mean_fluct_of(const std::vector<Vec>& fields);

/// <u>^n = (1/J) sum_j (2 u_j^n - u_j^{n-1}) and the member fluctuations.
MeanFluct ensemble_mean_fluct(const std::vector<Vec>& level_n, const std::vector<Vec>& level_nm1);

// --- diagnostics ---

struct StepRecord {
  int level = 0;       // level produced by this step
  double rho = 0.0;    // timestep-restriction monitor ratio
  bool rho_warning = false;
  double max_div_residual = 0.0;  // over members and both fields
  bool audited = false;
  bool shared_matrix_ok = true;
};

struct EnergyReport {
  struct Member {
    std::vector<double> norm_v2, norm_w2;      // per level: |v^n|^2, |w^n|^2
    std::vector<double> extrap_v2, extrap_w2;  // per level >= 1: |2u^n - u^{n-1}|^2
    double cum_diffusion = 0.0;  // alpha dt sum (|grad v|^2 + |grad w|^2), levels 2..M
    double cum_forcing = 0.0;    // (12 dt / alpha) sum (|f1|_{-1} + |f2|_{-1})
    double lhs = 0.0;
    double rhs = 0.0;
    bool bounded = false;  // lhs <= rhs
  };
  std::vector<Member> members;
  bool forcing_tracked = false;
};

struct PerfCounters {
  long matrix_assemblies = 0;  // implicit coefficient-matrix builds
  long factorizations = 0;     // numeric factorizations / preconditioner builds
  long rhs_solves = 0;
  double seconds = 0.0;  // wall clock spent in bootstrap + advance
};

class EnsembleStepper {
 public:
  EnsembleStepper(const MixedSpace& space, const SchemeParams& params, std::vector<MemberProblem> members);

  /// Sets level-0 data and bootstraps level 1 (backward Euler or exact
  /// interpolation depending on the scheme parameters).
  void initialize();

  /// One BDF2 step: levels (n, n-1) -> n+1. Requires initialize().
  void advance();

  /// initialize() + advance() up to T.
  void run();

  using LevelCallback = std::function<void(int level, double time, const EnsembleState&)>;
  void set_level_callback(LevelCallback cb) { on_level_ = std::move(cb); }

  /// Audit the named levels: rebuild each sub-step matrix once per member and
  /// require bit-identical arrays. Effective in shared-matrix mode (the naive
  /// mode builds per-member matrices anyway).
  void set_audit_levels(std::vector<int> levels);

  /// Solve the w sub-step before the v sub-step (results must not change).
  void set_swap_substeps(bool swap) { swap_substeps_ = swap; }

  const EnsembleState& state() const { return state_; }
  const MixedSpace& space() const { return *space_; }
  const SchemeParams& params() const { return params_; }
  int ensemble_size() const { return static_cast<int>(problems_.size()); }

  const std::vector<StepRecord>& step_records() const { return records_; }
  const PerfCounters& perf() const { return perf_; }
  double max_divergence_residual() const { return max_div_residual_; }
  int monitor_warnings() const;

  /// rho = dt (3 (nu-nu_m)^2 c_i + 12 c^2 c_i^2 max_j max(|grad v'|, |grad w'|)) / (alpha h^2)
  /// evaluated on the current levels.
  double monitor_ratio() const;

  EnergyReport energy_report() const;

  double mass_norm2(const Vec& u) const;  // u^T M u
  double grad_norm2(const Vec& u) const;  // u^T K u

  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& divergence() const { return div_; }

  /// Constrained sub-step matrix for the current levels (1 = v step, 2 = w
  /// step); exposed for the shared-matrix tests.
  SparseMatrix build_substep_matrix(int substep) const;

 private:
  struct Snapshot;  // extrapolated fields + statistics for one step

  Snapshot make_snapshot(bool use_level0_only) const;
  ConstrainedSystem build_system(double time_coeff, const Vec& mean) const;
  void oseen_step(const Snapshot& snap, double t_next);
  void emit_level();

  const MixedSpace* space_;
  SchemeParams params_;
  std::vector<MemberProblem> problems_;
  EnsembleState state_;

  SparseMatrix mass_, stiffness_, div_;
  SparseMatrix pattern_;       // saddle-point sparsity with static blocks
  Vec static_mass_vals_;       // per-nonzero values of the mass block in pattern order
  Vec static_stiff_vals_;
  Vec static_div_vals_;
  std::vector<char> constrained_;
  Vec pressure_load_;
  double area_ = 0.0;

  LinearSolver solver_v_, solver_w_;
  std::vector<std::unique_ptr<LinearSolver>> naive_solvers_;  // 2J solvers in naive mode

  LevelCallback on_level_;
  std::vector<int> audit_levels_;
  bool swap_substeps_ = false;

  std::vector<StepRecord> records_;
  PerfCounters perf_;
  double max_div_residual_ = 0.0;
  bool initialized_ = false;

  // energy accumulators (per member)
  struct EnergyAccum {
    std::vector<double> norm_v2, norm_w2, extrap_v2, extrap_w2;
    double cum_diffusion = 0.0;
    double cum_forcing = 0.0;
  };
  std::vector<EnergyAccum> energy_;
  void accumulate_energy(int level);
};

}  // namespace mhdens
