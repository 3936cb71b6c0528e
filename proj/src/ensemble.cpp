#include "mhdens/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace mhdens {

PhysParams::PhysParams(double nu_, double nu_m_) : nu(nu_), nu_m(nu_m_) {
  if (nu <= 0.0 || nu_m <= 0.0) throw std::invalid_argument("PhysParams: nu and nu_m must be positive");
  alpha = nu + nu_m - std::abs(nu - nu_m);
}

TimeParams::TimeParams(double dt_, double t_end_) : dt(dt_), t_end(t_end_) {
  if (dt <= 0.0 || t_end <= 0.0) throw std::invalid_argument("TimeParams: dt and T must be positive");
  steps = static_cast<int>(std::lround(t_end / dt));
  if (steps < 1 || std::abs(steps * dt - t_end) > 1e-12 * std::max(1.0, t_end))
    throw std::invalid_argument("TimeParams: T must be an integer multiple of dt");
}

std::pair<Vec, Vec> to_elsasser(const Vec& u, const Vec& b) {
  if (u.size() != b.size()) throw std::invalid_argument("to_elsasser: length mismatch");
  return {u + b, u - b};
}

std::pair<Vec, Vec> from_elsasser(const Vec& v, const Vec& w) {
  if (v.size() != w.size()) throw std::invalid_argument("from_elsasser: length mismatch");
  return {0.5 * (v + w), 0.5 * (v - w)};
}

MeanFluct mean_fluct_of(const std::vector<Vec>& fields) {
  if (fields.empty()) throw std::invalid_argument("mean_fluct_of: empty ensemble");
  const auto j_count = fields.size();
  const auto n = fields.front().size();
  for (const auto& f : fields)
    if (f.size() != n) throw std::invalid_argument("mean_fluct_of: member length mismatch");

  MeanFluct out;
  out.mean = Vec::Zero(n);
  std::vector<double> scratch(j_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < j_count; ++j) scratch[j] = fields[j][i];
    // Sorting before the sum makes the reduction independent of member order.
    std::sort(scratch.begin(), scratch.end());
    if (scratch.front() == scratch.back()) {
      out.mean[i] = scratch.front();  // identical members: mean is exact, fluctuations vanish
      continue;
    }
    double sum = 0.0;
    for (const double s : scratch) sum += s;
    out.mean[i] = sum / static_cast<double>(j_count);
  }
  out.fluct.reserve(j_count);
  for (std::size_t j = 0; j < j_count; ++j) out.fluct.push_back(fields[j] - out.mean);
  return out;
}

MeanFluct ensemble_mean_fluct(const std::vector<Vec>& level_n, const std::vector<Vec>& level_nm1) {
  if (level_n.size() != level_nm1.size())
    throw std::invalid_argument("ensemble_mean_fluct: level count mismatch");
  std::vector<Vec> ext;
  ext.reserve(level_n.size());
  for (std::size_t j = 0; j < level_n.size(); ++j) ext.push_back(2.0 * level_n[j] - level_nm1[j]);
  return mean_fluct_of(ext);
}

// --- stepper ---

struct EnsembleStepper::Snapshot {
  std::vector<Vec> ext_v, ext_w;  // transported / lagged fields
  MeanFluct mv, mw;
  std::vector<Vec> hist_v, hist_w;  // vectors hit by the mass matrix on the RHS
  double lhs_coeff = 0.0;           // time coefficient of the implicit matrix
  double hist_coeff = 0.0;
};

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

EnsembleStepper::EnsembleStepper(const MixedSpace& space, const SchemeParams& params,
                                 std::vector<MemberProblem> members)
    : space_(&space),
      params_(params),
      problems_(std::move(members)),
      solver_v_(params.solver),
      solver_w_(params.solver) {
  if (problems_.empty()) throw std::invalid_argument("EnsembleStepper: ensemble must not be empty");
  for (const auto& prob : problems_)
    if (!prob.v_bc || !prob.w_bc)
      throw std::invalid_argument("EnsembleStepper: member lacks Dirichlet boundary data");

  mass_ = assemble_mass(space);
  stiffness_ = assemble_stiffness(space);
  div_ = assemble_div(space);
  pressure_load_ = assemble_pressure_load(space);
  area_ = pressure_load_.sum();

  const int n_total = space.n_u + space.n_p;

  // Saddle-point pattern: velocity blocks, divergence coupling and its
  // transpose, and explicit zeros on the pressure diagonal so any pressure
  // DOF can be pinned in place.
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < mass_.rows(); ++r)
      for (SparseMatrix::InnerIterator it(mass_, r); it; ++it)
        trips.emplace_back(r, static_cast<int>(it.col()), 0.0);
    for (int p = 0; p < div_.rows(); ++p) {
      for (SparseMatrix::InnerIterator it(div_, p); it; ++it) {
        trips.emplace_back(space.n_u + p, static_cast<int>(it.col()), 0.0);
        trips.emplace_back(static_cast<int>(it.col()), space.n_u + p, 0.0);
      }
      trips.emplace_back(space.n_u + p, space.n_u + p, 0.0);
    }
    pattern_ = SparseMatrix(n_total, n_total);
    pattern_.setFromTriplets(trips.begin(), trips.end());
    pattern_.makeCompressed();
  }

  const auto nnz = static_cast<Eigen::Index>(pattern_.nonZeros());
  static_mass_vals_ = Vec::Zero(nnz);
  static_stiff_vals_ = Vec::Zero(nnz);
  static_div_vals_ = Vec::Zero(nnz);
  {
    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    for (int r = 0; r < n_total; ++r) {
      for (int k = outer[r]; k < outer[r + 1]; ++k) {
        const int c = inner[k];
        if (r < space.n_u && c < space.n_u) {
          static_mass_vals_[k] = mass_.coeff(r, c);
          static_stiff_vals_[k] = stiffness_.coeff(r, c);
        } else if (r >= space.n_u && c < space.n_u) {
          static_div_vals_[k] = div_.coeff(r - space.n_u, c);
        } else if (r < space.n_u && c >= space.n_u) {
          static_div_vals_[k] = div_.coeff(c - space.n_u, r);
        }
      }
    }
  }

  constrained_.assign(n_total, 0);
  for (const int dof : boundary_velocity_dofs(space)) constrained_[dof] = 1;
  constrained_[space.n_u] = 1;  // pin pressure DOF 0

  if (!params_.share_matrix)
    for (std::size_t s = 0; s < 2 * problems_.size(); ++s)
      naive_solvers_.push_back(std::make_unique<LinearSolver>(params_.solver));

  energy_.resize(problems_.size());
}

ConstrainedSystem EnsembleStepper::build_system(double time_coeff, const Vec& mean) const {
  SparseMatrix m = pattern_;
  const double diff_coeff = 0.5 * (params_.phys.nu + params_.phys.nu_m);
  {
    double* vals = m.valuePtr();
    const auto nnz = static_cast<Eigen::Index>(m.nonZeros());
    Eigen::Map<Vec>(vals, nnz) =
        time_coeff * static_mass_vals_ + diff_coeff * static_stiff_vals_ + static_div_vals_;
  }
  // Scatter the convection block of the mean field.
  const int* outer = m.outerIndexPtr();
  const int* inner = m.innerIndexPtr();
  double* vals = m.valuePtr();
  auto add_at = [&](int r, int c, double value) {
    const int* begin = inner + outer[r];
    const int* end = inner + outer[r + 1];
    const int* pos = std::lower_bound(begin, end, c);
    vals[pos - inner] += value;
  };
  double block[9][9];
  for (std::size_t cell = 0; cell < space_->cell_q2.size(); ++cell) {
    cell_convection_block(*space_, cell, mean, params_.convection, block);
    const auto& nodes = space_->cell_q2[cell];
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        add_at(2 * nodes[i], 2 * nodes[j], block[i][j]);
        add_at(2 * nodes[i] + 1, 2 * nodes[j] + 1, block[i][j]);
      }
  }
  return apply_dirichlet(std::move(m), constrained_);
}

EnsembleStepper::Snapshot EnsembleStepper::make_snapshot(bool use_level0_only) const {
  Snapshot snap;
  const auto j_count = problems_.size();
  snap.ext_v.reserve(j_count);
  snap.ext_w.reserve(j_count);
  snap.hist_v.reserve(j_count);
  snap.hist_w.reserve(j_count);

  for (const auto& m : state_.members) {
    if (use_level0_only) {
      snap.ext_v.push_back(m.v);
      snap.ext_w.push_back(m.w);
      snap.hist_v.push_back(m.v);
      snap.hist_w.push_back(m.w);
    } else if (params_.lag == TimeLag::first_order) {
      snap.ext_v.push_back(m.v);
      snap.ext_w.push_back(m.w);
      snap.hist_v.push_back(4.0 * m.v - m.v_prev);
      snap.hist_w.push_back(4.0 * m.w - m.w_prev);
    } else {
      snap.ext_v.push_back(2.0 * m.v - m.v_prev);
      snap.ext_w.push_back(2.0 * m.w - m.w_prev);
      snap.hist_v.push_back(4.0 * m.v - m.v_prev);
      snap.hist_w.push_back(4.0 * m.w - m.w_prev);
    }
  }
  snap.mv = mean_fluct_of(snap.ext_v);
  snap.mw = mean_fluct_of(snap.ext_w);
  if (use_level0_only) {
    snap.lhs_coeff = 1.0 / params_.time.dt;
    snap.hist_coeff = 1.0 / params_.time.dt;
  } else {
    snap.lhs_coeff = 1.5 / params_.time.dt;
    snap.hist_coeff = 0.5 / params_.time.dt;
  }
  return snap;
}

void EnsembleStepper::oseen_step(const Snapshot& snap, double t_next) {
  const auto j_count = problems_.size();
  const int n_u = space_->n_u;
  const int n_total = n_u + space_->n_p;
  const double cross_coeff = 0.5 * (params_.phys.nu - params_.phys.nu_m);
  const int produced_level = state_.level + 1;

  StepRecord record;
  record.level = produced_level;

  const bool audit = std::find(audit_levels_.begin(), audit_levels_.end(), produced_level) != audit_levels_.end();
  record.audited = audit;

  std::vector<Vec> new_v(j_count), new_w(j_count), new_q(j_count), new_r(j_count);

  auto run_substep = [&](bool v_step) {
    const Vec& mean = v_step ? snap.mw.mean : snap.mv.mean;

    // Shared path: one coefficient matrix and one factorization serve every
    // member. Naive path: each member assembles and factors its own copy.
    ConstrainedSystem shared_cs;
    LinearSolver* shared_solver = nullptr;
    if (params_.share_matrix) {
      shared_cs = build_system(snap.lhs_coeff, mean);
      ++perf_.matrix_assemblies;
      if (audit) {
        // Rebuild once per member through the identical path; the arrays
        // must agree bit for bit since the builder never reads member data.
        for (std::size_t j = 0; j < j_count; ++j) {
          const ConstrainedSystem other = build_system(snap.lhs_coeff, mean);
          const bool same =
              other.matrix.nonZeros() == shared_cs.matrix.nonZeros() &&
              std::memcmp(other.matrix.valuePtr(), shared_cs.matrix.valuePtr(),
                          sizeof(double) * shared_cs.matrix.nonZeros()) == 0 &&
              std::memcmp(other.matrix.innerIndexPtr(), shared_cs.matrix.innerIndexPtr(),
                          sizeof(int) * shared_cs.matrix.nonZeros()) == 0;
          if (!same) record.shared_matrix_ok = false;
        }
      }
      shared_solver = v_step ? &solver_v_ : &solver_w_;
      shared_solver->setup(shared_cs.matrix);
      ++perf_.factorizations;
    }

    for (std::size_t j = 0; j < j_count; ++j) {
      ConstrainedSystem own_cs;
      const ConstrainedSystem* cs = &shared_cs;
      LinearSolver* solver = shared_solver;
      if (!params_.share_matrix) {
        own_cs = build_system(snap.lhs_coeff, mean);
        ++perf_.matrix_assemblies;
        cs = &own_cs;
        solver = naive_solvers_[(v_step ? 0 : j_count) + j].get();
        solver->setup(own_cs.matrix);
        ++perf_.factorizations;
      }

      const auto& prob = problems_[j];
      const VectorField& body_force = v_step ? prob.f1 : prob.f2;
      Vec body = body_force ? assemble_rhs(*space_, body_force, t_next) : Vec::Zero(n_u);
      body += snap.hist_coeff * (mass_ * (v_step ? snap.hist_v[j] : snap.hist_w[j]));
      body -= cross_coeff * (stiffness_ * (v_step ? snap.ext_w[j] : snap.ext_v[j]));
      add_convection_product(*space_, v_step ? snap.mw.fluct[j] : snap.mv.fluct[j],
                             v_step ? snap.ext_v[j] : snap.ext_w[j], params_.convection, -1.0, body);

      Vec rhs = Vec::Zero(n_total);
      rhs.head(n_u) = body;

      Vec values = Vec::Zero(n_total);
      fill_boundary_velocity(*space_, v_step ? prob.v_bc : prob.w_bc, t_next, values);
      apply_constraint_values(*cs, values, rhs);

      const Vec x = solver->solve(rhs);
      ++perf_.rhs_solves;

      Vec vel = x.head(n_u);
      Vec pres = x.tail(space_->n_p);
      pres.array() -= pressure_load_.dot(pres) / area_;

      // Residual of the imposed divergence constraints (the pinned pressure
      // mode is not part of the discrete system).
      Vec div_res = div_ * vel;
      div_res[0] = 0.0;
      const double vel_norm = vel.norm();
      const double ratio = div_res.norm() / std::max(vel_norm, 1e-300);
      record.max_div_residual = std::max(record.max_div_residual, ratio);

      if (v_step) {
        new_v[j] = std::move(vel);
        new_q[j] = std::move(pres);
      } else {
        new_w[j] = std::move(vel);
        new_r[j] = std::move(pres);
      }
    }
  };

  if (swap_substeps_) {
    run_substep(false);
    run_substep(true);
  } else {
    run_substep(true);
    run_substep(false);
  }

  // Timestep-restriction monitor on the statistics this step actually used.
  {
    double max_grad = 0.0;
    for (std::size_t j = 0; j < j_count; ++j) {
      max_grad = std::max(max_grad, std::sqrt(grad_norm2(snap.mv.fluct[j])));
      max_grad = std::max(max_grad, std::sqrt(grad_norm2(snap.mw.fluct[j])));
    }
    const auto& p = params_;
    const double h = space_->mesh.h_max;
    const double numer = 3.0 * (p.phys.nu - p.phys.nu_m) * (p.phys.nu - p.phys.nu_m) * p.monitor_ci +
                         12.0 * p.monitor_c * p.monitor_c * p.monitor_ci * p.monitor_ci * max_grad;
    record.rho = p.time.dt * numer / (p.phys.alpha * h * h);
    record.rho_warning = record.rho > 1.0;
  }

  for (std::size_t j = 0; j < j_count; ++j) {
    auto& m = state_.members[j];
    m.v_prev = std::move(m.v);
    m.v = std::move(new_v[j]);
    m.w_prev = std::move(m.w);
    m.w = std::move(new_w[j]);
    m.q = std::move(new_q[j]);
    m.r = std::move(new_r[j]);
  }
  state_.level = produced_level;
  state_.time = produced_level * params_.time.dt;

  max_div_residual_ = std::max(max_div_residual_, record.max_div_residual);
  records_.push_back(record);
}

void EnsembleStepper::initialize() {
  const auto t0 = Clock::now();
  const auto j_count = problems_.size();
  state_.members.assign(j_count, MemberState{});
  state_.level = 0;
  state_.time = 0.0;
  records_.clear();
  max_div_residual_ = 0.0;
  perf_ = PerfCounters{};
  for (auto& acc : energy_) acc = EnergyAccum{};

  for (std::size_t j = 0; j < j_count; ++j) {
    const auto& prob = problems_[j];
    const VectorField& v0 = prob.v_init ? prob.v_init : prob.v_exact;
    const VectorField& w0 = prob.w_init ? prob.w_init : prob.w_exact;
    if (!v0 || !w0) throw std::invalid_argument("initialize: member lacks initial data");
    auto& m = state_.members[j];
    m.v = interpolate_velocity(*space_, v0, 0.0);
    m.w = interpolate_velocity(*space_, w0, 0.0);
    m.v_prev = m.v;
    m.w_prev = m.w;
    m.q = Vec::Zero(space_->n_p);
    m.r = Vec::Zero(space_->n_p);
  }
  accumulate_energy(0);
  emit_level();

  if (params_.bootstrap == BootstrapMode::exact_interpolation) {
    for (std::size_t j = 0; j < j_count; ++j) {
      const auto& prob = problems_[j];
      if (!prob.v_exact || !prob.w_exact)
        throw std::invalid_argument("initialize: exact bootstrap needs analytic fields");
      auto& m = state_.members[j];
      m.v_prev = std::move(m.v);
      m.w_prev = std::move(m.w);
      m.v = interpolate_velocity(*space_, prob.v_exact, params_.time.dt);
      m.w = interpolate_velocity(*space_, prob.w_exact, params_.time.dt);
    }
    state_.level = 1;
    state_.time = params_.time.dt;
    records_.push_back(StepRecord{.level = 1});
  } else {
    const Snapshot snap = make_snapshot(true);
    oseen_step(snap, params_.time.dt);
  }
  accumulate_energy(1);
  emit_level();
  initialized_ = true;
  perf_.seconds += seconds_since(t0);
}

void EnsembleStepper::advance() {
  if (!initialized_) throw std::logic_error("advance: initialize() first");
  if (state_.level >= params_.time.steps) throw std::logic_error("advance: past end time");
  const auto t0 = Clock::now();
  const Snapshot snap = make_snapshot(false);
  oseen_step(snap, state_.time + params_.time.dt);
  accumulate_energy(state_.level);
  emit_level();
  perf_.seconds += seconds_since(t0);
}

void EnsembleStepper::run() {
  if (!initialized_) initialize();
  while (state_.level < params_.time.steps) advance();
}

void EnsembleStepper::set_audit_levels(std::vector<int> levels) { audit_levels_ = std::move(levels); }

int EnsembleStepper::monitor_warnings() const {
  int count = 0;
  for (const auto& r : records_)
    if (r.rho_warning) ++count;
  return count;
}

double EnsembleStepper::monitor_ratio() const {
  if (!initialized_) throw std::logic_error("monitor_ratio: initialize() first");
  const Snapshot snap = make_snapshot(state_.level == 0);
  double max_grad = 0.0;
  for (std::size_t j = 0; j < problems_.size(); ++j) {
    max_grad = std::max(max_grad, std::sqrt(grad_norm2(snap.mv.fluct[j])));
    max_grad = std::max(max_grad, std::sqrt(grad_norm2(snap.mw.fluct[j])));
  }
  const auto& p = params_;
  const double h = space_->mesh.h_max;
  const double numer = 3.0 * (p.phys.nu - p.phys.nu_m) * (p.phys.nu - p.phys.nu_m) * p.monitor_ci +
                       12.0 * p.monitor_c * p.monitor_c * p.monitor_ci * p.monitor_ci * max_grad;
  return p.time.dt * numer / (p.phys.alpha * h * h);
}

void EnsembleStepper::accumulate_energy(int level) {
  const double dt = params_.time.dt;
  const double alpha = params_.phys.alpha;
  for (std::size_t j = 0; j < problems_.size(); ++j) {
    auto& acc = energy_[j];
    const auto& m = state_.members[j];
    acc.norm_v2.push_back(mass_norm2(m.v));
    acc.norm_w2.push_back(mass_norm2(m.w));
    if (level >= 1) {
      acc.extrap_v2.push_back(mass_norm2(2.0 * m.v - m.v_prev));
      acc.extrap_w2.push_back(mass_norm2(2.0 * m.w - m.w_prev));
    } else {
      acc.extrap_v2.push_back(0.0);
      acc.extrap_w2.push_back(0.0);
    }
    if (level >= 2) {
      acc.cum_diffusion += alpha * dt * (grad_norm2(m.v) + grad_norm2(m.w));
      if (params_.track_forcing_norms && problems_[j].f1 && problems_[j].f2) {
        const double t = level * dt;
        acc.cum_forcing += 12.0 * dt / alpha *
                           (l2_norm_field(*space_, problems_[j].f1, t) +
                            l2_norm_field(*space_, problems_[j].f2, t));
      }
    }
  }
}

EnergyReport EnsembleStepper::energy_report() const {
  EnergyReport report;
  report.forcing_tracked = params_.track_forcing_norms;
  for (const auto& acc : energy_) {
    EnergyReport::Member m;
    m.norm_v2 = acc.norm_v2;
    m.norm_w2 = acc.norm_w2;
    m.extrap_v2 = acc.extrap_v2;
    m.extrap_w2 = acc.extrap_w2;
    m.cum_diffusion = acc.cum_diffusion;
    m.cum_forcing = acc.cum_forcing;
    if (!acc.norm_v2.empty()) {
      const std::size_t last = acc.norm_v2.size() - 1;
      m.lhs = acc.norm_v2[last] + acc.norm_w2[last] + acc.extrap_v2[last] + acc.extrap_w2[last] +
              acc.cum_diffusion;
      if (acc.norm_v2.size() > 1)
        m.rhs = acc.norm_v2[1] + acc.norm_w2[1] + acc.extrap_v2[1] + acc.extrap_w2[1] + acc.cum_forcing;
      m.bounded = m.lhs <= m.rhs;
    }
    report.members.push_back(std::move(m));
  }
  return report;
}

double EnsembleStepper::mass_norm2(const Vec& u) const { return u.dot(mass_ * u); }

double EnsembleStepper::grad_norm2(const Vec& u) const { return u.dot(stiffness_ * u); }

SparseMatrix EnsembleStepper::build_substep_matrix(int substep) const {
  if (!initialized_) throw std::logic_error("build_substep_matrix: initialize() first");
  if (substep != 1 && substep != 2) throw std::invalid_argument("build_substep_matrix: substep is 1 or 2");
  const Snapshot snap = make_snapshot(state_.level == 0);
  const Vec& mean = substep == 1 ? snap.mw.mean : snap.mv.mean;
  return build_system(snap.lhs_coeff, mean).matrix;
}

void EnsembleStepper::emit_level() {
  if (on_level_) on_level_(state_.level, state_.time, state_);
}


}  // namespace mhdens
