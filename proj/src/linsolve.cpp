#include "mhdens/linsolve.hpp"

#include <algorithm>
#include <cctype>

namespace mhdens {

namespace {

// Eigen appends the failing column to its singularity message; recover it so
// callers get a usable pivot index.
long parse_trailing_index(const std::string& message) {
  auto it = message.end();
  while (it != message.begin() && std::isdigit(static_cast<unsigned char>(*(it - 1)))) --it;
  if (it == message.end()) return -1;
  return std::stol(std::string(it, message.end()));
}

}  // namespace

void Factorization::factor(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factor: matrix must be square");
  SparseMatrix compressed = a;
  compressed.makeCompressed();

  const int* outer = compressed.outerIndexPtr();
  const int* inner = compressed.innerIndexPtr();
  const auto outer_n = static_cast<std::size_t>(compressed.rows() + 1);
  const auto nnz = static_cast<std::size_t>(compressed.nonZeros());

  const bool same_pattern = factored_ && pattern_outer_.size() == outer_n && pattern_inner_.size() == nnz &&
                            std::equal(pattern_outer_.begin(), pattern_outer_.end(), outer) &&
                            std::equal(pattern_inner_.begin(), pattern_inner_.end(), inner);

  const ColMajor col_major(compressed);
  if (!same_pattern) {
    lu_.analyzePattern(col_major);
    ++counters_.symbolic;
    pattern_outer_.assign(outer, outer + outer_n);
    pattern_inner_.assign(inner, inner + nnz);
  }
  lu_.factorize(col_major);
  ++counters_.numeric;
  if (lu_.info() != Eigen::Success) {
    factored_ = false;
    pattern_outer_.clear();
    const long column = parse_trailing_index(lu_.lastErrorMessage());
    const long pivot = column > 0 ? column - 1 : column;
    throw SingularMatrixError("factor: singular matrix, first failing pivot index " + std::to_string(pivot),
                              pivot);
  }
  factored_ = true;
  n_ = static_cast<int>(a.rows());
}

Vec Factorization::solve(const Vec& rhs) const {
  if (!factored_) throw std::logic_error("solve: factor() has not succeeded");
  if (rhs.size() != n_) throw std::invalid_argument("solve: rhs length mismatch");
  ++counters_.solves;
  return lu_.solve(rhs);
}

std::vector<Vec> Factorization::solve_many(const std::vector<Vec>& rhs) const {
  std::vector<Vec> out;
  out.reserve(rhs.size());
  for (const Vec& b : rhs) out.push_back(solve(b));
  return out;
}

double relative_residual(const SparseMatrix& a, const Vec& x, const Vec& b) {
  const double denom = b.norm();
  if (denom == 0.0) return (a * x).norm();
  return (a * x - b).norm() / denom;
}

LinearSolver::LinearSolver(SolverKind kind) : kind_(kind) {
  bicgstab_.setTolerance(1e-10);
  bicgstab_.setMaxIterations(500);
  bicgstab_.preconditioner().setDroptol(1e-8);
  bicgstab_.preconditioner().setFillfactor(60);
}

void LinearSolver::setup(const SparseMatrix& a) {
  if (kind_ == SolverKind::direct) {
    direct_.factor(a);
    return;
  }
  iter_matrix_ = Eigen::SparseMatrix<double>(a);
  bicgstab_.compute(iter_matrix_);
  ++iter_counters_.numeric;
  if (bicgstab_.info() != Eigen::Success)
    throw SolverError("iterative setup: preconditioner construction failed");
}

Vec LinearSolver::solve(const Vec& rhs) {
  if (kind_ == SolverKind::direct) return direct_.solve(rhs);
  ++iter_counters_.solves;
  const Vec x = bicgstab_.solve(rhs);
  if (bicgstab_.info() != Eigen::Success)
    throw SolverError("iterative solve: no convergence after " + std::to_string(bicgstab_.iterations()) +
                      " iterations, error " + std::to_string(bicgstab_.error()));
  return x;
}

const SolveCounters& LinearSolver::counters() const {
  return kind_ == SolverKind::direct ? direct_.counters() : iter_counters_;
}

}  // namespace mhdens
