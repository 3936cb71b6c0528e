// Sparse direct factorization with explicit reuse: one numeric factorization
// serves any number of right-hand sides, and the symbolic analysis is cached
// across refactorizations with an unchanged sparsity pattern.
#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhdens/fem.hpp"

namespace mhdens {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, long pivot)
      : std::runtime_error(what), pivot_index(pivot) {}
  long pivot_index;
};

class SolverError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveCounters {
  long symbolic = 0;  // symbolic analyses performed
  long numeric = 0;   // numeric factorizations / preconditioner builds
  long solves = 0;    // triangular / preconditioned solves
};

class Factorization {
 public:
  /// Factors A, reusing the cached symbolic analysis when the sparsity
  /// pattern matches the previous call. Throws SingularMatrixError naming the
  /// first failing pivot index on singular input.
  void factor(const SparseMatrix& a);

  Vec solve(const Vec& rhs) const;
  std::vector<Vec> solve_many(const std::vector<Vec>& rhs) const;

  const SolveCounters& counters() const { return counters_; }
  int rows() const { return n_; }

 private:
  using ColMajor = Eigen::SparseMatrix<double>;
  Eigen::SparseLU<ColMajor, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<int> pattern_outer_, pattern_inner_;
  mutable SolveCounters counters_;
  int n_ = 0;
  bool factored_ = false;
};

/// ||Ax - b|| / ||b||.
double relative_residual(const SparseMatrix& a, const Vec& x, const Vec& b);

enum class SolverKind { direct, iterative };

/// Direct LU by default; optionally BiCGSTAB with an incomplete-LU
/// preconditioner built once per setup() and reused across solves
/// (tolerance 1e-10, at most 500 iterations).
class LinearSolver {
 public:
  explicit LinearSolver(SolverKind kind = SolverKind::direct);

  void setup(const SparseMatrix& a);
  Vec solve(const Vec& rhs);

  SolverKind kind() const { return kind_; }
  const SolveCounters& counters() const;

 private:
  SolverKind kind_;
  Factorization direct_;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> bicgstab_;
  Eigen::SparseMatrix<double> iter_matrix_;
  SolveCounters iter_counters_;
};

}  // namespace mhdens
