#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace cns {

enum class LinearSolverKind {
  /// Sparse LDLᵀ. On M-matrices the triangular solves only add nonnegative
  /// terms, so nonnegative right-hand sides give nonnegative solutions
  /// exactly in floating point.
  direct,
  /// Diagonally preconditioned conjugate gradients.
  conjugate_gradient,
};

LinearSolverKind parse_linear_solver(const std::string& name);

struct LinearSolverOptions {
  LinearSolverKind kind = LinearSolverKind::direct;
  double tolerance = 1e-10;  ///< relative residual, iterative solver only
  int max_iterations = 5000;
};

/// Solver for symmetric positive definite systems. The sparsity pattern is
/// analysed once; factorize() may be called repeatedly with matrices that
/// share it.
class SpdSolver {
 public:
  explicit SpdSolver(LinearSolverOptions options = {});
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  /// Throws SolverError if the matrix is not numerically SPD.
  void factorize(const Eigen::SparseMatrix<double>& matrix);
  /// Throws SolverError on non-convergence.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  int last_iterations() const { return last_iterations_; }
  const LinearSolverOptions& options() const { return options_; }

 private:
  struct Impl;
  LinearSolverOptions options_;
  std::unique_ptr<Impl> impl_;
  mutable int last_iterations_ = 0;
};

}  // namespace cns
