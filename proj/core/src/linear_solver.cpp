#include "cns/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "cns/errors.hpp"

namespace cns {

LinearSolverKind parse_linear_solver(const std::string& name) {
  if (name == "direct") return LinearSolverKind::direct;
  if (name == "cg" || name == "conjugate_gradient") return LinearSolverKind::conjugate_gradient;
  throw std::invalid_argument("unknown linear solver '" + name + "'");
}

struct SpdSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  bool analysed = false;
  Eigen::Index rows = -1;
  Eigen::Index nnz = -1;
};

SpdSolver::SpdSolver(LinearSolverOptions options) : options_(options), impl_(std::make_unique<Impl>()) {
  impl_->cg.setTolerance(options_.tolerance);
  impl_->cg.setMaxIterations(options_.max_iterations);
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

void SpdSolver::factorize(const Eigen::SparseMatrix<double>& matrix) {
  if (options_.kind == LinearSolverKind::direct) {
    auto& s = impl_->ldlt;
    if (!impl_->analysed || impl_->rows != matrix.rows() || impl_->nnz != matrix.nonZeros()) {
      s.analyzePattern(matrix);
      impl_->analysed = true;
      impl_->rows = matrix.rows();
      impl_->nnz = matrix.nonZeros();
    }
    s.factorize(matrix);
    if (s.info() != Eigen::Success) throw SolverError("sparse LDLT factorization failed");
    if ((s.vectorD().array() <= 0.0).any()) throw SolverError("matrix is not positive definite");
  } else {
    impl_->cg.compute(matrix);
    if (impl_->cg.info() != Eigen::Success) throw SolverError("conjugate gradient setup failed");
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  if (options_.kind == LinearSolverKind::direct) {
    Eigen::VectorXd x = impl_->ldlt.solve(rhs);
    if (impl_->ldlt.info() != Eigen::Success) throw SolverError("sparse LDLT solve failed");
    last_iterations_ = 1;
    return x;
  }
  Eigen::VectorXd x = impl_->cg.solve(rhs);
  last_iterations_ = static_cast<int>(impl_->cg.iterations());
  if (impl_->cg.info() != Eigen::Success)
    throw SolverError("conjugate gradient did not converge in " + std::to_string(last_iterations_) +
                      " iterations (error " + std::to_string(impl_->cg.error()) + ")");
  return x;
}

}  // namespace cns
