#pragma once

#include "cns/geometry.hpp"
#include "cns/linear_solver.hpp"
#include "cns/ops.hpp"

namespace cns {

struct OxygenStepParams {
  double dt = 1e-3;
  /// Implicitness of diffusion; only backward Euler (1) is supported.
  double theta = 1.0;
  LinearSolverOptions solver{};
};

/// Largest dt allowed by the advective limit
/// dt ≤ 0.5·min(dx/max|u_x|, dy/max|u_y|); +inf for u ≡ 0.
double oxygen_cfl_limit(const Grid& grid, const VectorField& u);

/// I + dt·diag(n) − dt·L_Robin: the implicit part of one oxygen step. An
/// M-matrix for every dt > 0 and n >= 0.
SparseMatrix assemble_oxygen_operator(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, double dt);

/// Advances ∂_t c + u·∇c − Δc = −nc with ∇c·ν = κ(γ − c) by one step:
/// explicit upwind advection, then
///   (I + dt n − dt L_Robin) c_new = c_adv + dt s_Robin.
/// The Robin pattern is assembled once per stepper.
class OxygenStepper {
 public:
  OxygenStepper(const Grid& grid, const BoundaryData& bdata, OxygenStepParams params);

  /// Throws CflError if dt exceeds oxygen_cfl_limit, SolverError on solver
  /// failure, std::invalid_argument on size mismatch.
  ScalarField step(const ScalarField& c, const ScalarField& n, const VectorField& u);

  const OxygenStepParams& params() const { return params_; }
  void set_dt(double dt) { params_.dt = dt; }
  int last_iterations() const { return solver_.last_iterations(); }

 private:
  const Grid* grid_;
  const BoundaryData* bdata_;
  OxygenStepParams params_;
  SparseOperator robin_;
  SparseMatrix identity_;
  SpdSolver solver_;
};

/// One-shot form of OxygenStepper::step.
ScalarField step_oxygen(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, const ScalarField& n,
                        const VectorField& u, const OxygenStepParams& params);

}  // namespace cns
