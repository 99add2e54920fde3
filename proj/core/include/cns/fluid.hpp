#pragma once

#include <functional>
#include <memory>

#include "cns/geometry.hpp"
#include "cns/linear_solver.hpp"
#include "cns/ops.hpp"

namespace cns {

class StokesBasis;

enum class FluidMode { projection, galerkin };

struct FluidParams {
  double mu = 1.0;
  double dt = 1e-3;
  /// Gravitational potential at cell centres; empty means φ ≡ 0.
  ScalarField phi;
  FluidMode mode = FluidMode::projection;
  /// Number of Stokes modes kept in galerkin mode.
  int galerkin_m = 0;
  /// Fractional Stokes power α of the analysis (bookkeeping only).
  double stokes_alpha = 0.75;
  double pressure_tolerance = 1e-10;
  LinearSolverOptions solver{};
};

/// Neumann pressure Poisson solver L_N p = rhs with zero-mean gauge. The
/// matrix is factored on construction.
class PressureSolver {
 public:
  explicit PressureSolver(const Grid& grid, double tolerance = 1e-10);

  /// Throws std::invalid_argument when ∫rhs is not zero to round-off and
  /// SolverError if the residual exceeds the tolerance.
  ScalarField solve(const ScalarField& rhs) const;
  double last_residual() const { return last_residual_; }

 private:
  const Grid* grid_;
  double tolerance_;
  SparseMatrix laplacian_;
  SpdSolver solver_;
  mutable double last_residual_ = 0.0;
};

/// One-shot form of PressureSolver::solve.
ScalarField pressure_poisson(const Grid& grid, const ScalarField& rhs, double tolerance = 1e-10);

/// Face gradient of a cell field on velocity unknowns, 0 on walls.
VectorField pressure_gradient(const Grid& grid, const ScalarField& p);

/// Discrete Leray (Helmholtz) projection u − ∇p with L_N p = ∇·u.
/// Returns the projected field; `p` receives the potential if non-null.
VectorField hodge_project(const Grid& grid, const PressureSolver& solver, const VectorField& u, ScalarField* p = nullptr);

/// MAC viscous Laplacian Δ_h on the velocity unknowns of `dofs` with
/// u = 0 on walls (mirror ghosts for walls half a cell away).
SparseMatrix assemble_velocity_laplacian(const Grid& grid, const FaceDofMap& dofs);

/// Conservative ∇·(u⊗u) on the velocity unknowns with upwinded transported
/// momentum and averaged transport velocities.
VectorField convection(const Grid& grid, const VectorField& u);

/// n∇φ with n averaged to the face; zero on walls.
VectorField body_force(const Grid& grid, const ScalarField& n, const ScalarField& phi);

/// Advective limit dt ≤ 0.5·min(dx/max|u_x|, dy/max|u_y|).
double fluid_cfl_limit(const Grid& grid, const VectorField& u);

/// Discretely divergence-free field u = (∂ψ/∂y, −∂ψ/∂x) built from a stream
/// function sampled at interior grid nodes (ψ = 0 on Γ).
VectorField curl_of_streamfunction(const Grid& grid, const std::function<double(double, double)>& psi);

/// Incompressible Navier–Stokes stepper with no-slip walls and body force
/// −n∇φ. Projection mode: explicit upwind convection, backward-Euler
/// viscous solve, body force, Hodge projection. Galerkin mode evolves the
/// coefficients on the first m Stokes modes with the same time splitting.
class FluidStepper {
 public:
  FluidStepper(const Grid& grid, FluidParams params, std::shared_ptr<const StokesBasis> basis = nullptr);
  ~FluidStepper();
  FluidStepper(FluidStepper&&) noexcept;

  /// Throws CflError on advective CFL violation, SolverError on solver failure.
  VectorField step(const VectorField& u, const ScalarField& n);

  /// Pressure of the last projection step (P = p/dt); zeros in galerkin mode.
  const ScalarField& pressure() const { return pressure_; }
  const FluidParams& params() const { return params_; }
  void set_dt(double dt);
  const PressureSolver& pressure_solver() const { return pressure_solver_; }
  const FaceDofMap& dofs() const { return dofs_; }

 private:
  void refactor();
  VectorField step_projection(const VectorField& u, const VectorField& force);
  VectorField step_galerkin(const VectorField& u, const VectorField& force);

  const Grid* grid_;
  FluidParams params_;
  std::shared_ptr<const StokesBasis> basis_;
  FaceDofMap dofs_;
  SparseMatrix laplacian_;
  SpdSolver viscous_;
  PressureSolver pressure_solver_;
  ScalarField pressure_;
};

VectorField step_fluid(const Grid& grid, const VectorField& u, const ScalarField& n, const FluidParams& params,
                       std::shared_ptr<const StokesBasis> basis = nullptr);

/// Smallest per-step decay rate −Δ‖u‖²/(dt ‖u_new‖²_{H¹}) of the unforced fluid
/// stepper over `steps` steps from a smooth divergence-free field. This is
/// the discrete C(μ) of the fluid energy estimate.
double measure_fluid_decay_rate(const Grid& grid, const FluidParams& params, int steps = 10);

}  // namespace cns
