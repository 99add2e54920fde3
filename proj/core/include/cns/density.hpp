#pragma once

#include "cns/geometry.hpp"
#include "cns/linear_solver.hpp"
#include "cns/ops.hpp"

namespace cns {

struct DensityStepParams {
  double dt = 1e-3;
  double epsilon = 0.0;  ///< strength of the ε n(1 − n²) regularisation
  /// Upwind the chemotactic drift (always on; the centred variant is not
  /// positivity-preserving and exists only for comparison studies).
  bool drift_upwind = true;
  LinearSolverOptions solver{};
};

/// Chemotactic part of the face flux in the "gradient" sign convention, in
/// which the density tendency is ∇·(∇n + chemotactic_flux):
///   −n_up (∇c)_face on interior faces, 0 on Γ,
/// where n_up is taken upstream of the cell drift velocity +∇c. With the
/// diffusive part also zeroed on Γ the total flux (∇n − n∇c)·ν vanishes there.
FaceField chemotactic_flux(const Grid& grid, const ScalarField& n, const ScalarField& c, bool upwind = true);

/// Largest dt for which the explicit transport of n (fluid velocity plus drift
/// ∇c) keeps every cell coefficient nonnegative; +inf when nothing moves.
double density_cfl_limit(const Grid& grid, const VectorField& u, const ScalarField& c);

/// Advances ∂_t n + u·∇n − Δn = −∇·(n∇c) + ε n(1 − n²) with zero total flux on Γ:
///   1. explicit upwind transport by u and by the drift ∇c,
///   2. backward-Euler Neumann diffusion,
///   3. Patankar reaction: n_new = n(1 + dt ε) / (1 + dt ε n²).
/// The diffusion matrix is factored once per dt.
class DensityStepper {
 public:
  DensityStepper(const Grid& grid, DensityStepParams params);

  /// Throws CflError when dt exceeds density_cfl_limit.
  ScalarField step(const ScalarField& n, const ScalarField& c, const VectorField& u);

  const DensityStepParams& params() const { return params_; }
  void set_dt(double dt);
  int last_iterations() const { return solver_.last_iterations(); }

 private:
  void refactor();

  const Grid* grid_;
  DensityStepParams params_;
  SparseMatrix laplacian_;
  SpdSolver solver_;
};

ScalarField step_density(const Grid& grid, const ScalarField& n, const ScalarField& c, const VectorField& u,
                         const DensityStepParams& params);

/// Patankar update of the reaction ε n(1 − n²) over dt. Positive for n > 0,
/// and n = 1 is a fixed point.
double patankar_reaction(double n, double epsilon, double dt);

}  // namespace cns
