#include "cns/density.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cns/errors.hpp"

namespace cns {

namespace {

// Drift velocity ∇c on interior faces, 0 on Γ.
FaceField drift_velocity(const Grid& grid, const ScalarField& c) { return gradient(grid, c); }

}  // namespace

FaceField chemotactic_flux(const Grid& grid, const ScalarField& n, const ScalarField& c, bool upwind) {
  if (n.size() != grid.num_cells() || c.size() != grid.num_cells())
    throw std::invalid_argument("chemotactic_flux: field/grid size mismatch");
  FaceField flux = drift_velocity(grid, c);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 1; i < grid.nx(); ++i) {
      const int l = grid.index(i - 1, j);
      const int r = grid.index(i, j);
      if (l < 0 || r < 0) continue;
      double& f = flux.x[grid.x_face(i, j)];
      const double nu = upwind ? (f > 0.0 ? n[l] : n[r]) : 0.5 * (n[l] + n[r]);
      f = -nu * f;
    }
  if (grid.dim() == 2)
    for (int j = 1; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const int s = grid.index(i, j - 1);
        const int t = grid.index(i, j);
        if (s < 0 || t < 0) continue;
        double& f = flux.y[grid.y_face(i, j)];
        const double nu = upwind ? (f > 0.0 ? n[s] : n[t]) : 0.5 * (n[s] + n[t]);
        f = -nu * f;
      }
  return flux;
}

double density_cfl_limit(const Grid& grid, const VectorField& u, const ScalarField& c) {
  const ScalarField rate = outflow_rate(grid, u) + outflow_rate(grid, drift_velocity(grid, c));
  const double m = rate.size() ? rate.maxCoeff() : 0.0;
  return m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
}

double patankar_reaction(double n, double epsilon, double dt) {
  if (epsilon == 0.0) return n;
  // production explicit, destruction εn²·n linearly implicit
  return n * (1.0 + dt * epsilon) / (1.0 + dt * epsilon * n * n);
}

DensityStepper::DensityStepper(const Grid& grid, DensityStepParams params)
    : grid_(&grid), params_(params), laplacian_(assemble_neumann_laplacian(grid).matrix), solver_(params.solver) {
  if (params_.epsilon < 0.0) throw std::invalid_argument("density stepper: epsilon must be >= 0");
  refactor();
}

void DensityStepper::set_dt(double dt) {
  if (dt == params_.dt) return;
  params_.dt = dt;
  refactor();
}

void DensityStepper::refactor() {
  if (!(params_.dt > 0.0)) throw std::invalid_argument("density stepper: dt must be positive");
  SparseMatrix m(grid_->num_cells(), grid_->num_cells());
  m.setIdentity();
  m -= params_.dt * laplacian_;
  solver_.factorize(m);
}

ScalarField DensityStepper::step(const ScalarField& n, const ScalarField& c, const VectorField& u) {
  const Grid& g = *grid_;
  const double dt = params_.dt;
  if (n.size() != g.num_cells() || c.size() != g.num_cells())
    throw std::invalid_argument("density step: field/grid size mismatch");
  if (max_wall_velocity(g, u) > 0.0) throw std::invalid_argument("density step: velocity must vanish on the boundary");

  const FaceField drift = drift_velocity(g, c);
  ScalarField transported;
  if (params_.drift_upwind) {
    const ScalarField rate = outflow_rate(g, u) + outflow_rate(g, drift);
    const double limit = 1.0 / std::max(rate.maxCoeff(), std::numeric_limits<double>::min());
    if (dt > limit) {
      std::ostringstream msg;
      msg << "density step: dt = " << dt << " exceeds the transport limit " << limit;
      throw CflError(msg.str());
    }
    transported = upwind_explicit_update(g, n, {&u, &drift}, dt);
  } else {
    transported = n + dt * (upwind_flux_divergence(g, n, u) + divergence(g, chemotactic_flux(g, n, c, false)));
  }

  ScalarField diffused = solver_.solve(transported);
  if (params_.epsilon > 0.0)
    for (auto& v : diffused) v = patankar_reaction(v, params_.epsilon, dt);
  return diffused;
}

ScalarField step_density(const Grid& grid, const ScalarField& n, const ScalarField& c, const VectorField& u,
                         const DensityStepParams& params) {
  DensityStepper stepper(grid, params);
  return stepper.step(n, c, u);
}

}  // namespace cns
