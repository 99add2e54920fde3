#include "cns/oxygen.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cns/errors.hpp"

namespace cns {

double oxygen_cfl_limit(const Grid& grid, const VectorField& u) {
  const double ux = u.x.size() ? u.x.cwiseAbs().maxCoeff() : 0.0;
  const double uy = u.y.size() ? u.y.cwiseAbs().maxCoeff() : 0.0;
  double limit = std::numeric_limits<double>::infinity();
  if (ux > 0.0) limit = std::min(limit, 0.5 * grid.dx() / ux);
  if (uy > 0.0) limit = std::min(limit, 0.5 * grid.dy() / uy);
  return limit;
}

SparseMatrix assemble_oxygen_operator(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, double dt) {
  if (n.size() != grid.num_cells()) throw std::invalid_argument("assemble_oxygen_operator: n size mismatch");
  const SparseOperator robin = assemble_robin_laplacian(grid, bdata);
  SparseMatrix m = -dt * robin.matrix;
  for (int c = 0; c < grid.num_cells(); ++c) m.coeffRef(c, c) += 1.0 + dt * n[c];
  m.makeCompressed();
  return m;
}

OxygenStepper::OxygenStepper(const Grid& grid, const BoundaryData& bdata, OxygenStepParams params)
    : grid_(&grid), bdata_(&bdata), params_(params), robin_(assemble_robin_laplacian(grid, bdata)),
      solver_(params.solver) {
  if (params_.theta != 1.0) throw std::invalid_argument("oxygen stepper supports theta = 1 only");
  identity_.resize(grid.num_cells(), grid.num_cells());
  identity_.setIdentity();
}

ScalarField OxygenStepper::step(const ScalarField& c, const ScalarField& n, const VectorField& u) {
  const Grid& g = *grid_;
  const double dt = params_.dt;
  if (!(dt > 0.0)) throw std::invalid_argument("oxygen step: dt must be positive");
  if (c.size() != g.num_cells() || n.size() != g.num_cells())
    throw std::invalid_argument("oxygen step: field/grid size mismatch");
  const double limit = oxygen_cfl_limit(g, u);
  if (dt > limit) {
    std::ostringstream msg;
    msg << "oxygen step: dt = " << dt << " exceeds the advective limit " << limit;
    throw CflError(msg.str());
  }
  if (max_wall_velocity(g, u) > 0.0) throw std::invalid_argument("oxygen step: velocity must vanish on the boundary");

  const ScalarField transported = upwind_explicit_update(g, c, {&u}, dt);

  SparseMatrix m = identity_ - dt * robin_.matrix;
  for (int k = 0; k < g.num_cells(); ++k) m.coeffRef(k, k) += dt * n[k];
  solver_.factorize(m);
  return solver_.solve(transported + dt * robin_.source);
}

ScalarField step_oxygen(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, const ScalarField& n,
                        const VectorField& u, const OxygenStepParams& params) {
  OxygenStepper stepper(grid, bdata, params);
  return stepper.step(c, n, u);
}

}  // namespace cns
