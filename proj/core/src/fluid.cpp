#include "cns/fluid.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cns/errors.hpp"
#include "cns/stokes_basis.hpp"

namespace cns {

PressureSolver::PressureSolver(const Grid& grid, double tolerance)
    : grid_(&grid), tolerance_(tolerance), laplacian_(assemble_neumann_laplacian(grid).matrix) {
  // −L_N with its diagonal doubled in cell 0. Nonsingular, and for a
  // compatible rhs the solution has p_0 = 0 with every row of L p = rhs
  // enforced (pinning would drop row 0 and pile the round-off there).
  SparseMatrix m = -laplacian_;
  m.coeffRef(0, 0) *= 2.0;
  solver_.factorize(m);
}

ScalarField PressureSolver::solve(const ScalarField& rhs) const {
  const Grid& g = *grid_;
  if (rhs.size() != g.num_cells()) throw std::invalid_argument("pressure_poisson: rhs/grid size mismatch");
  const double total = rhs.sum();
  const double scale = rhs.cwiseAbs().sum();
  if (std::abs(total) > 1e-9 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "pressure_poisson: incompatible right-hand side (sum " << total << ")";
    throw std::invalid_argument(msg.str());
  }
  ScalarField p = solver_.solve(-rhs);
  // One refinement step on the mean-free residual spreads the compatibility
  // defect evenly instead of leaving it in cell 0.
  ScalarField r = rhs - laplacian_ * p;
  r.array() -= r.mean();
  p += solver_.solve(-r);
  p.array() -= p.mean();
  last_residual_ = (laplacian_ * p - rhs).cwiseAbs().maxCoeff();
  if (last_residual_ > tolerance_ * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
    std::ostringstream msg;
    msg << "pressure_poisson: residual " << last_residual_ << " above tolerance";
    throw SolverError(msg.str());
  }
  return p;
}

ScalarField pressure_poisson(const Grid& grid, const ScalarField& rhs, double tolerance) {
  return PressureSolver(grid, tolerance).solve(rhs);
}

VectorField pressure_gradient(const Grid& grid, const ScalarField& p) { return gradient(grid, p); }

VectorField hodge_project(const Grid& grid, const PressureSolver& solver, const VectorField& u, ScalarField* p) {
  ScalarField phi = solver.solve(divergence(grid, u));
  const VectorField gp = pressure_gradient(grid, phi);
  VectorField out{u.x - gp.x, u.y - gp.y};
  if (p) *p = std::move(phi);
  return out;
}

namespace {

enum class NbKind { unknown, wall, ghost };

NbKind x_kind(const Grid& g, int i, int j) {
  if (i < 0 || i > g.nx() || j < 0 || j >= g.ny()) return NbKind::ghost;
  const bool l = g.inside(i - 1, j);
  const bool r = g.inside(i, j);
  if (l && r) return NbKind::unknown;
  return (l || r) ? NbKind::wall : NbKind::ghost;
}

NbKind y_kind(const Grid& g, int i, int j) {
  if (i < 0 || i >= g.nx() || j < 0 || j > g.ny()) return NbKind::ghost;
  const bool s = g.inside(i, j - 1);
  const bool n = g.inside(i, j);
  if (s && n) return NbKind::unknown;
  return (s || n) ? NbKind::wall : NbKind::ghost;
}

}  // namespace

SparseMatrix assemble_velocity_laplacian(const Grid& grid, const FaceDofMap& dofs) {
  const double ix2 = 1.0 / (grid.dx() * grid.dx());
  const double iy2 = 1.0 / (grid.dy() * grid.dy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<std::size_t>(dofs.num_dofs()));

  // `tangential` neighbours may be mirror ghosts; normal ones are always
  // unknowns or walls at distance h.
  auto couple = [&](int row, double& diag, NbKind kind, int nb_dof, double w, bool tangential) {
    switch (kind) {
      case NbKind::unknown:
        trip.emplace_back(row, nb_dof, w);
        diag -= w;
        break;
      case NbKind::wall: diag -= w; break;
      case NbKind::ghost: diag -= tangential ? 2.0 * w : w; break;
    }
  };

  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i <= grid.nx(); ++i) {
      const int row = dofs.x_dof(grid.x_face(i, j));
      if (row < 0) continue;
      double diag = 0.0;
      for (int di : {-1, 1}) {
        const NbKind k = x_kind(grid, i + di, j);
        couple(row, diag, k, k == NbKind::unknown ? dofs.x_dof(grid.x_face(i + di, j)) : -1, ix2, false);
      }
      if (grid.dim() == 2)
        for (int dj : {-1, 1}) {
          const NbKind k = x_kind(grid, i, j + dj);
          couple(row, diag, k, k == NbKind::unknown ? dofs.x_dof(grid.x_face(i, j + dj)) : -1, iy2, true);
        }
      trip.emplace_back(row, row, diag);
    }
  if (grid.dim() == 2)
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const int row = dofs.y_dof(grid.y_face(i, j));
        if (row < 0) continue;
        double diag = 0.0;
        for (int dj : {-1, 1}) {
          const NbKind k = y_kind(grid, i, j + dj);
          couple(row, diag, k, k == NbKind::unknown ? dofs.y_dof(grid.y_face(i, j + dj)) : -1, iy2, false);
        }
        for (int di : {-1, 1}) {
          const NbKind k = y_kind(grid, i + di, j);
          couple(row, diag, k, k == NbKind::unknown ? dofs.y_dof(grid.y_face(i + di, j)) : -1, ix2, true);
        }
        trip.emplace_back(row, row, diag);
      }
  SparseMatrix m(dofs.num_dofs(), dofs.num_dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

VectorField convection(const Grid& grid, const VectorField& u) {
  VectorField out = FaceField::zeros(grid);
  if (grid.dim() == 1) return out;
  const int nx = grid.nx();
  const int ny = grid.ny();
  // Velocity unknowns read as 0 on walls and outside the domain.
  auto U = [&](int i, int j) {
    return (i >= 0 && i <= nx && j >= 0 && j < ny && is_interior_x_face(grid, i, j)) ? u.x[grid.x_face(i, j)] : 0.0;
  };
  auto V = [&](int i, int j) {
    return (i >= 0 && i < nx && j >= 0 && j <= ny && is_interior_y_face(grid, i, j)) ? u.y[grid.y_face(i, j)] : 0.0;
  };
  auto up = [](double vel, double a, double b) { return vel > 0.0 ? vel * a : vel * b; };
  const double idx = 1.0 / grid.dx();
  const double idy = 1.0 / grid.dy();

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (!is_interior_x_face(grid, i, j)) continue;
      const double ue = 0.5 * (U(i, j) + U(i + 1, j));
      const double uw = 0.5 * (U(i - 1, j) + U(i, j));
      const double vn = 0.5 * (V(i - 1, j + 1) + V(i, j + 1));
      const double vs = 0.5 * (V(i - 1, j) + V(i, j));
      const double fe = up(ue, U(i, j), U(i + 1, j));
      const double fw = up(uw, U(i - 1, j), U(i, j));
      const double fn = up(vn, U(i, j), U(i, j + 1));
      const double fs = up(vs, U(i, j - 1), U(i, j));
      out.x[grid.x_face(i, j)] = (fe - fw) * idx + (fn - fs) * idy;
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!is_interior_y_face(grid, i, j)) continue;
      const double vn = 0.5 * (V(i, j) + V(i, j + 1));
      const double vs = 0.5 * (V(i, j - 1) + V(i, j));
      const double ue = 0.5 * (U(i + 1, j - 1) + U(i + 1, j));
      const double uw = 0.5 * (U(i, j - 1) + U(i, j));
      const double fn = up(vn, V(i, j), V(i, j + 1));
      const double fs = up(vs, V(i, j - 1), V(i, j));
      const double fe = up(ue, V(i, j), V(i + 1, j));
      const double fw = up(uw, V(i - 1, j), V(i, j));
      out.y[grid.y_face(i, j)] = (fe - fw) * idx + (fn - fs) * idy;
    }
  return out;
}

VectorField body_force(const Grid& grid, const ScalarField& n, const ScalarField& phi) {
  VectorField f = FaceField::zeros(grid);
  if (phi.size() == 0) return f;
  if (phi.size() != grid.num_cells() || n.size() != grid.num_cells())
    throw std::invalid_argument("body_force: field/grid size mismatch");
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 1; i < grid.nx(); ++i) {
      const int l = grid.index(i - 1, j);
      const int r = grid.index(i, j);
      if (l >= 0 && r >= 0) f.x[grid.x_face(i, j)] = 0.5 * (n[l] + n[r]) * (phi[r] - phi[l]) / grid.dx();
    }
  if (grid.dim() == 2)
    for (int j = 1; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const int s = grid.index(i, j - 1);
        const int t = grid.index(i, j);
        if (s >= 0 && t >= 0) f.y[grid.y_face(i, j)] = 0.5 * (n[s] + n[t]) * (phi[t] - phi[s]) / grid.dy();
      }
  return f;
}

double fluid_cfl_limit(const Grid& grid, const VectorField& u) {
  const double ux = u.x.size() ? u.x.cwiseAbs().maxCoeff() : 0.0;
  const double uy = u.y.size() ? u.y.cwiseAbs().maxCoeff() : 0.0;
  double limit = std::numeric_limits<double>::infinity();
  if (ux > 0.0) limit = std::min(limit, 0.5 * grid.dx() / ux);
  if (uy > 0.0) limit = std::min(limit, 0.5 * grid.dy() / uy);
  return limit;
}

VectorField curl_of_streamfunction(const Grid& grid, const std::function<double(double, double)>& psi) {
  VectorField u = FaceField::zeros(grid);
  if (grid.dim() == 1) return u;
  const int nx = grid.nx();
  const int ny = grid.ny();
  std::vector<double> node((nx + 1) * (ny + 1), 0.0);
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      if (grid.inside(i - 1, j - 1) && grid.inside(i, j - 1) && grid.inside(i - 1, j) && grid.inside(i, j))
        node[j * (nx + 1) + i] = psi(i * grid.dx(), j * grid.dy());
  auto N = [&](int i, int j) { return node[j * (nx + 1) + i]; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (is_interior_x_face(grid, i, j)) u.x[grid.x_face(i, j)] = (N(i, j + 1) - N(i, j)) / grid.dy();
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (is_interior_y_face(grid, i, j)) u.y[grid.y_face(i, j)] = -(N(i + 1, j) - N(i, j)) / grid.dx();
  return u;
}

FluidStepper::FluidStepper(const Grid& grid, FluidParams params, std::shared_ptr<const StokesBasis> basis)
    : grid_(&grid), params_(std::move(params)), basis_(std::move(basis)), dofs_(grid),
      laplacian_(assemble_velocity_laplacian(grid, dofs_)), viscous_(params_.solver),
      pressure_solver_(grid, params_.pressure_tolerance), pressure_(ScalarField::Zero(grid.num_cells())) {
  if (!(params_.mu > 0.0)) throw std::invalid_argument("fluid: mu must be positive");
  if (params_.phi.size() != 0 && params_.phi.size() != grid.num_cells())
    throw std::invalid_argument("fluid: phi/grid size mismatch");
  if (params_.mode == FluidMode::galerkin) {
    if (!basis_) throw std::invalid_argument("fluid: galerkin mode requires a Stokes basis");
    if (basis_->grid_hash() != grid.hash()) throw std::invalid_argument("fluid: Stokes basis was built for another grid");
    if (params_.galerkin_m < 1 || params_.galerkin_m > basis_->size())
      throw std::invalid_argument("fluid: galerkin m must lie in [1, basis size]");
  }
  refactor();
}

FluidStepper::~FluidStepper() = default;
FluidStepper::FluidStepper(FluidStepper&&) noexcept = default;

void FluidStepper::set_dt(double dt) {
  if (dt == params_.dt) return;
  params_.dt = dt;
  refactor();
}

void FluidStepper::refactor() {
  if (!(params_.dt > 0.0)) throw std::invalid_argument("fluid: dt must be positive");
  if (dofs_.num_dofs() == 0) return;
  SparseMatrix m(dofs_.num_dofs(), dofs_.num_dofs());
  m.setIdentity();
  m -= (params_.dt * params_.mu) * laplacian_;
  viscous_.factorize(m);
}

VectorField FluidStepper::step(const VectorField& u, const ScalarField& n) {
  const Grid& g = *grid_;
  const double limit = fluid_cfl_limit(g, u);
  if (params_.dt > limit) {
    std::ostringstream msg;
    msg << "fluid step: dt = " << params_.dt << " exceeds the advective limit " << limit;
    throw CflError(msg.str());
  }
  const VectorField force = body_force(g, n, params_.phi);
  if (dofs_.num_dofs() == 0) return FaceField::zeros(g);
  return params_.mode == FluidMode::projection ? step_projection(u, force) : step_galerkin(u, force);
}

VectorField FluidStepper::step_projection(const VectorField& u, const VectorField& force) {
  const Grid& g = *grid_;
  const double dt = params_.dt;
  const Eigen::VectorXd rhs = dofs_.gather(u) - dt * dofs_.gather(convection(g, u));
  const Eigen::VectorXd ustar = viscous_.solve(rhs) - dt * dofs_.gather(force);
  ScalarField p;
  VectorField out = hodge_project(g, pressure_solver_, dofs_.scatter(ustar), &p);
  pressure_ = p / dt;
  // Walls and outside faces carry exactly zero.
  return dofs_.scatter(dofs_.gather(out));
}

VectorField FluidStepper::step_galerkin(const VectorField& u, const VectorField& force) {
  const Grid& g = *grid_;
  const double dt = params_.dt;
  const int m = params_.galerkin_m;
  const Eigen::VectorXd a = basis_->coefficients(dofs_.gather(u), m);
  const Eigen::VectorXd fc = basis_->coefficients(dofs_.gather(convection(g, u)), m);
  const Eigen::VectorXd ff = basis_->coefficients(dofs_.gather(force), m);
  Eigen::VectorXd next(m);
  for (int k = 0; k < m; ++k)
    next[k] = (a[k] - dt * fc[k]) / (1.0 + dt * params_.mu * basis_->eigenvalues()[k]) - dt * ff[k];
  pressure_.setZero();
  return dofs_.scatter(basis_->synthesize(next));
}

VectorField step_fluid(const Grid& grid, const VectorField& u, const ScalarField& n, const FluidParams& params,
                       std::shared_ptr<const StokesBasis> basis) {
  FluidStepper stepper(grid, params, std::move(basis));
  return stepper.step(u, n);
}

double measure_fluid_decay_rate(const Grid& grid, const FluidParams& params, int steps) {
  FluidParams p = params;
  p.mode = FluidMode::projection;
  p.phi = ScalarField();
  FluidStepper stepper(grid, p);
  if (stepper.dofs().num_dofs() == 0) return std::numeric_limits<double>::infinity();
  // Small amplitude keeps convection negligible; the rate is then viscous.
  const double lx = grid.nx() * grid.dx();
  const double ly = grid.ny() * grid.dy();
  VectorField u = curl_of_streamfunction(grid, [&](double x, double y) {
    const double sx = std::sin(M_PI * x / lx);
    const double sy = std::sin(M_PI * y / ly);
    return 1e-3 * sx * sx * sy * sy * (1.0 + 0.3 * std::cos(3.0 * M_PI * x / lx));
  });
  const ScalarField zero = ScalarField::Zero(grid.num_cells());
  double rate = std::numeric_limits<double>::infinity();
  for (int s = 0; s < steps; ++s) {
    const double e0 = velocity_l2_squared(grid, u);
    VectorField next = stepper.step(u, zero);
    const double e1 = velocity_l2_squared(grid, next);
    // implicit step: the dissipation is measured at the new level
    const double h1 = e1 + velocity_gradient_l2_squared(grid, next);
    if (h1 <= 0.0) break;
    rate = std::min(rate, (e0 - e1) / (p.dt * h1));
    u = std::move(next);
  }
  return rate;
}

}  // namespace cns
