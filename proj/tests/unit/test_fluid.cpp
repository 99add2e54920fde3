#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cns/errors.hpp"
#include "cns/fluid.hpp"

using namespace cns;

namespace {

Grid square(int n) { return Grid::build(DomainSpec{DomainShape::rectangle, 2, n, n, 1.0, 1.0, {}}); }
Grid lshape(int n) { return Grid::build(DomainSpec{DomainShape::l_shape, 2, n, n, 1.0, 1.0, {}}); }

template <class F>
ScalarField sample(const Grid& g, F&& f) {
  ScalarField v(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) v[c] = f(g.x_center(g.cell_i(c)), g.y_center(g.cell_j(c)));
  return v;
}

// Random field on the velocity unknowns (nonzero divergence, zero on walls).
VectorField random_dofs(const Grid& g, std::uint64_t seed) {
  const FaceDofMap dofs(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Eigen::VectorXd v(dofs.num_dofs());
  for (auto& x : v) x = N(rng);
  return dofs.scatter(v);
}

VectorField vortex(const Grid& g, double amp) {
  return curl_of_streamfunction(g, [=](double x, double y) {
    return amp * std::sin(M_PI * x) * std::sin(M_PI * y) * (1 + x * y);
  });
}

double diff_l2(const Grid& g, const VectorField& a, const VectorField& b) {
  return std::sqrt(velocity_l2_squared(g, FaceField{a.x - b.x, a.y - b.y}));
}

}  // namespace

TEST(Pressure, ZeroRhs) {
  const Grid g = lshape(12);
  EXPECT_EQ(pressure_poisson(g, ScalarField::Zero(g.num_cells())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Pressure, IncompatibleRhsRejected) {
  const Grid g = square(8);
  EXPECT_THROW(pressure_poisson(g, ScalarField::Ones(64)), std::invalid_argument);
}

TEST(Pressure, SolutionIsMeanFreeAndSatisfiesEquation) {
  const Grid g = lshape(20);
  ScalarField rhs = sample(g, [](double x, double y) { return std::sin(7 * x) * std::cos(3 * y) + x; });
  rhs.array() -= rhs.mean();
  PressureSolver ps(g);
  const ScalarField p = ps.solve(rhs);
  EXPECT_NEAR(p.mean(), 0.0, 1e-12);
  EXPECT_LT(ps.last_residual(), 1e-10);
  const ScalarField lap = divergence(g, gradient(g, p));
  EXPECT_NEAR((lap - rhs).cwiseAbs().maxCoeff(), 0.0, 1e-8);
}

TEST(Pressure, ManufacturedSecondOrder) {
  double e[2];
  for (int k = 0; k < 2; ++k) {
    const Grid g = square(32 << k);
    auto p = [](double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y); };
    ScalarField rhs = sample(g, [&](double x, double y) { return -2 * M_PI * M_PI * p(x, y); });
    rhs.array() -= rhs.mean();
    ScalarField ex = sample(g, p);
    ex.array() -= ex.mean();
    e[k] = (pressure_poisson(g, rhs) - ex).cwiseAbs().maxCoeff();
  }
  EXPECT_GE(std::log2(e[0] / e[1]), 1.9);
}

TEST(Hodge, ProjectsToDivergenceFree) {
  for (const Grid& g : {square(24), lshape(24)}) {
    const PressureSolver ps(g);
    const VectorField f = random_dofs(g, 9);
    ScalarField p;
    const VectorField u = hodge_project(g, ps, f, &p);
    EXPECT_LT(max_divergence(g, u), 1e-10);
    EXPECT_EQ(max_wall_velocity(g, u), 0.0);
    // idempotent and orthogonal to gradients
    EXPECT_LT(diff_l2(g, hodge_project(g, ps, u), u), 1e-12);
    const VectorField gp = pressure_gradient(g, p);
    EXPECT_NEAR((u.x.dot(gp.x) + u.y.dot(gp.y)) * g.cell_volume(), 0.0, 1e-10);
  }
}

TEST(Streamfunction, CurlIsDiscretelySolenoidal) {
  const Grid g = lshape(16);
  const VectorField u = vortex(g, 1.0);
  EXPECT_LT(max_divergence(g, u), 1e-12);
  EXPECT_EQ(max_wall_velocity(g, u), 0.0);
  EXPECT_GT(velocity_l2_squared(g, u), 0.0);
}

TEST(Fluid, RestStaysAtRest) {
  const Grid g = square(16);
  FluidStepper st(g, FluidParams{});
  VectorField u = FaceField::zeros(g);
  for (int k = 0; k < 5; ++k) u = st.step(u, ScalarField::Zero(g.num_cells()));
  EXPECT_EQ(velocity_l2_squared(g, u), 0.0);
}

TEST(Fluid, UnforcedEnergyDecaysStrictly) {
  const Grid g = lshape(24);
  FluidParams p;
  p.dt = 2e-4;
  FluidStepper st(g, p);
  VectorField u = vortex(g, 2.0);
  double e = velocity_l2_squared(g, u);
  for (int k = 0; k < 30; ++k) {
    u = st.step(u, ScalarField::Zero(g.num_cells()));
    const double e1 = velocity_l2_squared(g, u);
    EXPECT_LT(e1, e);
    EXPECT_LT(max_divergence(g, u), 1e-10);
    e = e1;
  }
}

TEST(Fluid, UniformBuoyancyIsAbsorbedByPressure) {
  const Grid g = square(16);
  FluidParams p;
  p.dt = 1e-2;
  p.phi = sample(g, [](double, double y) { return 9.81 * y; });
  FluidStepper st(g, p);
  VectorField u = FaceField::zeros(g);
  for (int k = 0; k < 5; ++k) u = st.step(u, ScalarField::Ones(g.num_cells()));
  EXPECT_LT(std::sqrt(velocity_l2_squared(g, u)), 1e-12);
  // the pressure balances the force: P ≈ −g y up to a constant
  const ScalarField& P = st.pressure();
  EXPECT_NEAR(P[g.index(0, 15)] - P[g.index(0, 0)], -9.81 * 15.0 / 16.0, 1e-9);
}

TEST(Fluid, BodyForceUsesFaceAverage) {
  const Grid g = square(4);
  const ScalarField n = sample(g, [](double x, double) { return x; });
  const ScalarField phi = sample(g, [](double x, double) { return 2.0 * x; });
  const VectorField f = body_force(g, n, phi);
  // interior x-face i between cells i−1, i: n̄ = i·dx, ∂xφ = 2
  EXPECT_NEAR(f.x[g.x_face(2, 1)], 0.5 * 2.0, 1e-14);
  EXPECT_EQ(f.x[g.x_face(0, 1)], 0.0);
  EXPECT_NEAR(f.y.cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(Fluid, ConvectionConservesMomentumOfSolenoidalField) {
  // periodic-free box: Σ ∇·(u⊗u) over unknowns vanishes up to wall fluxes,
  // which are zero for no-slip. The energy transfer ⟨C(u), u⟩ is dissipative.
  const Grid g = square(24);
  const VectorField u = vortex(g, 1.0);
  const VectorField c = convection(g, u);
  const double work = (c.x.dot(u.x) + c.y.dot(u.y)) * g.cell_volume();
  EXPECT_GE(work, -1e-12);
}

TEST(Fluid, CflViolationThrows) {
  const Grid g = square(16);
  const VectorField u = vortex(g, 5.0);
  FluidParams p;
  p.dt = 2.0 * fluid_cfl_limit(g, u);
  FluidStepper st(g, p);
  EXPECT_THROW(st.step(u, ScalarField::Zero(g.num_cells())), CflError);
}

TEST(Fluid, ParameterValidation) {
  const Grid g = square(8);
  FluidParams p;
  p.mu = 0.0;
  EXPECT_THROW(FluidStepper(g, p), std::invalid_argument);
  p.mu = 1.0;
  p.mode = FluidMode::galerkin;
  EXPECT_THROW(FluidStepper(g, p), std::invalid_argument);  // no basis
}

TEST(Fluid, DecayRateIsPositiveAndBoundedByTwoMu) {
  for (const Grid& g : {square(24), lshape(24)}) {
    FluidParams p;
    p.mu = 0.5;
    p.dt = 5e-3;
    const double r = measure_fluid_decay_rate(g, p);
    EXPECT_GT(r, 0.0);
    // backward Euler adds dt·μ²‖Lu‖² ≤ dt·μ²·λmax‖∇u‖² to the dissipation
    const double lmax = 4.0 / (g.dx() * g.dx()) + 4.0 / (g.dy() * g.dy());
    EXPECT_LE(r, 2.0 * p.mu * (1.0 + 0.5 * p.dt * p.mu * lmax));
  }
}

TEST(Fluid, EnergyNormsOfKnownField) {
  // u = (0, sin πx) sampled on y-faces of a 1-cell-thick interior: compare
  // the gradient norm with −⟨Δ_h u, u⟩ of the viscous operator
  const Grid g = lshape(16);
  const FaceDofMap dofs(g);
  const SparseMatrix L = assemble_velocity_laplacian(g, dofs);
  const VectorField u = random_dofs(g, 2);
  const Eigen::VectorXd v = dofs.gather(u);
  EXPECT_NEAR(velocity_gradient_l2_squared(g, u), -v.dot(L * v) * g.cell_volume(),
              1e-10 * velocity_gradient_l2_squared(g, u));
}
