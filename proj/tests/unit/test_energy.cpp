#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cns/density.hpp"
#include "cns/energy.hpp"
#include "cns/fluid.hpp"

using namespace cns;

namespace {

Grid square(int n) { return Grid::build(DomainSpec{DomainShape::rectangle, 2, n, n, 1.0, 1.0, {}}); }
Grid lshape(int n) { return Grid::build(DomainSpec{DomainShape::l_shape, 2, n, n, 1.0, 1.0, {}}); }
Grid line(int n) { return Grid::build(DomainSpec{DomainShape::rectangle, 1, n, 0, 1.0, 1.0, {}}); }

template <class F>
ScalarField sample(const Grid& g, F&& f) {
  ScalarField v(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) v[c] = f(g.x_center(g.cell_i(c)), g.y_center(g.cell_j(c)));
  return v;
}

BoundaryData constant_data(const Grid& g, double kappa, double gamma) {
  return make_boundary_data(g, [=](const BoundaryFace&) { return kappa; }, [=](const BoundaryFace&) { return gamma; });
}

}  // namespace

TEST(EntropyFunctions, Values) {
  EXPECT_EQ(s_fn(1.0), 0.0);
  EXPECT_EQ(s_fn(0.0), 1.0);
  EXPECT_NEAR(s_fn(std::exp(1.0)), 1.0, 1e-15);
  EXPECT_NEAR(s_inf_fn(2.0, 1.0), 2.0 * std::log(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(s_inf_fn(2.0, 1.0), 0.386294, 1e-6);
  EXPECT_EQ(s_inf_fn(0.0, 3.0), 3.0);
  EXPECT_EQ(s_inf_fn(1.5, 1.5), 0.0);
  EXPECT_THROW(s_fn(-1e-3), std::invalid_argument);
  EXPECT_THROW(s_inf_fn(1.0, 0.0), std::invalid_argument);
}

TEST(EntropyFunctions, ConvexAndNonnegative) {
  for (double z : {0.1, 1.0, 7.0})
    for (double y = 0.1; y < 20.0; y += 0.37) {
      EXPECT_GE(s_inf_fn(y, z), 0.0);
      EXPECT_GE(s_inf_fn(y + 0.1, z) + s_inf_fn(y - 0.1, z) - 2 * s_inf_fn(y, z), -1e-12);
    }
}

TEST(EnergyS, ClosedForms) {
  const Grid g = square(16);
  const VectorField u0 = FaceField::zeros(g);
  EXPECT_NEAR(energy_S(g, ScalarField::Ones(256), ScalarField::Constant(256, 3.0), u0, 2.0, 1.0), 0.0, 1e-15);
  const double e = std::exp(1.0);
  EXPECT_NEAR(energy_S(g, ScalarField::Constant(256, e), ScalarField::Constant(256, 3.0), u0, 1.0, 1.0), e, 1e-13);

  // 1D: c = (1+x)², |∇√c| = 1
  const Grid l = line(256);
  const double S = energy_S(l, ScalarField::Ones(256), sample(l, [](double x, double) { return (1 + x) * (1 + x); }),
                            FaceField::zeros(l), 2.0, 1.0);
  EXPECT_NEAR(S, 2.0, 1e-3);
}

TEST(EnergyS, KineticTerm) {
  const Grid g = square(16);
  const VectorField u = curl_of_streamfunction(g, [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
  const double S = energy_S(g, ScalarField::Ones(256), ScalarField::Ones(256), u, 2.0, 3.0);
  EXPECT_NEAR(S, 3.0 * velocity_l2_squared(g, u), 1e-12);
}

TEST(EnergyBoundary, ClosedForms) {
  const Grid g = square(16);
  EXPECT_NEAR(energy_boundary(g, constant_data(g, 1.0, 1.5), ScalarField::Constant(256, 1.5)), 0.0, 1e-15);
  EXPECT_EQ(energy_boundary(g, constant_data(g, 0.0, 1.5), ScalarField::Constant(256, 0.3)), 0.0);
  // perimeter · s∞(1|2) = 4(ln ½ − 1 + 2)
  EXPECT_NEAR(energy_boundary(g, constant_data(g, 1.0, 1.0), ScalarField::Constant(256, 2.0)),
              4.0 * (1.0 - std::log(2.0)), 1e-12);
  EXPECT_NEAR(4.0 * (1.0 - std::log(2.0)), 1.2274, 1e-4);
}

TEST(EnergyAdd, ClosedForms) {
  const Grid g = lshape(12);
  const BoundaryData b = constant_data(g, 1.0, 1.0);
  const int nc = g.num_cells();
  EXPECT_NEAR(energy_add(g, b, b.gamma_ext), 0.0, 1e-15);
  EXPECT_NEAR(energy_add(g, b, ScalarField::Constant(nc, 2.0)), (2 * std::log(2.0) - 1) * g.area(), 1e-12);
  EXPECT_NEAR(energy_add(g, b, ScalarField::Zero(nc)), integrate_volume(g, b.gamma_ext), 1e-12);
}

TEST(TotalFunctionals, Equilibrium) {
  const Grid g = square(16);
  const BoundaryData b = constant_data(g, 1.0, 1.2);
  const double nbar = 1.7;
  EnergyConstants k;
  k.K = 5.0;
  k.L = 2.0;
  const ScalarField n = ScalarField::Constant(256, nbar), c = ScalarField::Constant(256, 1.2);
  const double F = total_F(g, b, n, c, FaceField::zeros(g), k);
  EXPECT_NEAR(F, nbar * std::log(nbar), 1e-12);
  EXPECT_NEAR(total_X(g, b, n, c, FaceField::zeros(g), k), F, 1e-12);
}

TEST(Dissipation, Cases) {
  const Grid g = square(16);
  EXPECT_NEAR(dissipation_E(g, ScalarField::Constant(256, 2.0), ScalarField::Constant(256, 3.0), FaceField::zeros(g)), 0.0,
              1e-15);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (int t = 0; t < 5; ++t) {
    ScalarField n(256), c(256);
    for (int k = 0; k < 256; ++k) n[k] = U(rng), c[k] = U(rng);
    EXPECT_GE(dissipation_E(g, n, c, FaceField::zeros(g)), 0.0);
  }

  // 1D c = eˣ, n = 0: only ∫|∇c|⁴/c³ = ∫eˣ survives
  const Grid l = line(256);
  const double E = dissipation_E(l, ScalarField::Zero(256), sample(l, [](double x, double) { return std::exp(x); }),
                                 FaceField::zeros(l));
  EXPECT_NEAR(E, std::exp(1.0) - 1.0, 0.01 * (std::exp(1.0) - 1.0));
}

TEST(Bernstein, TrivialCases) {
  const Grid g = square(16);
  const BernsteinReport a = check_bernstein(g, constant_data(g, 1.0, 2.0), ScalarField::Constant(256, 2.0));
  EXPECT_NEAR(a.lhs, 0.0, 1e-40);
  EXPECT_NEAR(a.rhs, 0.0, 1e-15);
  EXPECT_TRUE(a.holds);
  const BernsteinReport b = check_bernstein(g, constant_data(g, 0.0, 2.0), ScalarField::Constant(256, 0.7));
  EXPECT_NEAR(b.lhs, 0.0, 1e-40);
  EXPECT_EQ(b.rhs, 0.0);
  EXPECT_TRUE(b.holds);
}

TEST(Bernstein, GeneratedFieldsSatisfyRobinAndInequality) {
  for (const Grid& g : {square(48), lshape(48)}) {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 10; ++k) {
      const RobinField f = make_robin_compatible_field(g, rng);
      EXPECT_GT(f.c.minCoeff(), 0.0);
      for (std::size_t j = 0; j < f.bdata.kappa.size(); ++j) {
        EXPECT_GE(f.bdata.kappa[j], 1.0);
        EXPECT_LE(f.bdata.kappa[j], 4.0);
        EXPECT_GT(f.bdata.gamma[j], 0.0);
      }
      const BernsteinReport r = check_bernstein(g, f.bdata, f.c);
      EXPECT_LT(r.robin_residual, 0.05);
      EXPECT_TRUE(r.holds) << r.lhs << " vs " << r.rhs;
    }
  }
}

TEST(EnergyFit, EquilibriumAndDecay) {
  std::vector<double> t, flat, decay;
  for (int k = 0; k <= 50; ++k) {
    t.push_back(0.1 * k);
    flat.push_back(0.25);
    decay.push_back(3.0 * std::exp(-0.1 * k));
  }
  const EnergyFit a = check_energy_inequality(t, flat);
  EXPECT_EQ(a.p, 0.0);
  EXPECT_EQ(a.q, 0.0);
  EXPECT_EQ(a.violations, 0);
  const EnergyFit b = check_energy_inequality(t, decay);
  EXPECT_EQ(b.p, 0.0);
  EXPECT_EQ(b.q, 0.0);
  EXPECT_EQ(b.violations, 0);
}

TEST(EnergyFit, GrowthNeedsPositiveRates) {
  std::vector<double> t, F;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.05 * k);
    F.push_back(1.0 + 0.5 * t.back());  // dF/dt = ½
  }
  const EnergyFit f = check_energy_inequality(t, F);
  EXPECT_EQ(f.violations, 0);
  EXPECT_EQ(f.envelope_violations, 0);
  // the envelope covers the curve
  EXPECT_GT(f.p * F.back() + f.q, 0.5 - 1e-9);
  EXPECT_THROW(check_energy_inequality(std::vector<double>{0, 1}, std::vector<double>{0, 1}), std::invalid_argument);
  EXPECT_THROW(check_energy_inequality(std::vector<double>{0, 1, 1}, std::vector<double>{0, 1, 2}), std::invalid_argument);
}

TEST(UniformBound, RelaxationToCeiling) {
  // X' = −2X + 3: X → 1.5
  std::vector<double> t, X;
  for (int k = 0; k <= 400; ++k) {
    t.push_back(0.025 * k);
    X.push_back(1.5 + (0.2 - 1.5) * std::exp(-2.0 * t.back()));
  }
  const UniformBound u = check_uniform_bound(t, X, 5.0);
  EXPECT_NEAR(u.ceiling, 1.5, 1e-3);
  EXPECT_NEAR(u.sup, u.bound, 1e-3);  // tight: X creeps up to the ceiling
  // relaxing from above stays under X(0)
  std::vector<double> Y;
  for (double s : t) Y.push_back(1.5 + 0.5 * std::exp(-2.0 * s));
  const UniformBound v = check_uniform_bound(t, Y, 5.0);
  EXPECT_TRUE(v.bounded);
  EXPECT_TRUE(v.late_nonincreasing);
  EXPECT_TRUE(u.late_nonincreasing || u.late_slope < 1e-3);
  EXPECT_GT(linear_fit_slope(t, X, 0.0), 0.0);
  std::vector<double> lin{1, 3, 5, 7};
  std::vector<double> tt{0, 1, 2, 3};
  EXPECT_NEAR(linear_fit_slope(tt, lin, 0.0), 2.0, 1e-14);
  EXPECT_NEAR(linear_fit_slope(tt, lin, 1.5), 2.0, 1e-14);
}

TEST(EntropyIdentity, EquilibriumResidualIsRoundOff) {
  const Grid g = square(16);
  const ScalarField n = ScalarField::Ones(256), c = ScalarField::Constant(256, 2.0);
  const EntropyResidual r = check_entropy_identity_n(g, n, n, n, c, 1e-2, 0.1);
  EXPECT_NEAR(r.residual, 0.0, 1e-14);
}

TEST(EntropyIdentity, DiffusionUnderConstantOxygenConverges) {
  std::vector<double> res;
  for (int n : {32, 64, 128}) {
    const Grid g = square(n);
    const double dt = 0.25 / n;
    const ScalarField c = ScalarField::Constant(g.num_cells(), 1.0);
    ScalarField d = sample(g, [](double x, double y) { return 1.0 + 0.6 * std::cos(M_PI * x) * std::cos(M_PI * y); });
    DensityStepper st(g, DensityStepParams{dt, 0.0, true, {}});
    const int steps = static_cast<int>(std::lround(0.0625 / dt));
    ScalarField prev;
    for (int k = 0; k < steps; ++k) prev = d, d = st.step(d, c, FaceField::zeros(g));
    const ScalarField next = st.step(d, c, FaceField::zeros(g));
    const EntropyResidual r = check_entropy_identity_n(g, prev, d, next, c, dt, 0.0);
    EXPECT_NEAR(r.rhs, 0.0, 1e-14);
    res.push_back(r.residual);
  }
  EXPECT_GE(std::log2(res[1] / res[2]), 0.9);
}

TEST(FluidEnergy, Cases) {
  const Grid g = square(24);
  const ScalarField n = ScalarField::Zero(576), phi = ScalarField::Zero(576);
  const VectorField zero = FaceField::zeros(g);
  const FluidEnergyMargin z = check_fluid_energy(g, zero, zero, n, phi, 1e-3);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.rhs, 0.0);
  EXPECT_TRUE(z.holds);

  FluidParams p;
  p.dt = 1e-3;
  FluidStepper st(g, p);
  const VectorField u0 = curl_of_streamfunction(g, [](double x, double y) { return std::sin(M_PI * x) * std::sin(2 * M_PI * y); });
  const VectorField u1 = st.step(u0, n);
  const FluidEnergyMargin m = check_fluid_energy(g, u0, u1, n, phi, p.dt);
  EXPECT_LT(m.lhs, 0.0);
  EXPECT_GE(m.rhs, 0.0);
  EXPECT_TRUE(m.holds);
}

TEST(FluidWeight, Formula) {
  const Grid g = square(8);
  const BoundaryData b = constant_data(g, 1.0, 2.0);
  // 32 · ‖c0‖∞ · max(1, ‖γ‖∞) / C = 32 · 0.5 · 2 / 4
  EXPECT_NEAR(choose_fluid_weight(ScalarField::Constant(64, 0.5), b, 4.0), 8.0, 1e-14);
  EXPECT_EQ(choose_fluid_weight(ScalarField::Constant(64, 1e-3), b, 4.0), 1.0);
}

TEST(Report, FieldsAreConsistent) {
  const Grid g = lshape(16);
  const BoundaryData b = constant_data(g, 1.0, 1.0);
  const ScalarField n = sample(g, [](double x, double y) { return 1 + x * y; });
  const ScalarField c = sample(g, [](double x, double y) { return 0.5 + 0.25 * x + 0.1 * y; });
  const VectorField u = curl_of_streamfunction(g, [](double x, double y) { return 0.1 * x * y * (1 - x) * (1 - y); });
  EnergyConstants k;
  k.K = 3.0;
  k.L = 0.5;
  const EnergyReport r = compute_report(g, b, n, c, u, 2.5, k);
  EXPECT_EQ(r.t, 2.5);
  EXPECT_NEAR(r.mass_n, integrate_volume(g, n), 1e-14);
  EXPECT_EQ(r.c_max, c.maxCoeff());
  EXPECT_NEAR(r.F, total_F(g, b, n, c, u, k), 1e-14);
  EXPECT_NEAR(r.X, r.F + k.L * r.S_add, 1e-14);
  EXPECT_NEAR(r.lp_n_2, lp_norm(g, n, 2.0), 1e-14);
  EXPECT_NEAR(r.lp_n_3, lp_norm(g, n, 3.0), 1e-14);
  EXPECT_NEAR(r.u_l2, std::sqrt(velocity_l2_squared(g, u)), 1e-14);
  EXPECT_NEAR(r.grad_u_l2, std::sqrt(velocity_gradient_l2_squared(g, u)), 1e-14);
  EXPECT_GE(r.E, 0.0);
}
