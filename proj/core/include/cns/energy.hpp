#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cns/fluid.hpp"
#include "cns/geometry.hpp"
#include "cns/ops.hpp"

namespace cns {

/// s(y) = y log y − y + 1 with 0 log 0 = 0. Throws std::invalid_argument for y < 0.
double s_fn(double y);
/// s∞(y|z) = y log(y/z) − y + z. Throws std::invalid_argument for y < 0 or z <= 0.
double s_inf_fn(double y, double z);

struct EnergyConstants {
  double a = 2.0;  ///< weight of ∫|∇√c|² in S
  double b = 1.0;  ///< weight of ∫|u|² in S
  double K = 1.0;  ///< fluid weight in F
  double L = 1.0;  ///< weight of S_add in X
  double p = 0.0;  ///< fitted growth rate of F
  double q = 0.0;  ///< fitted growth offset of F
};

struct EnergyReport {
  double t = 0.0;
  double mass_n = 0.0;
  double c_max = 0.0;
  double S = 0.0;
  double S_boundary = 0.0;
  double S_add = 0.0;
  double F = 0.0;
  double X = 0.0;
  double E = 0.0;
  double lp_n_2 = 0.0;
  double lp_n_3 = 0.0;
  double grad_c_l4 = 0.0;  ///< ∫|∇c|⁴
  double u_l2 = 0.0;       ///< ‖u‖
  double grad_u_l2 = 0.0;  ///< ‖∇u‖
};

/// ∫ n log n + a ∫|∇√c|² + b ∫|u|². √c is differenced at cell centres after
/// flooring c at `floor`.
double energy_S(const Grid& grid, const ScalarField& n, const ScalarField& c, const VectorField& u, double a, double b,
                double floor = 1e-12);
/// ∫_Γ κ s∞(γ | c) with the boundary-cell value as the trace of c.
double energy_boundary(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, double floor = 1e-12);
/// ∫ s∞(c | γ̂).
double energy_add(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, double floor = 1e-12);
/// ∫ n log n + 2∫|∇√c|² + S_boundary + K‖u‖².
double total_F(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, const ScalarField& c,
               const VectorField& u, const EnergyConstants& k, double floor = 1e-12);
/// total_F + L·S_add.
double total_X(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, const ScalarField& c,
               const VectorField& u, const EnergyConstants& k, double floor = 1e-12);
/// ∫(|∇√n|² + c|∇² log c|² + |∇c|⁴/c³ + n|∇√c|²) + ‖u‖² + ‖∇u‖².
double dissipation_E(const Grid& grid, const ScalarField& n, const ScalarField& c, const VectorField& u,
                     double floor = 1e-12);
/// ∫ |∇c|⁴ with cell-centred gradients.
double grad_c_l4(const Grid& grid, const ScalarField& c);

EnergyReport compute_report(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, const ScalarField& c,
                            const VectorField& u, double t, const EnergyConstants& k, double floor = 1e-12);

/// K = max(1, 32 ‖c0‖∞ max(1, ‖γ‖∞) / C(μ)) with C(μ) the measured decay rate
/// of the unforced fluid stepper.
double choose_fluid_weight(const ScalarField& c0, const BoundaryData& bdata, double decay_rate);

// ---------------------------------------------------------------------------
// Bernstein inequality
//   ¼∫|∇c|⁴/c³ ≤ ∫_Γ |∇log c|² κ(γ − c) + (2 + d)∫ c|∇² log c|²

struct BernsteinReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double boundary_term = 0.0;
  double interior_term = 0.0;
  double margin = 0.0;         ///< rhs − lhs
  double robin_residual = 0.0; ///< max relative mismatch of the sampled Robin condition
  bool holds = true;           ///< lhs ≤ rhs (1 + rel_tol) + abs_tol
};

BernsteinReport check_bernstein(const Grid& grid, const BoundaryData& bdata, const ScalarField& c,
                                double floor = 1e-12, double rel_tol = 0.05, double abs_tol = 1e-12);

/// A smooth positive field c = exp(g) with boundary data for which it
/// satisfies ∂_ν c = κ(γ − c) exactly at face midpoints.
struct RobinField {
  ScalarField c;
  BoundaryData bdata;
};

/// g is a random low-frequency cosine/sine sum; κ ∈ [1, 4] varies smoothly
/// along Γ; γ = c + ∂_ν c / κ on each face. The amplitude is scaled so that
/// |∇g| ≤ κ_min/2, which keeps γ ≥ c/2 > 0.
RobinField make_robin_compatible_field(const Grid& grid, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Trajectory checks

struct EnergyFit {
  double p = 0.0;
  double q = 0.0;
  int violations = 0;            ///< samples with dF/dt > pF + q + tol
  double max_excess = 0.0;       ///< largest (dF/dt − pF − q) / max(1, |F|)
  int envelope_violations = 0;   ///< samples with F(t) above the Gronwall envelope + tol
  std::vector<double> dFdt;
};

/// Fits the smallest q ≥ 0 for each candidate p so that dF/dt ≤ pF + q at
/// every sample (central differences, one-sided at the ends) and keeps the
/// pair with the lowest envelope at the final time. Throws
/// std::invalid_argument for fewer than 3 samples or non-increasing times.
EnergyFit check_energy_inequality(std::span<const double> t, std::span<const double> F, double rel_tol = 1e-6);

struct UniformBound {
  double lambda = 0.0;
  double C = 0.0;
  double ceiling = 0.0;      ///< C* = C/λ
  double sup = 0.0;          ///< sup_t X
  double bound = 0.0;        ///< max(X(0) + 0.05|X(0)|, C*)
  double late_slope = 0.0;   ///< least-squares slope of X over [t_from, t_end]
  bool bounded = false;
  bool late_nonincreasing = false;
};

/// Fits dX/dt + λX ≤ C on the first half of the series and reports the
/// ceiling C* = min_λ C/λ. `late_from` selects the slope window.
UniformBound check_uniform_bound(std::span<const double> t, std::span<const double> X, double late_from);

/// Least-squares slope of y against t over samples with t >= t_from.
double linear_fit_slope(std::span<const double> t, std::span<const double> y, double t_from);

struct EntropyResidual {
  double lhs = 0.0;  ///< d/dt ∫s(n) + 4∫|∇√n|² − ε∫n(1−n²)log n
  double rhs = 0.0;  ///< ∫∇c·∇n
  double residual = 0.0;
};

/// Evaluates the entropy identity for n at the middle of three states spaced
/// by dt, with c taken at the middle state. The reaction term enters with the
/// sign implied by ∂_t n = … + ε n(1 − n²).
EntropyResidual check_entropy_identity_n(const Grid& grid, const ScalarField& n_prev, const ScalarField& n_mid,
                                         const ScalarField& n_next, const ScalarField& c, double dt, double epsilon,
                                         double floor = 1e-12);

struct FluidEnergyMargin {
  double lhs = 0.0;  ///< (‖u_next‖² − ‖u_prev‖²) / dt
  double rhs = 0.0;  ///< 2|⟨n∇φ, u_next⟩|
  double tol = 0.0;
  double margin = 0.0;  ///< rhs + tol − lhs
  bool holds = true;
};

FluidEnergyMargin check_fluid_energy(const Grid& grid, const VectorField& u_prev, const VectorField& u_next,
                                     const ScalarField& n, const ScalarField& phi, double dt);

}  // namespace cns
