#pragma once

#include <initializer_list>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cns/geometry.hpp"

namespace cns {

/// Values on the x-faces ((nx+1)*ny, indexed by Grid::x_face) and y-faces
/// (nx*(ny+1), indexed by Grid::y_face). Used both for MAC velocities and for
/// face gradients/fluxes. Faces not adjacent to an interior cell hold 0.
struct FaceField {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  static FaceField zeros(const Grid& grid);
};

/// Staggered velocity: u_x on x-faces, u_y on y-faces, zero on Γ (no-slip).
using VectorField = FaceField;

/// Cell-centred vector (e.g. a cell gradient).
struct CellVector {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

struct SymTensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
  double frobenius2() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// L and s with L f + s ≈ Δf under the closure used at assembly.
struct SparseOperator {
  SparseMatrix matrix;
  Eigen::VectorXd source;
};

/// Enumerates the MAC velocity unknowns: faces with interior cells on both
/// sides. Every other face is a wall (Γ) or lies outside the domain.
class FaceDofMap {
 public:
  explicit FaceDofMap(const Grid& grid);

  int num_dofs() const { return ndof_; }
  int x_dof(int face) const { return x_dof_[face]; }
  int y_dof(int face) const { return y_dof_.empty() ? -1 : y_dof_[face]; }

  Eigen::VectorXd gather(const FaceField& f) const;
  FaceField scatter(const Eigen::VectorXd& v) const;

 private:
  int ndof_ = 0;
  int nxf_ = 0;
  int nyf_ = 0;
  std::vector<int> x_dof_;
  std::vector<int> y_dof_;
};

bool is_interior_x_face(const Grid& grid, int i, int j);
bool is_interior_y_face(const Grid& grid, int i, int j);

/// Floor used for every log(c) and 1/c evaluation in diagnostics:
/// 1e-12 · max(1, ‖c0‖∞).
double diagnostics_floor(const ScalarField& c0);

/// Robin face coefficient β = κ/(1 + κ h/2) of the half-cell closure
/// F = β(γ − c_cell); h is the cell width normal to the face.
double robin_beta(double kappa, double h);

/// Outward normal derivative ∂_ν c on each boundary face from the Robin closure.
std::vector<double> robin_face_flux(const Grid& grid, const BoundaryData& bdata, const ScalarField& c);

/// Centred face gradient on interior faces; 0 on Γ (homogeneous Neumann).
FaceField gradient(const Grid& grid, const ScalarField& f);
/// As gradient(), with ∂_ν c = κ(γ − c) from the Robin closure on Γ.
FaceField gradient_robin(const Grid& grid, const BoundaryData& bdata, const ScalarField& c);
/// As gradient(), with the zero-total-flux closure ∂_ν n = n ∂_ν c on Γ,
/// where `grad_c` supplies the boundary values of ∇c.
FaceField gradient_total_flux(const Grid& grid, const ScalarField& n, const FaceField& grad_c);

/// Cell-centred gradient: centred where both neighbours exist, second-order
/// one-sided at mask edges, zero along an axis with no neighbours.
CellVector cell_gradient(const Grid& grid, const ScalarField& f);

/// Neumann Laplacian (row sums 0, zero source).
SparseOperator assemble_neumann_laplacian(const Grid& grid);
/// Laplacian with the Robin flux κ(γ − c) imposed through the half-cell
/// closure. Throws std::invalid_argument for negative κ.
SparseOperator assemble_robin_laplacian(const Grid& grid, const BoundaryData& bdata);

/// Σ over cell faces of (outward flux · area) / volume.
ScalarField divergence(const Grid& grid, const FaceField& flux);

/// −∇·(w f_up), first-order upwind. No requirement on ∇·w; faces on Γ must
/// carry zero transport velocity (they are skipped).
ScalarField upwind_flux_divergence(const Grid& grid, const ScalarField& f, const FaceField& w);

/// Tendency −∇·(v f) for a divergence-free, wall-tangent velocity. Throws
/// std::invalid_argument if v is nonzero on Γ beyond round-off.
ScalarField advect_upwind(const Grid& grid, const ScalarField& f, const VectorField& v);

/// Per-cell outflow rate Σ_f max(0, w·ν) A_f / V. An explicit upwind step is
/// positivity-preserving iff dt · rate ≤ 1 in every cell.
ScalarField outflow_rate(const Grid& grid, const FaceField& w);

/// Explicit upwind update f + dt·(−∇·(w f_up)) summed over `velocities`,
/// written with nonnegative coefficients so that f >= 0 maps to a result
/// >= 0 whenever dt · Σ outflow_rate <= 1.
ScalarField upwind_explicit_update(const Grid& grid, const ScalarField& f, std::initializer_list<const FaceField*> velocities,
                                   double dt);

/// Centred second differences of log(max(c, floor)), second-order one-sided
/// at mask edges; off-diagonal symmetrised.
std::vector<SymTensor2> hessian_log(const Grid& grid, const ScalarField& c, double floor);

/// Derivative of the boundary-cell trace along each flat boundary segment.
/// Centred inside a segment, inner one-sided at segment ends, 0 for
/// single-face segments (and in 1D).
std::vector<double> tangential_gradient_boundary(const Grid& grid, const ScalarField& f);

inline constexpr double lp_infinity = std::numeric_limits<double>::infinity();

/// (Σ |f|^p dx dy)^(1/p), or max |f| for p = lp_infinity. Throws for p < 1.
double lp_norm(const Grid& grid, const ScalarField& f, double p);

/// Σ over velocity unknowns of u² dx dy.
double velocity_l2_squared(const Grid& grid, const VectorField& u);
/// ∫|∇u|² with u = 0 on walls, matching −⟨Δ_h u, u⟩ of the MAC viscous operator.
double velocity_gradient_l2_squared(const Grid& grid, const VectorField& u);
/// Max over cells of |∇·u|.
double max_divergence(const Grid& grid, const VectorField& u);
/// Max |u| over faces on Γ or outside the domain.
double max_wall_velocity(const Grid& grid, const VectorField& u);

}  // namespace cns
