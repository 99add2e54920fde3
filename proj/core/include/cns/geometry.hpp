#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cns {

using ScalarField = Eigen::VectorXd;

enum class DomainShape { rectangle, l_shape, mask };

/// Input to build_grid. Lengths are the physical extent of the bounding box;
/// cell sizes follow as lx/nx and ly/ny. One-dimensional grids ignore ny/ly
/// and use a unit transverse extent so that boundary "faces" are points of
/// measure one.
struct DomainSpec {
  DomainShape shape = DomainShape::rectangle;
  int dim = 2;
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;
  /// Row-major nx*ny flags, used only for DomainShape::mask.
  std::vector<std::uint8_t> mask;
};

enum class Side : std::uint8_t { west = 0, east = 1, south = 2, north = 3 };

constexpr Side all_sides[] = {Side::west, Side::east, Side::south, Side::north};

/// A cell face on the domain boundary Γ.
struct BoundaryFace {
  int cell = -1;   ///< compact interior-cell index
  Side side = Side::west;
  double normal_x = 0.0;
  double normal_y = 0.0;
  double area = 0.0;  ///< dy for x-faces, dx for y-faces
  double mid_x = 0.0;
  double mid_y = 0.0;
  int axis = 0;        ///< 0 for x-faces, 1 for y-faces
  int face_index = -1; ///< index into the x- or y-face array of a FaceField
};

class Grid {
 public:
  static Grid build(const DomainSpec& spec);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_volume() const { return dx_ * dy_; }

  /// Number of masked-in cells.
  int num_cells() const { return static_cast<int>(cell_i_.size()); }

  bool inside(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx_ && j < ny_ && compact_[j * nx_ + i] >= 0;
  }
  /// Compact index of cell (i, j), or -1 when outside the mask or the box.
  int index(int i, int j) const {
    return (i >= 0 && j >= 0 && i < nx_ && j < ny_) ? compact_[j * nx_ + i] : -1;
  }
  int cell_i(int c) const { return cell_i_[c]; }
  int cell_j(int c) const { return cell_j_[c]; }
  double x_center(int i) const { return (i + 0.5) * dx_; }
  double y_center(int j) const { return dim_ == 1 ? 0.5 : (j + 0.5) * dy_; }

  /// Neighbouring compact index across `side`, -1 if that face is on Γ.
  int neighbor(int c, Side side) const;

  /// Face-array sizes for MAC/face fields. One-dimensional grids have no
  /// y-faces at all.
  int num_x_faces() const { return (nx_ + 1) * ny_; }
  int num_y_faces() const { return dim_ == 1 ? 0 : nx_ * (ny_ + 1); }
  int x_face(int i, int j) const { return j * (nx_ + 1) + i; }
  int y_face(int i, int j) const { return j * nx_ + i; }

  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_; }
  /// Boundary-face indices of a cell, -1 per side that is not on Γ.
  int boundary_face_of(int c, Side side) const { return cell_boundary_[4 * c + static_cast<int>(side)]; }
  bool is_boundary_cell(int c) const;

  double area() const { return num_cells() * cell_volume(); }
  double perimeter() const;

  /// Stable hash of resolution, spacing and mask (used to key caches).
  std::uint64_t hash() const;

 private:
  int dim_ = 2;
  int nx_ = 0;
  int ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
  std::vector<int> compact_;
  std::vector<int> cell_i_;
  std::vector<int> cell_j_;
  std::vector<BoundaryFace> boundary_;
  std::vector<int> cell_boundary_;
};

/// Per-face oxygen exchange data of the Robin condition ∇c·ν = κ(γ − c),
/// plus an interior extension γ̂ of the saturation.
struct BoundaryData {
  std::vector<double> kappa;   ///< per boundary face, >= 0
  std::vector<double> gamma;   ///< per boundary face, >= gamma_lower > 0
  ScalarField gamma_ext;       ///< per cell
  double gamma_lower = 0.0;

  double gamma_max() const;
};

using FaceFunction = std::function<double(const BoundaryFace&)>;

/// Samples κ and γ at face midpoints and builds γ̂ by discrete harmonic
/// extension of the boundary-cell averages of γ, clamped below by gamma_lower.
/// Throws std::invalid_argument on κ < 0 or γ <= 0.
BoundaryData make_boundary_data(const Grid& grid, const FaceFunction& kappa, const FaceFunction& gamma);

/// Builds BoundaryData from explicit per-face arrays (same validation).
BoundaryData make_boundary_data(const Grid& grid, std::vector<double> kappa, std::vector<double> gamma);

/// Midpoint rule Σ f_i dx dy over interior cells.
double integrate_volume(const Grid& grid, const ScalarField& f);

/// Σ g_f · area_f over boundary faces.
double integrate_boundary(const Grid& grid, std::span<const double> g);

}  // namespace cns
