#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

#include "cns/geometry.hpp"
#include "cns/ops.hpp"

namespace cns {

/// Eigenmodes of the discrete Stokes operator A_h = −P Δ_h on the MAC grid,
/// orthonormal in the discrete L² inner product Σ u·v dx dy. Modes are stored
/// as columns in FaceDofMap coordinates.
class StokesBasis {
 public:
  StokesBasis() = default;
  StokesBasis(std::uint64_t grid_hash, Eigen::MatrixXd modes, Eigen::VectorXd eigenvalues, double cell_volume);

  int size() const { return static_cast<int>(eigenvalues_.size()); }
  int num_dofs() const { return static_cast<int>(modes_.rows()); }
  std::uint64_t grid_hash() const { return grid_hash_; }
  double cell_volume() const { return cell_volume_; }
  const Eigen::MatrixXd& modes() const { return modes_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// ⟨f, v_k⟩ for k < m, f in dof coordinates.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& f, int m) const;
  /// Σ_{k<m} a_k v_k in dof coordinates.
  Eigen::VectorXd synthesize(const Eigen::VectorXd& a) const;

  VectorField mode(const Grid& grid, int k) const;

 private:
  std::uint64_t grid_hash_ = 0;
  Eigen::MatrixXd modes_;
  Eigen::VectorXd eigenvalues_;
  double cell_volume_ = 1.0;
};

/// Dimension of the discretely divergence-free velocity space: the number of
/// interior grid nodes (exact for simply connected masks).
int stokes_dimension(const Grid& grid);

/// Solves the Stokes eigenproblem in stream-function coordinates,
///   Cᵀ W (−Δ_h) C a = λ Cᵀ W C a,
/// where C maps nodal stream functions to MAC velocities, and keeps the m_max
/// smallest eigenpairs. Throws std::invalid_argument if m_max is out of range,
/// SolverError if the dense eigensolver fails.
StokesBasis build_stokes_basis(const Grid& grid, int m_max);

/// P^m f = Σ_{k<m} ⟨f, v_k⟩ v_k. Throws std::invalid_argument if m is out of range.
VectorField leray_project(const Grid& grid, const StokesBasis& basis, const VectorField& f, int m);

/// Cache file: "CNSSTOKE" magic, u32 format version, u32 reserved, u64 grid
/// hash, u64 m_max, u64 ndof, f64 cell volume, then m_max packed mode vectors
/// of ndof values each, then m_max eigenvalues. All little-endian.
void save_stokes_basis(const StokesBasis& basis, const std::filesystem::path& path);
/// Throws std::runtime_error on I/O or format errors.
StokesBasis load_stokes_basis(const std::filesystem::path& path);

/// Loads the cache when it matches the grid and holds at least m_max modes,
/// otherwise builds the basis and rewrites the cache.
StokesBasis load_or_build_stokes_basis(const Grid& grid, int m_max, const std::filesystem::path& cache);

}  // namespace cns
