#include "cns/stokes_basis.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cns/errors.hpp"
#include "cns/fluid.hpp"

namespace cns {

static_assert(std::endian::native == std::endian::little, "basis cache assumes a little-endian host");

StokesBasis::StokesBasis(std::uint64_t grid_hash, Eigen::MatrixXd modes, Eigen::VectorXd eigenvalues, double cell_volume)
    : grid_hash_(grid_hash), modes_(std::move(modes)), eigenvalues_(std::move(eigenvalues)), cell_volume_(cell_volume) {
  if (modes_.cols() != eigenvalues_.size()) throw std::invalid_argument("StokesBasis: mode/eigenvalue count mismatch");
}

Eigen::VectorXd StokesBasis::coefficients(const Eigen::VectorXd& f, int m) const {
  if (m < 0 || m > size()) throw std::invalid_argument("StokesBasis: m out of range");
  if (f.size() != modes_.rows()) throw std::invalid_argument("StokesBasis: vector size mismatch");
  return cell_volume_ * (modes_.leftCols(m).transpose() * f);
}

Eigen::VectorXd StokesBasis::synthesize(const Eigen::VectorXd& a) const {
  if (a.size() > size()) throw std::invalid_argument("StokesBasis: too many coefficients");
  return modes_.leftCols(a.size()) * a;
}

VectorField StokesBasis::mode(const Grid& grid, int k) const {
  if (k < 0 || k >= size()) throw std::invalid_argument("StokesBasis: mode index out of range");
  return FaceDofMap(grid).scatter(modes_.col(k));
}

namespace {

// Interior nodes: all four surrounding cells inside. Returns per-node ids
// on the (nx+1)(ny+1) lattice, -1 elsewhere.
std::vector<int> interior_nodes(const Grid& g, int& count) {
  std::vector<int> id((g.nx() + 1) * (g.ny() + 1), -1);
  count = 0;
  if (g.dim() == 1) return id;
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i)
      if (g.inside(i - 1, j - 1) && g.inside(i, j - 1) && g.inside(i - 1, j) && g.inside(i, j))
        id[j * (g.nx() + 1) + i] = count++;
  return id;
}

SparseMatrix curl_matrix(const Grid& g, const FaceDofMap& dofs, const std::vector<int>& node, int nnodes) {
  const int stride = g.nx() + 1;
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) {
      const int row = dofs.x_dof(g.x_face(i, j));
      if (row < 0) continue;
      if (int a = node[(j + 1) * stride + i]; a >= 0) trip.emplace_back(row, a, 1.0 / g.dy());
      if (int b = node[j * stride + i]; b >= 0) trip.emplace_back(row, b, -1.0 / g.dy());
    }
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const int row = dofs.y_dof(g.y_face(i, j));
      if (row < 0) continue;
      if (int a = node[j * stride + i + 1]; a >= 0) trip.emplace_back(row, a, -1.0 / g.dx());
      if (int b = node[j * stride + i]; b >= 0) trip.emplace_back(row, b, 1.0 / g.dx());
    }
  SparseMatrix c(dofs.num_dofs(), nnodes);
  c.setFromTriplets(trip.begin(), trip.end());
  return c;
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("stokes basis cache: truncated file");
  return v;
}

constexpr std::array<char, 8> kMagic{'C', 'N', 'S', 'S', 'T', 'O', 'K', 'E'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

int stokes_dimension(const Grid& grid) {
  int count = 0;
  interior_nodes(grid, count);
  return count;
}

StokesBasis build_stokes_basis(const Grid& grid, int m_max) {
  int nnodes = 0;
  const std::vector<int> node = interior_nodes(grid, nnodes);
  if (m_max < 1 || m_max > nnodes) {
    std::ostringstream msg;
    msg << "build_stokes_basis: m_max = " << m_max << " outside [1, " << nnodes << "]";
    throw std::invalid_argument(msg.str());
  }
  const FaceDofMap dofs(grid);
  const SparseMatrix c = curl_matrix(grid, dofs, node, nnodes);
  const SparseMatrix lap = assemble_velocity_laplacian(grid, dofs);
  const double w = grid.cell_volume();
  const Eigen::MatrixXd a = -w * Eigen::MatrixXd(SparseMatrix(c.transpose() * lap * c));
  const Eigen::MatrixXd b = w * Eigen::MatrixXd(SparseMatrix(c.transpose() * c));

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SolverError("build_stokes_basis: eigensolver failed");
  // Eigenvalues come out ascending; vectors are B-orthonormal.
  Eigen::MatrixXd modes = c * es.eigenvectors().leftCols(m_max);
  return StokesBasis(grid.hash(), std::move(modes), es.eigenvalues().head(m_max), w);
}

VectorField leray_project(const Grid& grid, const StokesBasis& basis, const VectorField& f, int m) {
  if (m < 1 || m > basis.size()) throw std::invalid_argument("leray_project: m out of range");
  const FaceDofMap dofs(grid);
  if (basis.num_dofs() != dofs.num_dofs()) throw std::invalid_argument("leray_project: basis/grid mismatch");
  return dofs.scatter(basis.synthesize(basis.coefficients(dofs.gather(f), m)));
}

void save_stokes_basis(const StokesBasis& basis, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write stokes basis cache " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, 0);
  put<std::uint64_t>(os, basis.grid_hash());
  put<std::uint64_t>(os, static_cast<std::uint64_t>(basis.size()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(basis.num_dofs()));
  put<double>(os, basis.cell_volume());
  // Column-major storage: each mode is contiguous.
  os.write(reinterpret_cast<const char*>(basis.modes().data()),
           static_cast<std::streamsize>(sizeof(double) * basis.modes().size()));
  os.write(reinterpret_cast<const char*>(basis.eigenvalues().data()),
           static_cast<std::streamsize>(sizeof(double) * basis.eigenvalues().size()));
  if (!os) throw std::runtime_error("error writing stokes basis cache " + path.string());
}

StokesBasis load_stokes_basis(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open stokes basis cache " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("stokes basis cache: bad magic");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("stokes basis cache: unsupported version");
  get<std::uint32_t>(is);
  const auto hash = get<std::uint64_t>(is);
  const auto m = get<std::uint64_t>(is);
  const auto ndof = get<std::uint64_t>(is);
  const double w = get<double>(is);
  if (m > (1u << 24) || ndof > (1u << 26)) throw std::runtime_error("stokes basis cache: implausible sizes");
  Eigen::MatrixXd modes(static_cast<Eigen::Index>(ndof), static_cast<Eigen::Index>(m));
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(m));
  is.read(reinterpret_cast<char*>(modes.data()), static_cast<std::streamsize>(sizeof(double) * modes.size()));
  is.read(reinterpret_cast<char*>(lambda.data()), static_cast<std::streamsize>(sizeof(double) * lambda.size()));
  if (!is) throw std::runtime_error("stokes basis cache: truncated file");
  return StokesBasis(hash, std::move(modes), std::move(lambda), w);
}

StokesBasis load_or_build_stokes_basis(const Grid& grid, int m_max, const std::filesystem::path& cache) {
  if (!cache.empty() && std::filesystem::exists(cache)) {
    try {
      StokesBasis b = load_stokes_basis(cache);
      if (b.grid_hash() == grid.hash() && b.size() >= m_max) return b;
    } catch (const std::runtime_error&) {
      // stale or corrupt cache: rebuild below
    }
  }
  StokesBasis b = build_stokes_basis(grid, m_max);
  if (!cache.empty()) save_stokes_basis(b, cache);
  return b;
}

}  // namespace cns
