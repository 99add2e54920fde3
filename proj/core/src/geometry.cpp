#include "cns/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "cns/errors.hpp"

namespace cns {

namespace {

std::vector<std::uint8_t> make_mask(const DomainSpec& spec, int nx, int ny) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny, 1);
  switch (spec.shape) {
    case DomainShape::rectangle:
      break;
    case DomainShape::l_shape: {
      if (spec.dim == 1) throw GeometryError("l_shape requires a two-dimensional grid");
      // Remove the top-right quadrant; the cut sits at the box midlines.
      const int i0 = nx - nx / 2;
      const int j0 = ny - ny / 2;
      for (int j = j0; j < ny; ++j)
        for (int i = i0; i < nx; ++i) mask[j * nx + i] = 0;
      break;
    }
    case DomainShape::mask:
      if (spec.mask.size() != mask.size())
        throw GeometryError("explicit mask has " + std::to_string(spec.mask.size()) + " entries, expected " +
                            std::to_string(mask.size()));
      for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = spec.mask[k] != 0;
      break;
  }
  return mask;
}

bool connected(const std::vector<std::uint8_t>& mask, int nx, int ny) {
  const auto first = std::find(mask.begin(), mask.end(), 1);
  if (first == mask.end()) return false;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::deque<int> queue{static_cast<int>(first - mask.begin())};
  seen[queue.front()] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    ++reached;
    const int i = k % nx;
    const int j = k / nx;
    const int di[] = {-1, 1, 0, 0};
    const int dj[] = {0, 0, -1, 1};
    for (int s = 0; s < 4; ++s) {
      const int a = i + di[s];
      const int b = j + dj[s];
      if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
      const int q = b * nx + a;
      if (mask[q] && !seen[q]) {
        seen[q] = 1;
        queue.push_back(q);
      }
    }
  }
  return reached == static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

Grid Grid::build(const DomainSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) throw GeometryError("dim must be 1 or 2");
  if (spec.nx < 2) throw GeometryError("nx must be at least 2");
  if (spec.dim == 2 && spec.ny < 2) throw GeometryError("ny must be at least 2");
  if (!(spec.lx > 0.0) || (spec.dim == 2 && !(spec.ly > 0.0)))
    throw GeometryError("domain lengths must be positive");

  Grid g;
  g.dim_ = spec.dim;
  g.nx_ = spec.nx;
  g.ny_ = spec.dim == 1 ? 1 : spec.ny;
  g.dx_ = spec.lx / spec.nx;
  g.dy_ = spec.dim == 1 ? 1.0 : spec.ly / spec.ny;

  const auto mask = make_mask(spec, g.nx_, g.ny_);
  if (std::count(mask.begin(), mask.end(), 1) == 0) throw GeometryError("mask has no interior cells");
  if (!connected(mask, g.nx_, g.ny_)) throw GeometryError("mask is not connected");

  g.compact_.assign(mask.size(), -1);
  for (int j = 0; j < g.ny_; ++j) {
    for (int i = 0; i < g.nx_; ++i) {
      if (!mask[j * g.nx_ + i]) continue;
      g.compact_[j * g.nx_ + i] = static_cast<int>(g.cell_i_.size());
      g.cell_i_.push_back(i);
      g.cell_j_.push_back(j);
    }
  }

  g.cell_boundary_.assign(4 * g.cell_i_.size(), -1);
  for (int c = 0; c < g.num_cells(); ++c) {
    const int i = g.cell_i_[c];
    const int j = g.cell_j_[c];
    for (Side side : all_sides) {
      const bool y_side = side == Side::south || side == Side::north;
      if (y_side && g.dim_ == 1) continue;
      if (g.neighbor(c, side) >= 0) continue;
      BoundaryFace f;
      f.cell = c;
      f.side = side;
      switch (side) {
        case Side::west:
          f.normal_x = -1.0;
          f.mid_x = i * g.dx_;
          f.mid_y = g.y_center(j);
          f.face_index = g.x_face(i, j);
          break;
        case Side::east:
          f.normal_x = 1.0;
          f.mid_x = (i + 1) * g.dx_;
          f.mid_y = g.y_center(j);
          f.face_index = g.x_face(i + 1, j);
          break;
        case Side::south:
          f.normal_y = -1.0;
          f.mid_x = g.x_center(i);
          f.mid_y = j * g.dy_;
          f.face_index = g.y_face(i, j);
          break;
        case Side::north:
          f.normal_y = 1.0;
          f.mid_x = g.x_center(i);
          f.mid_y = (j + 1) * g.dy_;
          f.face_index = g.y_face(i, j + 1);
          break;
      }
      f.axis = y_side ? 1 : 0;
      f.area = y_side ? g.dx_ : g.dy_;
      g.cell_boundary_[4 * c + static_cast<int>(side)] = static_cast<int>(g.boundary_.size());
      g.boundary_.push_back(f);
    }
  }
  return g;
}

int Grid::neighbor(int c, Side side) const {
  const int i = cell_i_[c];
  const int j = cell_j_[c];
  switch (side) {
    case Side::west: return index(i - 1, j);
    case Side::east: return index(i + 1, j);
    case Side::south: return dim_ == 1 ? -1 : index(i, j - 1);
    case Side::north: return dim_ == 1 ? -1 : index(i, j + 1);
  }
  return -1;
}

bool Grid::is_boundary_cell(int c) const {
  for (int s = 0; s < 4; ++s)
    if (cell_boundary_[4 * c + s] >= 0) return true;
  return false;
}

double Grid::perimeter() const {
  double p = 0.0;
  for (const auto& f : boundary_) p += f.area;
  return p;
}

std::uint64_t Grid::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, static_cast<std::uint64_t>(dim_));
  h = fnv1a(h, static_cast<std::uint64_t>(nx_));
  h = fnv1a(h, static_cast<std::uint64_t>(ny_));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(dx_));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(dy_));
  for (int k : compact_) h = fnv1a(h, k >= 0 ? 1u : 0u);
  return h;
}

double BoundaryData::gamma_max() const {
  return gamma.empty() ? 0.0 : *std::max_element(gamma.begin(), gamma.end());
}

BoundaryData make_boundary_data(const Grid& grid, const FaceFunction& kappa, const FaceFunction& gamma) {
  std::vector<double> k;
  std::vector<double> g;
  k.reserve(grid.boundary_faces().size());
  g.reserve(grid.boundary_faces().size());
  for (const auto& f : grid.boundary_faces()) {
    k.push_back(kappa(f));
    g.push_back(gamma(f));
  }
  return make_boundary_data(grid, std::move(k), std::move(g));
}

BoundaryData make_boundary_data(const Grid& grid, std::vector<double> kappa, std::vector<double> gamma) {
  const auto nf = grid.boundary_faces().size();
  if (kappa.size() != nf || gamma.size() != nf)
    throw std::invalid_argument("boundary data size does not match the number of boundary faces");
  for (std::size_t f = 0; f < nf; ++f) {
    if (!(kappa[f] >= 0.0) || !std::isfinite(kappa[f])) throw std::invalid_argument("kappa must be finite and >= 0");
    if (!(gamma[f] > 0.0) || !std::isfinite(gamma[f])) throw std::invalid_argument("gamma must be finite and > 0");
  }

  BoundaryData bd;
  bd.kappa = std::move(kappa);
  bd.gamma = std::move(gamma);
  bd.gamma_lower = *std::min_element(bd.gamma.begin(), bd.gamma.end());

  // Dirichlet values on boundary cells: mean of γ over the cell's Γ-faces.
  const int n = grid.num_cells();
  ScalarField fixed = ScalarField::Zero(n);
  std::vector<int> unknown(n, -1);
  int nu = 0;
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    int cnt = 0;
    for (int s = 0; s < 4; ++s) {
      const int f = grid.boundary_face_of(c, static_cast<Side>(s));
      if (f >= 0) {
        sum += bd.gamma[f];
        ++cnt;
      }
    }
    if (cnt > 0)
      fixed[c] = sum / cnt;
    else
      unknown[c] = nu++;
  }

  bd.gamma_ext = fixed;
  if (nu > 0) {
    // Harmonic extension: -Δγ̂ = 0 on cells away from Γ.
    const double ax = 1.0 / (grid.dx() * grid.dx());
    const double ay = grid.dim() == 1 ? 0.0 : 1.0 / (grid.dy() * grid.dy());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu);
    for (int c = 0; c < n; ++c) {
      const int r = unknown[c];
      if (r < 0) continue;
      double diag = 0.0;
      for (Side s : all_sides) {
        const bool ys = s == Side::south || s == Side::north;
        if (ys && grid.dim() == 1) continue;
        const double a = ys ? ay : ax;
        const int nb = grid.neighbor(c, s);
        diag += a;
        if (unknown[nb] >= 0)
          trip.emplace_back(r, unknown[nb], -a);
        else
          rhs[r] += a * fixed[nb];
      }
      trip.emplace_back(r, r, diag);
    }
    Eigen::SparseMatrix<double> m(nu, nu);
    m.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(m);
    if (solver.info() != Eigen::Success) throw SolverError("harmonic extension factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);
    for (int c = 0; c < n; ++c)
      if (unknown[c] >= 0) bd.gamma_ext[c] = std::max(x[unknown[c]], bd.gamma_lower);
  }
  return bd;
}

double integrate_volume(const Grid& grid, const ScalarField& f) {
  if (f.size() != grid.num_cells()) throw std::invalid_argument("integrate_volume: field/grid size mismatch");
  return f.sum() * grid.cell_volume();
}

double integrate_boundary(const Grid& grid, std::span<const double> g) {
  const auto& faces = grid.boundary_faces();
  if (g.size() != faces.size()) throw std::invalid_argument("integrate_boundary: field/face count mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < faces.size(); ++k) s += g[k] * faces[k].area;
  return s;
}

}  // namespace cns
