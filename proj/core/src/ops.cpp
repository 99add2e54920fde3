#include "cns/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cns {

namespace {

bool y_side(Side s) { return s == Side::south || s == Side::north; }

// Face value of a FaceField shared by cell c and its neighbour across `side`.
double face_value(const Grid& g, const FaceField& f, int c, Side side) {
  const int i = g.cell_i(c);
  const int j = g.cell_j(c);
  switch (side) {
    case Side::west: return f.x[g.x_face(i, j)];
    case Side::east: return f.x[g.x_face(i + 1, j)];
    case Side::south: return f.y[g.y_face(i, j)];
    case Side::north: return f.y[g.y_face(i, j + 1)];
  }
  return 0.0;
}

// Outward sign of the face-normal component for `side`.
double outward(Side side) { return (side == Side::west || side == Side::south) ? -1.0 : 1.0; }

void check_size(const Grid& g, const ScalarField& f, const char* what) {
  if (f.size() != g.num_cells()) throw std::invalid_argument(std::string(what) + ": field/grid size mismatch");
}

void check_faces(const Grid& g, const FaceField& f, const char* what) {
  if (f.x.size() != g.num_x_faces() || f.y.size() != g.num_y_faces())
    throw std::invalid_argument(std::string(what) + ": face field/grid size mismatch");
}

}  // namespace

FaceField FaceField::zeros(const Grid& grid) {
  return {Eigen::VectorXd::Zero(grid.num_x_faces()), Eigen::VectorXd::Zero(grid.num_y_faces())};
}

bool is_interior_x_face(const Grid& grid, int i, int j) { return grid.inside(i - 1, j) && grid.inside(i, j); }

bool is_interior_y_face(const Grid& grid, int i, int j) {
  return grid.dim() == 2 && grid.inside(i, j - 1) && grid.inside(i, j);
}

FaceDofMap::FaceDofMap(const Grid& grid)
    : nxf_(grid.num_x_faces()), nyf_(grid.num_y_faces()), x_dof_(nxf_, -1), y_dof_(nyf_, -1) {
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i <= grid.nx(); ++i)
      if (is_interior_x_face(grid, i, j)) x_dof_[grid.x_face(i, j)] = ndof_++;
  if (grid.dim() == 2)
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i)
        if (is_interior_y_face(grid, i, j)) y_dof_[grid.y_face(i, j)] = ndof_++;
}

Eigen::VectorXd FaceDofMap::gather(const FaceField& f) const {
  Eigen::VectorXd v(ndof_);
  for (int k = 0; k < nxf_; ++k)
    if (x_dof_[k] >= 0) v[x_dof_[k]] = f.x[k];
  for (int k = 0; k < nyf_; ++k)
    if (y_dof_[k] >= 0) v[y_dof_[k]] = f.y[k];
  return v;
}

FaceField FaceDofMap::scatter(const Eigen::VectorXd& v) const {
  FaceField f{Eigen::VectorXd::Zero(nxf_), Eigen::VectorXd::Zero(nyf_)};
  for (int k = 0; k < nxf_; ++k)
    if (x_dof_[k] >= 0) f.x[k] = v[x_dof_[k]];
  for (int k = 0; k < nyf_; ++k)
    if (y_dof_[k] >= 0) f.y[k] = v[y_dof_[k]];
  return f;
}

double diagnostics_floor(const ScalarField& c0) {
  const double m = c0.size() > 0 ? c0.cwiseAbs().maxCoeff() : 0.0;
  return 1e-12 * std::max(1.0, m);
}

double robin_beta(double kappa, double h) { return kappa / (1.0 + 0.5 * kappa * h); }

std::vector<double> robin_face_flux(const Grid& grid, const BoundaryData& bdata, const ScalarField& c) {
  check_size(grid, c, "robin_face_flux");
  const auto& faces = grid.boundary_faces();
  std::vector<double> flux(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const double h = faces[k].axis == 0 ? grid.dx() : grid.dy();
    flux[k] = robin_beta(bdata.kappa[k], h) * (bdata.gamma[k] - c[faces[k].cell]);
  }
  return flux;
}

FaceField gradient(const Grid& grid, const ScalarField& f) {
  check_size(grid, f, "gradient");
  FaceField g = FaceField::zeros(grid);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 1; i < grid.nx(); ++i) {
      const int l = grid.index(i - 1, j);
      const int r = grid.index(i, j);
      if (l >= 0 && r >= 0) g.x[grid.x_face(i, j)] = (f[r] - f[l]) / grid.dx();
    }
  if (grid.dim() == 2)
    for (int j = 1; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const int s = grid.index(i, j - 1);
        const int n = grid.index(i, j);
        if (s >= 0 && n >= 0) g.y[grid.y_face(i, j)] = (f[n] - f[s]) / grid.dy();
      }
  return g;
}

FaceField gradient_robin(const Grid& grid, const BoundaryData& bdata, const ScalarField& c) {
  FaceField g = gradient(grid, c);
  const auto flux = robin_face_flux(grid, bdata, c);
  const auto& faces = grid.boundary_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) {
    // Axis component = ∂_ν c times the sign of the outward normal.
    const double v = flux[k] * outward(faces[k].side);
    (faces[k].axis == 0 ? g.x : g.y)[faces[k].face_index] = v;
  }
  return g;
}

FaceField gradient_total_flux(const Grid& grid, const ScalarField& n, const FaceField& grad_c) {
  check_faces(grid, grad_c, "gradient_total_flux");
  FaceField g = gradient(grid, n);
  for (const auto& f : grid.boundary_faces()) {
    auto& arr = f.axis == 0 ? g.x : g.y;
    const auto& gc = f.axis == 0 ? grad_c.x : grad_c.y;
    arr[f.face_index] = n[f.cell] * gc[f.face_index];
  }
  return g;
}

CellVector cell_gradient(const Grid& grid, const ScalarField& f) {
  check_size(grid, f, "cell_gradient");
  const int n = grid.num_cells();
  CellVector g{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  auto one_axis = [&](int c, Side lo, Side hi, double h) {
    const int a = grid.neighbor(c, lo);
    const int b = grid.neighbor(c, hi);
    if (a >= 0 && b >= 0) return (f[b] - f[a]) / (2.0 * h);
    // Three-point one-sided at mask edges, two-point if the run is short.
    if (b >= 0) {
      const int bb = grid.neighbor(b, hi);
      return bb >= 0 ? (-3.0 * f[c] + 4.0 * f[b] - f[bb]) / (2.0 * h) : (f[b] - f[c]) / h;
    }
    if (a >= 0) {
      const int aa = grid.neighbor(a, lo);
      return aa >= 0 ? (3.0 * f[c] - 4.0 * f[a] + f[aa]) / (2.0 * h) : (f[c] - f[a]) / h;
    }
    return 0.0;
  };
  for (int c = 0; c < n; ++c) {
    g.x[c] = one_axis(c, Side::west, Side::east, grid.dx());
    if (grid.dim() == 2) g.y[c] = one_axis(c, Side::south, Side::north, grid.dy());
  }
  return g;
}

SparseOperator assemble_neumann_laplacian(const Grid& grid) {
  const int n = grid.num_cells();
  const double ax = 1.0 / (grid.dx() * grid.dx());
  const double ay = grid.dim() == 1 ? 0.0 : 1.0 / (grid.dy() * grid.dy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    double diag = 0.0;
    for (Side s : all_sides) {
      const int nb = grid.neighbor(c, s);
      if (nb < 0) continue;
      const double a = y_side(s) ? ay : ax;
      trip.emplace_back(c, nb, a);
      diag -= a;
    }
    trip.emplace_back(c, c, diag);
  }
  SparseOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.source = Eigen::VectorXd::Zero(n);
  return op;
}

SparseOperator assemble_robin_laplacian(const Grid& grid, const BoundaryData& bdata) {
  const auto& faces = grid.boundary_faces();
  if (bdata.kappa.size() != faces.size() || bdata.gamma.size() != faces.size())
    throw std::invalid_argument("assemble_robin_laplacian: boundary data size mismatch");
  for (double k : bdata.kappa)
    if (k < 0.0) throw std::invalid_argument("assemble_robin_laplacian: negative kappa");

  SparseOperator op = assemble_neumann_laplacian(grid);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const double h = f.axis == 0 ? grid.dx() : grid.dy();
    const double beta = robin_beta(bdata.kappa[k], h);
    const double w = f.area / grid.cell_volume();
    op.matrix.coeffRef(f.cell, f.cell) -= beta * w;
    op.source[f.cell] += beta * bdata.gamma[k] * w;
  }
  op.matrix.makeCompressed();
  return op;
}

ScalarField divergence(const Grid& grid, const FaceField& flux) {
  check_faces(grid, flux, "divergence");
  const int n = grid.num_cells();
  ScalarField d(n);
  for (int c = 0; c < n; ++c) {
    const int i = grid.cell_i(c);
    const int j = grid.cell_j(c);
    double v = (flux.x[grid.x_face(i + 1, j)] - flux.x[grid.x_face(i, j)]) / grid.dx();
    if (grid.dim() == 2) v += (flux.y[grid.y_face(i, j + 1)] - flux.y[grid.y_face(i, j)]) / grid.dy();
    d[c] = v;
  }
  return d;
}

ScalarField upwind_flux_divergence(const Grid& grid, const ScalarField& f, const FaceField& w) {
  check_size(grid, f, "upwind_flux_divergence");
  check_faces(grid, w, "upwind_flux_divergence");
  ScalarField t = ScalarField::Zero(grid.num_cells());
  const double vx = 1.0 / grid.dx();
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 1; i < grid.nx(); ++i) {
      const int l = grid.index(i - 1, j);
      const int r = grid.index(i, j);
      if (l < 0 || r < 0) continue;
      const double vel = w.x[grid.x_face(i, j)];
      const double flux = vel * (vel > 0.0 ? f[l] : f[r]) * vx;
      t[l] -= flux;
      t[r] += flux;
    }
  if (grid.dim() == 2) {
    const double vy = 1.0 / grid.dy();
    for (int j = 1; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const int s = grid.index(i, j - 1);
        const int n = grid.index(i, j);
        if (s < 0 || n < 0) continue;
        const double vel = w.y[grid.y_face(i, j)];
        const double flux = vel * (vel > 0.0 ? f[s] : f[n]) * vy;
        t[s] -= flux;
        t[n] += flux;
      }
  }
  return t;
}

ScalarField advect_upwind(const Grid& grid, const ScalarField& f, const VectorField& v) {
  check_faces(grid, v, "advect_upwind");
  const double scale = std::max({1.0, v.x.size() ? v.x.cwiseAbs().maxCoeff() : 0.0,
                                 v.y.size() ? v.y.cwiseAbs().maxCoeff() : 0.0});
  if (max_wall_velocity(grid, v) > 1e-12 * scale)
    throw std::invalid_argument("advect_upwind: velocity is nonzero on the boundary");
  return upwind_flux_divergence(grid, f, v);
}

ScalarField outflow_rate(const Grid& grid, const FaceField& w) {
  check_faces(grid, w, "outflow_rate");
  const int n = grid.num_cells();
  ScalarField rate = ScalarField::Zero(n);
  for (int c = 0; c < n; ++c) {
    double r = 0.0;
    for (Side s : all_sides) {
      if (y_side(s) && grid.dim() == 1) continue;
      if (grid.neighbor(c, s) < 0) continue;
      const double vn = outward(s) * face_value(grid, w, c, s);
      if (vn > 0.0) r += vn / (y_side(s) ? grid.dy() : grid.dx());
    }
    rate[c] = r;
  }
  return rate;
}

ScalarField upwind_explicit_update(const Grid& grid, const ScalarField& f, std::initializer_list<const FaceField*> velocities,
                                   double dt) {
  check_size(grid, f, "upwind_explicit_update");
  const int n = grid.num_cells();
  ScalarField keep = ScalarField::Ones(n);
  ScalarField inflow = ScalarField::Zero(n);
  for (const FaceField* w : velocities) {
    check_faces(grid, *w, "upwind_explicit_update");
    for (int c = 0; c < n; ++c) {
      for (Side s : all_sides) {
        if (y_side(s) && grid.dim() == 1) continue;
        const int nb = grid.neighbor(c, s);
        if (nb < 0) continue;
        const double vn = outward(s) * face_value(grid, *w, c, s);
        const double inv_h = 1.0 / (y_side(s) ? grid.dy() : grid.dx());
        if (vn > 0.0)
          keep[c] -= dt * vn * inv_h;
        else if (vn < 0.0)
          inflow[c] += dt * (-vn) * inv_h * f[nb];
      }
    }
  }
  ScalarField out(n);
  for (int c = 0; c < n; ++c) out[c] = keep[c] * f[c] + inflow[c];
  return out;
}

std::vector<SymTensor2> hessian_log(const Grid& grid, const ScalarField& c, double floor) {
  check_size(grid, c, "hessian_log");
  if (!(floor > 0.0)) throw std::invalid_argument("hessian_log: floor must be positive");
  const int n = grid.num_cells();
  ScalarField lg(n);
  for (int k = 0; k < n; ++k) lg[k] = std::log(std::max(c[k], floor));

  auto second = [&](int k, Side lo, Side hi, double h) {
    const int a = grid.neighbor(k, lo);
    const int b = grid.neighbor(k, hi);
    if (a >= 0 && b >= 0) return (lg[a] - 2.0 * lg[k] + lg[b]) / (h * h);
    // One-sided four-point stencil at mask edges, shifted three-point if the
    // run is short.
    auto one_sided = [&](int b, Side dir) {
      const int bb = grid.neighbor(b, dir);
      if (bb < 0) return 0.0;
      const int bbb = grid.neighbor(bb, dir);
      if (bbb < 0) return (lg[k] - 2.0 * lg[b] + lg[bb]) / (h * h);
      return (2.0 * lg[k] - 5.0 * lg[b] + 4.0 * lg[bb] - lg[bbb]) / (h * h);
    };
    if (b >= 0) return one_sided(b, hi);
    if (a >= 0) return one_sided(a, lo);
    return 0.0;
  };

  std::vector<SymTensor2> hess(n);
  if (grid.dim() == 1) {
    for (int k = 0; k < n; ++k) hess[k].xx = second(k, Side::west, Side::east, grid.dx());
    return hess;
  }
  const CellVector g = cell_gradient(grid, lg);
  const CellVector gxy = cell_gradient(grid, g.x);  // ∂y(∂x log c) in .y
  const CellVector gyx = cell_gradient(grid, g.y);  // ∂x(∂y log c) in .x
  for (int k = 0; k < n; ++k) {
    hess[k].xx = second(k, Side::west, Side::east, grid.dx());
    hess[k].yy = second(k, Side::south, Side::north, grid.dy());
    hess[k].xy = 0.5 * (gxy.y[k] + gyx.x[k]);
  }
  return hess;
}

std::vector<double> tangential_gradient_boundary(const Grid& grid, const ScalarField& f) {
  check_size(grid, f, "tangential_gradient_boundary");
  const auto& faces = grid.boundary_faces();
  std::vector<double> out(faces.size(), 0.0);
  if (grid.dim() == 1) return out;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& face = faces[k];
    // Tangent runs along +y for x-faces and +x for y-faces.
    const Side lo = face.axis == 0 ? Side::south : Side::west;
    const Side hi = face.axis == 0 ? Side::north : Side::east;
    const double h = face.axis == 0 ? grid.dy() : grid.dx();
    // A neighbour continues the segment if it is interior and has a Γ-face on
    // the same side.
    auto along = [&](Side dir) {
      const int nb = grid.neighbor(face.cell, dir);
      return (nb >= 0 && grid.boundary_face_of(nb, face.side) >= 0) ? nb : -1;
    };
    const int a = along(lo);
    const int b = along(hi);
    if (a >= 0 && b >= 0)
      out[k] = (f[b] - f[a]) / (2.0 * h);
    else if (b >= 0)
      out[k] = (f[b] - f[face.cell]) / h;
    else if (a >= 0)
      out[k] = (f[face.cell] - f[a]) / h;
  }
  return out;
}

double lp_norm(const Grid& grid, const ScalarField& f, double p) {
  check_size(grid, f, "lp_norm");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  double s = 0.0;
  for (double v : f) s += std::pow(std::abs(v), p);
  return std::pow(s * grid.cell_volume(), 1.0 / p);
}

double velocity_l2_squared(const Grid& grid, const VectorField& u) {
  check_faces(grid, u, "velocity_l2_squared");
  double s = 0.0;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i <= grid.nx(); ++i)
      if (is_interior_x_face(grid, i, j)) s += u.x[grid.x_face(i, j)] * u.x[grid.x_face(i, j)];
  if (grid.dim() == 2)
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i)
        if (is_interior_y_face(grid, i, j)) s += u.y[grid.y_face(i, j)] * u.y[grid.y_face(i, j)];
  return s * grid.cell_volume();
}

namespace {

// Classification of a neighbouring face of a velocity unknown, along the
// direction normal to the neighbour offset:
//   unknown  -> coupling
//   wall     -> the face lies on Γ (one interior cell): u = 0 at distance h
//   ghost    -> no interior cell: wall half a cell away, mirror value −u
enum class NbKind { unknown, wall, ghost };

NbKind x_face_kind(const Grid& g, int i, int j) {
  if (i < 0 || i > g.nx() || j < 0 || j >= g.ny()) return NbKind::ghost;
  const bool l = g.inside(i - 1, j);
  const bool r = g.inside(i, j);
  if (l && r) return NbKind::unknown;
  return (l || r) ? NbKind::wall : NbKind::ghost;
}

NbKind y_face_kind(const Grid& g, int i, int j) {
  if (i < 0 || i >= g.nx() || j < 0 || j > g.ny()) return NbKind::ghost;
  const bool s = g.inside(i, j - 1);
  const bool n = g.inside(i, j);
  if (s && n) return NbKind::unknown;
  return (s || n) ? NbKind::wall : NbKind::ghost;
}

}  // namespace

double velocity_gradient_l2_squared(const Grid& grid, const VectorField& u) {
  check_faces(grid, u, "velocity_gradient_l2_squared");
  const double ix2 = 1.0 / (grid.dx() * grid.dx());
  const double iy2 = 1.0 / (grid.dy() * grid.dy());
  double s = 0.0;
  // Each unknown looks at its four neighbours; unknown-unknown pairs are
  // counted once (from the lower-index side).
  auto accumulate = [&](double v, NbKind kind, double nb_value, bool count_pair, double w) {
    switch (kind) {
      case NbKind::unknown:
        if (count_pair) s += (v - nb_value) * (v - nb_value) * w;
        break;
      case NbKind::wall: s += v * v * w; break;
      case NbKind::ghost: s += 2.0 * v * v * w; break;
    }
  };
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i <= grid.nx(); ++i) {
      if (!is_interior_x_face(grid, i, j)) continue;
      const double v = u.x[grid.x_face(i, j)];
      // x-direction neighbours are x-faces (i±1, j): normal direction.
      for (int di : {-1, 1}) {
        const NbKind kind = x_face_kind(grid, i + di, j);
        const double nb = kind == NbKind::unknown ? u.x[grid.x_face(i + di, j)] : 0.0;
        // Normal-direction neighbours are never ghosts of the mirror type.
        accumulate(v, kind == NbKind::ghost ? NbKind::wall : kind, nb, di > 0, ix2);
      }
      if (grid.dim() == 2)
        for (int dj : {-1, 1}) {
          const NbKind kind = x_face_kind(grid, i, j + dj);
          const double nb = kind == NbKind::unknown ? u.x[grid.x_face(i, j + dj)] : 0.0;
          accumulate(v, kind, nb, dj > 0, iy2);
        }
    }
  if (grid.dim() == 2)
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        if (!is_interior_y_face(grid, i, j)) continue;
        const double v = u.y[grid.y_face(i, j)];
        for (int dj : {-1, 1}) {
          const NbKind kind = y_face_kind(grid, i, j + dj);
          const double nb = kind == NbKind::unknown ? u.y[grid.y_face(i, j + dj)] : 0.0;
          accumulate(v, kind == NbKind::ghost ? NbKind::wall : kind, nb, dj > 0, iy2);
        }
        for (int di : {-1, 1}) {
          const NbKind kind = y_face_kind(grid, i + di, j);
          const double nb = kind == NbKind::unknown ? u.y[grid.y_face(i + di, j)] : 0.0;
          accumulate(v, kind, nb, di > 0, ix2);
        }
      }
  return s * grid.cell_volume();
}

double max_divergence(const Grid& grid, const VectorField& u) {
  const ScalarField d = divergence(grid, u);
  return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
}

double max_wall_velocity(const Grid& grid, const VectorField& u) {
  check_faces(grid, u, "max_wall_velocity");
  double m = 0.0;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i <= grid.nx(); ++i)
      if (!is_interior_x_face(grid, i, j)) m = std::max(m, std::abs(u.x[grid.x_face(i, j)]));
  if (grid.dim() == 2)
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i)
        if (!is_interior_y_face(grid, i, j)) m = std::max(m, std::abs(u.y[grid.y_face(i, j)]));
  return m;
}

}  // namespace cns
