#include "cns/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cns {

double s_fn(double y) {
  if (y < 0.0) throw std::invalid_argument("s_fn: negative argument");
  return y == 0.0 ? 1.0 : y * std::log(y) - y + 1.0;
}

double s_inf_fn(double y, double z) {
  if (y < 0.0) throw std::invalid_argument("s_inf_fn: negative argument");
  if (!(z > 0.0)) throw std::invalid_argument("s_inf_fn: reference value must be positive");
  return y == 0.0 ? z : y * std::log(y / z) - y + z;
}

namespace {

void check_size(const Grid& g, const ScalarField& f, const char* what) {
  if (f.size() != g.num_cells()) throw std::invalid_argument(std::string(what) + ": field/grid size mismatch");
}

ScalarField floored(const ScalarField& c, double floor) { return c.cwiseMax(floor); }

// ∫|∇f|² with cell-centred gradients.
double cell_dirichlet(const Grid& g, const ScalarField& f) {
  const CellVector d = cell_gradient(g, f);
  return integrate_volume(g, d.x.cwiseAbs2() + d.y.cwiseAbs2());
}

double n_log_n(const Grid& g, const ScalarField& n) {
  ScalarField v(n.size());
  for (Eigen::Index i = 0; i < n.size(); ++i) v[i] = n[i] > 0.0 ? n[i] * std::log(n[i]) : 0.0;
  return integrate_volume(g, v);
}

double max_abs(const ScalarField& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double energy_S(const Grid& grid, const ScalarField& n, const ScalarField& c, const VectorField& u, double a, double b,
                double floor) {
  check_size(grid, n, "energy_S");
  check_size(grid, c, "energy_S");
  return n_log_n(grid, n) + a * cell_dirichlet(grid, floored(c, floor).cwiseSqrt()) + b * velocity_l2_squared(grid, u);
}

double energy_boundary(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, double floor) {
  check_size(grid, c, "energy_boundary");
  const auto& faces = grid.boundary_faces();
  std::vector<double> g(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f)
    g[f] = bdata.kappa[f] == 0.0 ? 0.0 : bdata.kappa[f] * s_inf_fn(bdata.gamma[f], std::max(c[faces[f].cell], floor));
  return integrate_boundary(grid, g);
}

double energy_add(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, double floor) {
  check_size(grid, c, "energy_add");
  ScalarField v(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) v[i] = s_inf_fn(std::max(c[i], 0.0), std::max(bdata.gamma_ext[i], floor));
  return integrate_volume(grid, v);
}

double total_F(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, const ScalarField& c,
               const VectorField& u, const EnergyConstants& k, double floor) {
  return energy_S(grid, n, c, u, 2.0, k.K, floor) + energy_boundary(grid, bdata, c, floor);
}

double total_X(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, const ScalarField& c,
               const VectorField& u, const EnergyConstants& k, double floor) {
  return total_F(grid, bdata, n, c, u, k, floor) + k.L * energy_add(grid, bdata, c, floor);
}

double dissipation_E(const Grid& grid, const ScalarField& n, const ScalarField& c, const VectorField& u, double floor) {
  check_size(grid, n, "dissipation_E");
  check_size(grid, c, "dissipation_E");
  const ScalarField cf = floored(c, floor);
  const CellVector gn = cell_gradient(grid, n.cwiseMax(0.0).cwiseSqrt());
  const CellVector gs = cell_gradient(grid, cf.cwiseSqrt());
  const CellVector gc = cell_gradient(grid, c);
  const std::vector<SymTensor2> h = hessian_log(grid, c, floor);
  ScalarField v(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double gc2 = gc.x[i] * gc.x[i] + gc.y[i] * gc.y[i];
    const double gs2 = gs.x[i] * gs.x[i] + gs.y[i] * gs.y[i];
    v[i] = gn.x[i] * gn.x[i] + gn.y[i] * gn.y[i] + cf[i] * h[i].frobenius2() + gc2 * gc2 / (cf[i] * cf[i] * cf[i]) +
           std::max(n[i], 0.0) * gs2;
  }
  return integrate_volume(grid, v) + velocity_l2_squared(grid, u) + velocity_gradient_l2_squared(grid, u);
}

double grad_c_l4(const Grid& grid, const ScalarField& c) {
  check_size(grid, c, "grad_c_l4");
  const CellVector gc = cell_gradient(grid, c);
  return integrate_volume(grid, (gc.x.cwiseAbs2() + gc.y.cwiseAbs2()).cwiseAbs2());
}

EnergyReport compute_report(const Grid& grid, const BoundaryData& bdata, const ScalarField& n, const ScalarField& c,
                            const VectorField& u, double t, const EnergyConstants& k, double floor) {
  EnergyReport r;
  r.t = t;
  r.mass_n = integrate_volume(grid, n);
  r.c_max = c.maxCoeff();
  r.S = energy_S(grid, n, c, u, k.a, k.b, floor);
  r.S_boundary = energy_boundary(grid, bdata, c, floor);
  r.S_add = energy_add(grid, bdata, c, floor);
  r.F = total_F(grid, bdata, n, c, u, k, floor);
  r.X = r.F + k.L * r.S_add;
  r.E = dissipation_E(grid, n, c, u, floor);
  r.lp_n_2 = lp_norm(grid, n, 2.0);
  r.lp_n_3 = lp_norm(grid, n, 3.0);
  r.grad_c_l4 = grad_c_l4(grid, c);
  r.u_l2 = std::sqrt(velocity_l2_squared(grid, u));
  r.grad_u_l2 = std::sqrt(velocity_gradient_l2_squared(grid, u));
  return r;
}

double choose_fluid_weight(const ScalarField& c0, const BoundaryData& bdata, double decay_rate) {
  if (!(decay_rate > 0.0)) return 1.0;
  return std::max(1.0, 32.0 * max_abs(c0) * std::max(1.0, bdata.gamma_max()) / decay_rate);
}

BernsteinReport check_bernstein(const Grid& grid, const BoundaryData& bdata, const ScalarField& c, double floor,
                                double rel_tol, double abs_tol) {
  check_size(grid, c, "check_bernstein");
  const ScalarField cf = floored(c, floor);
  const CellVector gc = cell_gradient(grid, cf);
  const std::vector<SymTensor2> h = hessian_log(grid, cf, floor);

  BernsteinReport r;
  ScalarField quartic(c.size()), hess(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double g2 = gc.x[i] * gc.x[i] + gc.y[i] * gc.y[i];
    quartic[i] = g2 * g2 / (cf[i] * cf[i] * cf[i]);
    hess[i] = cf[i] * h[i].frobenius2();
  }
  r.lhs = 0.25 * integrate_volume(grid, quartic);
  r.interior_term = (2.0 + grid.dim()) * integrate_volume(grid, hess);

  const auto& faces = grid.boundary_faces();
  const std::vector<double> dn = robin_face_flux(grid, bdata, cf);
  const std::vector<double> dt = tangential_gradient_boundary(grid, cf);
  std::vector<double> bterm(faces.size());
  double worst = 0.0, scale = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const BoundaryFace& bf = faces[f];
    const double c0 = cf[bf.cell];
    bterm[f] = (dn[f] * dn[f] + dt[f] * dt[f]) / (c0 * c0) * dn[f];

    // Robin residual from a two-cell extrapolation towards the face.
    const Side opposite = bf.side == Side::west    ? Side::east
                          : bf.side == Side::east  ? Side::west
                          : bf.side == Side::south ? Side::north
                                                   : Side::south;
    const int inner = grid.neighbor(bf.cell, opposite);
    scale = std::max(scale, std::abs(bdata.kappa[f] * bdata.gamma[f]));
    if (inner < 0) continue;
    const double h_n = bf.axis == 0 ? grid.dx() : grid.dy();
    const double c_face = 1.5 * c0 - 0.5 * cf[inner];
    const double d_est = (c0 - cf[inner]) / h_n;
    worst = std::max(worst, std::abs(d_est - bdata.kappa[f] * (bdata.gamma[f] - c_face)));
  }
  r.boundary_term = integrate_boundary(grid, bterm);
  r.robin_residual = scale > 0.0 ? worst / scale : worst;
  r.rhs = r.boundary_term + r.interior_term;
  r.margin = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs * (1.0 + rel_tol) + abs_tol;
  return r;
}

RobinField make_robin_compatible_field(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lx = grid.nx() * grid.dx();
  const double ly = grid.dim() == 1 ? 1.0 : grid.ny() * grid.dy();
  const int kmax = 2;
  const int lmax = grid.dim() == 1 ? 0 : 2;

  struct Term {
    double a, kx, ky, px, py;
  };
  std::vector<Term> terms;
  for (int k = 0; k <= kmax; ++k)
    for (int l = 0; l <= lmax; ++l) {
      if (k == 0 && l == 0) continue;
      terms.push_back({2.0 * unit(rng) - 1.0, k * M_PI / lx, l * M_PI / ly, 2.0 * M_PI * unit(rng),
                       2.0 * M_PI * unit(rng)});
    }
  auto g_raw = [&](double x, double y) {
    double v = 0.0;
    for (const Term& t : terms) v += t.a * std::cos(t.kx * x + t.px) * std::cos(t.ky * y + t.py);
    return v;
  };
  auto grad_raw = [&](double x, double y) {
    double gx = 0.0, gy = 0.0;
    for (const Term& t : terms) {
      gx -= t.a * t.kx * std::sin(t.kx * x + t.px) * std::cos(t.ky * y + t.py);
      gy -= t.a * t.ky * std::cos(t.kx * x + t.px) * std::sin(t.ky * y + t.py);
    }
    return std::pair{gx, gy};
  };

  // Smooth κ ∈ [1, 4] along Γ.
  const double wx = (1.0 + 2.0 * unit(rng)) * M_PI / lx;
  const double wy = (1.0 + 2.0 * unit(rng)) * M_PI / ly;
  const double ph = 2.0 * M_PI * unit(rng);
  auto kappa_at = [&](double x, double y) { return 2.5 + 1.5 * std::sin(wx * x + wy * y + ph); };

  const auto& faces = grid.boundary_faces();
  double kmin = std::numeric_limits<double>::infinity();
  for (const BoundaryFace& f : faces) kmin = std::min(kmin, kappa_at(f.mid_x, f.mid_y));

  // Bound |∇g| on a fine sampling of the box.
  double gmax = 0.0;
  const int samples = 4 * std::max(grid.nx(), grid.ny());
  for (int j = 0; j <= (grid.dim() == 1 ? 0 : samples); ++j)
    for (int i = 0; i <= samples; ++i) {
      const auto [gx, gy] = grad_raw(lx * i / samples, grid.dim() == 1 ? 0.5 : ly * j / samples);
      gmax = std::max(gmax, std::hypot(gx, gy));
    }
  const double amp = gmax > 0.0 ? (0.5 * kmin / gmax) * (0.2 + 0.8 * unit(rng)) : 0.0;
  const double level = 0.5 + 1.5 * unit(rng);

  RobinField out;
  out.c.resize(grid.num_cells());
  for (int cidx = 0; cidx < grid.num_cells(); ++cidx)
    out.c[cidx] = level * std::exp(amp * g_raw(grid.x_center(grid.cell_i(cidx)), grid.y_center(grid.cell_j(cidx))));

  std::vector<double> kappa(faces.size()), gamma(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const BoundaryFace& bf = faces[f];
    const double cface = level * std::exp(amp * g_raw(bf.mid_x, bf.mid_y));
    const auto [gx, gy] = grad_raw(bf.mid_x, bf.mid_y);
    const double dn = cface * amp * (gx * bf.normal_x + gy * bf.normal_y);
    kappa[f] = kappa_at(bf.mid_x, bf.mid_y);
    gamma[f] = cface + dn / kappa[f];
  }
  out.bdata = make_boundary_data(grid, std::move(kappa), std::move(gamma));
  return out;
}

namespace {

void check_series(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("time series: length mismatch");
  if (t.size() < 3) throw std::invalid_argument("time series: at least 3 samples required");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("time series: times must increase strictly");
}

// Central differences on (possibly nonuniform) samples, one-sided at the ends.
std::vector<double> time_derivative(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  std::vector<double> d(n);
  d[0] = (y[1] - y[0]) / (t[1] - t[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    d[i] = (h0 * h0 * (y[i + 1] - y[i]) + h1 * h1 * (y[i] - y[i - 1])) / (h0 * h1 * (h0 + h1));
  }
  return d;
}

constexpr double kRates[] = {0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0};

double envelope(double y0, double p, double q, double t) {
  return p == 0.0 ? y0 + q * t : (y0 + q / p) * std::exp(p * t) - q / p;
}

}  // namespace

EnergyFit check_energy_inequality(std::span<const double> t, std::span<const double> F, double rel_tol) {
  check_series(t, F);
  EnergyFit fit;
  fit.dFdt = time_derivative(t, F);
  const std::size_t n = t.size();
  auto tol = [&](std::size_t i) { return rel_tol * std::max(1.0, std::abs(F[i])); };

  bool any_growth = false;
  for (std::size_t i = 0; i < n; ++i) any_growth |= fit.dFdt[i] > tol(i);

  if (any_growth) {
    double best = std::numeric_limits<double>::infinity();
    for (double p : kRates) {
      double q = 0.0;
      for (std::size_t i = 0; i < n; ++i) q = std::max(q, fit.dFdt[i] - p * F[i]);
      const double env = envelope(F[0], p, q, t[n - 1] - t[0]);
      if (std::isfinite(env) && env < best) {
        best = env;
        fit.p = p;
        fit.q = q;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double excess = fit.dFdt[i] - fit.p * F[i] - fit.q;
    fit.max_excess = std::max(fit.max_excess, excess / std::max(1.0, std::abs(F[i])));
    if (excess > tol(i)) ++fit.violations;
    if (F[i] > envelope(F[0], fit.p, fit.q, t[i] - t[0]) + tol(i)) ++fit.envelope_violations;
  }
  return fit;
}

double linear_fit_slope(std::span<const double> t, std::span<const double> y, double t_from) {
  double st = 0.0, sy = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_from) {
      st += t[i];
      sy += y[i];
      ++m;
    }
  if (m < 2) throw std::invalid_argument("linear_fit_slope: fewer than 2 samples in the window");
  const double tm = st / m, ym = sy / m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_from) {
      num += (t[i] - tm) * (y[i] - ym);
      den += (t[i] - tm) * (t[i] - tm);
    }
  return num / den;
}

UniformBound check_uniform_bound(std::span<const double> t, std::span<const double> X, double late_from) {
  check_series(t, X);
  const std::vector<double> d = time_derivative(t, X);
  const double t_half = 0.5 * (t.front() + t.back());
  UniformBound ub;
  ub.ceiling = std::numeric_limits<double>::infinity();
  for (double lam : kRates) {
    if (lam == 0.0) continue;
    double C = 0.0;
    for (std::size_t i = 0; i < t.size() && t[i] <= t_half; ++i) C = std::max(C, d[i] + lam * X[i]);
    if (C / lam < ub.ceiling) {
      ub.ceiling = C / lam;
      ub.lambda = lam;
      ub.C = C;
    }
  }
  ub.sup = *std::max_element(X.begin(), X.end());
  ub.bound = std::max(X[0] + 0.05 * std::abs(X[0]), ub.ceiling);
  ub.bounded = ub.sup <= ub.bound;
  ub.late_slope = linear_fit_slope(t, X, late_from);
  ub.late_nonincreasing = ub.late_slope <= 0.0;
  return ub;
}

EntropyResidual check_entropy_identity_n(const Grid& grid, const ScalarField& n_prev, const ScalarField& n_mid,
                                         const ScalarField& n_next, const ScalarField& c, double dt, double epsilon,
                                         double floor) {
  check_size(grid, n_prev, "check_entropy_identity_n");
  check_size(grid, n_mid, "check_entropy_identity_n");
  check_size(grid, n_next, "check_entropy_identity_n");
  check_size(grid, c, "check_entropy_identity_n");
  if (!(dt > 0.0)) throw std::invalid_argument("check_entropy_identity_n: dt must be positive");
  auto entropy = [&](const ScalarField& n) {
    ScalarField v(n.size());
    for (Eigen::Index i = 0; i < n.size(); ++i) v[i] = s_fn(std::max(n[i], 0.0));
    return integrate_volume(grid, v);
  };
  EntropyResidual r;
  r.lhs = (entropy(n_next) - entropy(n_prev)) / (2.0 * dt) +
          4.0 * cell_dirichlet(grid, n_mid.cwiseMax(0.0).cwiseSqrt());
  if (epsilon != 0.0) {
    ScalarField v(n_mid.size());
    for (Eigen::Index i = 0; i < n_mid.size(); ++i) {
      const double n = std::max(n_mid[i], 0.0);
      v[i] = n * (1.0 - n * n) * std::log(std::max(n, floor));
    }
    r.lhs -= epsilon * integrate_volume(grid, v);
  }
  const CellVector gc = cell_gradient(grid, c);
  const CellVector gn = cell_gradient(grid, n_mid);
  r.rhs = integrate_volume(grid, gc.x.cwiseProduct(gn.x) + gc.y.cwiseProduct(gn.y));
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

FluidEnergyMargin check_fluid_energy(const Grid& grid, const VectorField& u_prev, const VectorField& u_next,
                                     const ScalarField& n, const ScalarField& phi, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("check_fluid_energy: dt must be positive");
  FluidEnergyMargin m;
  const double e1 = velocity_l2_squared(grid, u_next);
  m.lhs = (e1 - velocity_l2_squared(grid, u_prev)) / dt;
  if (phi.size() != 0) {
    const VectorField f = body_force(grid, n, phi);
    const FaceDofMap dofs(grid);
    m.rhs = 2.0 * std::abs(grid.cell_volume() * dofs.gather(f).dot(dofs.gather(u_next)));
  }
  m.tol = 1e-6 * std::max(1.0, e1);
  m.margin = m.rhs + m.tol - m.lhs;
  m.holds = m.margin >= 0.0;
  return m;
}

}  // namespace cns
