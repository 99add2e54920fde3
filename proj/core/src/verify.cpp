#include "cns/verify.hpp"

#include <cmath>

#include "cns/density.hpp"
#include "cns/energy.hpp"
#include "cns/fluid.hpp"
#include "cns/geometry.hpp"
#include "cns/ops.hpp"

namespace cns {

namespace {

Grid unit_square(int n) { return Grid::build(DomainSpec{DomainShape::rectangle, 2, n, n, 1.0, 1.0, {}}); }

template <class F>
ScalarField sample(const Grid& g, F&& f) {
  ScalarField v(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) v[c] = f(g.x_center(g.cell_i(c)), g.y_center(g.cell_j(c)));
  return v;
}

}  // namespace

void fill_orders(ConvergenceStudy& s) {
  s.orders.clear();
  for (std::size_t k = 0; k + 1 < s.errors.size(); ++k) s.orders.push_back(std::log2(s.errors[k] / s.errors[k + 1]));
}

ConvergenceStudy gradient_study(const std::vector<int>& resolutions) {
  ConvergenceStudy s{"gradient", resolutions, {}, {}};
  for (int n : resolutions) {
    const Grid g = unit_square(n);
    const FaceField d = gradient(g, sample(g, [](double x, double y) { return std::sin(M_PI * x) * std::cos(M_PI * y); }));
    double err = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 1; i < n; ++i) {
        const double x = i * g.dx(), y = (j + 0.5) * g.dy();
        err = std::max(err, std::abs(d.x[g.x_face(i, j)] - M_PI * std::cos(M_PI * x) * std::cos(M_PI * y)));
      }
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * g.dx(), y = j * g.dy();
        err = std::max(err, std::abs(d.y[g.y_face(i, j)] + M_PI * std::sin(M_PI * x) * std::sin(M_PI * y)));
      }
    s.errors.push_back(err);
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy robin_laplacian_study(const std::vector<int>& resolutions) {
  ConvergenceStudy s{"robin_laplacian", resolutions, {}, {}};
  auto ce = [](double x, double y) { return 2.0 + std::cos(2.0 * x) * std::sin(y + 0.3) + 0.3 * x * y; };
  auto cx = [](double x, double y) { return -2.0 * std::sin(2.0 * x) * std::sin(y + 0.3) + 0.3 * y; };
  auto cy = [](double x, double y) { return std::cos(2.0 * x) * std::cos(y + 0.3) + 0.3 * x; };
  auto lap = [](double x, double y) { return -5.0 * std::cos(2.0 * x) * std::sin(y + 0.3); };
  auto kappa = [](const BoundaryFace& f) { return 1.5 + 0.5 * std::sin(3.0 * (f.mid_x + f.mid_y)); };
  for (int n : resolutions) {
    const Grid g = unit_square(n);
    const BoundaryData b = make_boundary_data(g, kappa, [&](const BoundaryFace& f) {
      const double dn = cx(f.mid_x, f.mid_y) * f.normal_x + cy(f.mid_x, f.mid_y) * f.normal_y;
      return ce(f.mid_x, f.mid_y) + dn / kappa(f);
    });
    const SparseOperator op = assemble_robin_laplacian(g, b);
    SparseMatrix m(g.num_cells(), g.num_cells());
    m.setIdentity();
    m -= op.matrix;
    SpdSolver solver;
    solver.factorize(m);
    const ScalarField exact = sample(g, ce);
    const ScalarField sol = solver.solve(op.source + exact - sample(g, lap));
    s.errors.push_back((sol - exact).cwiseAbs().maxCoeff());
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy hessian_log_study(const std::vector<int>& resolutions) {
  ConvergenceStudy s{"hessian_log", resolutions, {}, {}};
  for (int n : resolutions) {
    const Grid g = unit_square(n);
    const ScalarField c = sample(g, [](double x, double y) { return std::exp(std::sin(2.0 * x) * std::cos(y)); });
    const auto h = hessian_log(g, c, 1e-12);
    double err = 0.0;
    for (int k = 0; k < g.num_cells(); ++k) {
      const double x = g.x_center(g.cell_i(k)), y = g.y_center(g.cell_j(k));
      SymTensor2 e;
      e.xx = h[k].xx + 4.0 * std::sin(2.0 * x) * std::cos(y);
      e.xy = h[k].xy + 2.0 * std::cos(2.0 * x) * std::sin(y);
      e.yy = h[k].yy + std::sin(2.0 * x) * std::cos(y);
      err = std::max(err, std::sqrt(e.frobenius2()));
    }
    s.errors.push_back(err);
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy pressure_study(const std::vector<int>& resolutions) {
  ConvergenceStudy s{"pressure_poisson", resolutions, {}, {}};
  auto p = [](double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y); };
  for (int n : resolutions) {
    const Grid g = unit_square(n);
    ScalarField rhs = sample(g, [&](double x, double y) { return -2.0 * M_PI * M_PI * p(x, y); });
    rhs.array() -= rhs.mean();
    ScalarField exact = sample(g, p);
    exact.array() -= exact.mean();
    s.errors.push_back((pressure_poisson(g, rhs) - exact).cwiseAbs().maxCoeff());
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy entropy_identity_study(const std::vector<int>& resolutions, double epsilon) {
  ConvergenceStudy s{"entropy_identity", resolutions, {}, {}};
  const double t_eval = 0.125;
  for (int n : resolutions) {
    const Grid g = unit_square(n);
    const double dt = 0.25 / n;
    const ScalarField c = sample(g, [](double x, double y) { return 1.0 + 0.3 * std::cos(M_PI * x) * std::cos(M_PI * y); });
    ScalarField nn = sample(g, [](double x, double y) { return 1.0 + 0.5 * std::cos(M_PI * x) * std::cos(2.0 * M_PI * y); });
    const VectorField u = FaceField::zeros(g);
    DensityStepper stepper(g, DensityStepParams{dt, epsilon, true, {}});
    const int steps = static_cast<int>(std::lround(t_eval / dt));
    ScalarField prev;
    for (int k = 0; k < steps; ++k) {
      if (k == steps - 1) prev = nn;
      nn = stepper.step(nn, c, u);
    }
    const ScalarField next = stepper.step(nn, c, u);
    s.errors.push_back(check_entropy_identity_n(g, prev, nn, next, c, dt, epsilon).residual);
  }
  fill_orders(s);
  return s;
}

std::vector<ConvergenceStudy> verify_identities() {
  const std::vector<int> res{16, 32, 64, 128};
  return {gradient_study(res), robin_laplacian_study(res), hessian_log_study(res), pressure_study(res),
          entropy_identity_study(res)};
}

}  // namespace cns
