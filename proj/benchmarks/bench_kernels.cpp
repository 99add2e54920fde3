#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "cns/density.hpp"
#include "cns/energy.hpp"
#include "cns/fluid.hpp"
#include "cns/ops.hpp"
#include "cns/oxygen.hpp"

using namespace cns;

namespace {

Grid square(int n) { return Grid::build(DomainSpec{DomainShape::rectangle, 2, n, n, 1.0, 1.0, {}}); }

ScalarField smooth(const Grid& g, double base, double amp) {
  ScalarField v(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    const double x = g.x_center(g.cell_i(c)), y = g.y_center(g.cell_j(c));
    v[c] = base + amp * std::cos(M_PI * x) * std::cos(2 * M_PI * y);
  }
  return v;
}

VectorField swirl(const Grid& g, double amp) {
  return curl_of_streamfunction(g, [=](double x, double y) { return amp * std::sin(M_PI * x) * std::sin(M_PI * y); });
}

BoundaryData robin_data(const Grid& g) {
  return make_boundary_data(g, [](const BoundaryFace& f) { return 1.0 + f.mid_x; },
                            [](const BoundaryFace& f) { return 1.0 + 0.5 * f.mid_y; });
}

}  // namespace

static void BM_RobinAssembly(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const BoundaryData b = robin_data(g);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_robin_laplacian(g, b));
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}
BENCHMARK(BM_RobinAssembly)->Arg(64)->Arg(128)->Arg(256);

static void BM_OxygenStep(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const BoundaryData b = robin_data(g);
  const VectorField u = swirl(g, 0.1);
  OxygenStepper st(g, b, OxygenStepParams{0.5 * oxygen_cfl_limit(g, u), 1.0, {}});
  ScalarField c = smooth(g, 0.8, 0.2);
  const ScalarField n = smooth(g, 1.0, 0.5);
  for (auto _ : state) {
    c = st.step(c, n, u);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}
BENCHMARK(BM_OxygenStep)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_DensityStep(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const VectorField u = swirl(g, 0.1);
  const ScalarField c = smooth(g, 0.8, 0.2);
  ScalarField n = smooth(g, 1.0, 0.5);
  DensityStepper st(g, DensityStepParams{0.5 * density_cfl_limit(g, u, c), 0.1, true, {}});
  for (auto _ : state) {
    n = st.step(n, c, u);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}
BENCHMARK(BM_DensityStep)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_FluidStep(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  FluidParams p;
  VectorField u = swirl(g, 0.05);
  p.dt = 0.5 * fluid_cfl_limit(g, u);
  FluidStepper st(g, p);
  const ScalarField n = smooth(g, 1.0, 0.5);
  for (auto _ : state) {
    u = st.step(u, n);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}
BENCHMARK(BM_FluidStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_HodgeProjection(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const PressureSolver solver(g);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  VectorField u = FaceField::zeros(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) u.x[g.x_face(i, j)] = N(rng);
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) u.y[g.y_face(i, j)] = N(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hodge_project(g, solver, u));
}
BENCHMARK(BM_HodgeProjection)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_HessianLog(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const ScalarField c = smooth(g, 1.5, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(hessian_log(g, c, 1e-12));
  state.SetItemsProcessed(state.iterations() * g.num_cells());
}
BENCHMARK(BM_HessianLog)->Arg(64)->Arg(128);

static void BM_BernsteinCheck(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(20240601);
  const RobinField f = make_robin_compatible_field(g, rng);
  for (auto _ : state) benchmark::DoNotOptimize(check_bernstein(g, f.bdata, f.c));
}
BENCHMARK(BM_BernsteinCheck)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
