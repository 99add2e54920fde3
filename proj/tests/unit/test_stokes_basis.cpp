#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "cns/errors.hpp"
#include "cns/fluid.hpp"
#include "cns/stokes_basis.hpp"

using namespace cns;

namespace {

Grid square(int n) { return Grid::build(DomainSpec{DomainShape::rectangle, 2, n, n, 1.0, 1.0, {}}); }
Grid lshape(int n) { return Grid::build(DomainSpec{DomainShape::l_shape, 2, n, n, 1.0, 1.0, {}}); }

double l2(const Grid& g, const VectorField& a) { return std::sqrt(velocity_l2_squared(g, a)); }
double diff_l2(const Grid& g, const VectorField& a, const VectorField& b) { return l2(g, FaceField{a.x - b.x, a.y - b.y}); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cns_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(StokesBasis, DimensionCountsInteriorNodes) {
  EXPECT_EQ(stokes_dimension(square(8)), 49);
  // L-shape: count nodes whose four surrounding cells are inside
  const Grid l = lshape(8);
  int nodes = 0;
  for (int j = 1; j < 8; ++j)
    for (int i = 1; i < 8; ++i)
      nodes += l.inside(i - 1, j - 1) && l.inside(i, j - 1) && l.inside(i - 1, j) && l.inside(i, j);
  EXPECT_EQ(stokes_dimension(l), nodes);
}

TEST(StokesBasis, ModesAreOrthonormalSolenoidalEigenpairs) {
  const Grid g = lshape(10);
  const StokesBasis b = build_stokes_basis(g, stokes_dimension(g));
  const FaceDofMap dofs(g);
  const SparseMatrix L = assemble_velocity_laplacian(g, dofs);
  const PressureSolver ps(g);
  const Eigen::MatrixXd gram = b.modes().transpose() * b.modes() * g.cell_volume();
  EXPECT_NEAR((gram - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  for (int k = 1; k < b.size(); ++k) EXPECT_GE(b.eigenvalues()[k], b.eigenvalues()[k - 1]);
  EXPECT_GT(b.eigenvalues()[0], 0.0);
  for (int k : {0, 1, b.size() / 2, b.size() - 1}) {
    const VectorField v = b.mode(g, k);
    EXPECT_LT(max_divergence(g, v), 1e-9);
    // A v = −P Δ_h v = λ v
    const VectorField lap = dofs.scatter(-(L * b.modes().col(k)));
    const VectorField av = hodge_project(g, ps, lap);
    EXPECT_LT(diff_l2(g, av, FaceField{b.eigenvalues()[k] * v.x, b.eigenvalues()[k] * v.y}),
              1e-8 * b.eigenvalues()[k]);
  }
}

TEST(StokesBasis, LowestEigenvalueConvergesToContinuum) {
  // first Stokes eigenvalue of the unit square ≈ 52.3447 (buckling of a
  // clamped plate)
  const StokesBasis b16 = build_stokes_basis(square(16), 3);
  const StokesBasis b32 = build_stokes_basis(square(32), 3);
  EXPECT_LT(std::abs(b32.eigenvalues()[0] - 52.3447), std::abs(b16.eigenvalues()[0] - 52.3447));
  EXPECT_NEAR(b32.eigenvalues()[0], 52.3447, 0.5);
  EXPECT_NEAR(b32.eigenvalues()[1], b32.eigenvalues()[2], 1e-8);  // x ↔ y symmetry
}

TEST(StokesBasis, ProjectionOfModeIsMode) {
  const Grid g = square(12);
  const StokesBasis b = build_stokes_basis(g, 20);
  const VectorField v1 = b.mode(g, 0);
  EXPECT_LT(diff_l2(g, leray_project(g, b, v1, 20), v1), 1e-12);
  EXPECT_LT(diff_l2(g, leray_project(g, b, v1, 1), v1), 1e-12);
  EXPECT_LT(l2(g, leray_project(g, b, b.mode(g, 5), 3)), 1e-12);
}

TEST(StokesBasis, FullProjectionMatchesHodge) {
  const Grid g = lshape(10);
  const StokesBasis b = build_stokes_basis(g, stokes_dimension(g));
  const FaceDofMap dofs(g);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  Eigen::VectorXd v(dofs.num_dofs());
  for (auto& x : v) x = N(rng);
  const VectorField f = dofs.scatter(v);
  const VectorField a = leray_project(g, b, f, b.size());
  const VectorField h = hodge_project(g, PressureSolver(g), f);
  EXPECT_LT(diff_l2(g, a, h), 1e-9 * l2(g, f));
  EXPECT_LT(diff_l2(g, leray_project(g, b, a, b.size()), a), 1e-12 * l2(g, a));
}

TEST(StokesBasis, RangeChecks) {
  const Grid g = square(6);
  EXPECT_THROW(build_stokes_basis(g, 0), std::invalid_argument);
  EXPECT_THROW(build_stokes_basis(g, stokes_dimension(g) + 1), std::invalid_argument);
  const StokesBasis b = build_stokes_basis(g, 4);
  EXPECT_THROW(leray_project(g, b, FaceField::zeros(g), 5), std::invalid_argument);
}

TEST(StokesBasis, CacheRoundTrip) {
  const Grid g = square(10);
  const StokesBasis b = build_stokes_basis(g, 12);
  const auto path = temp_path("basis.bin");
  save_stokes_basis(b, path);
  const StokesBasis r = load_stokes_basis(path);
  EXPECT_EQ(r.grid_hash(), g.hash());
  EXPECT_EQ(r.size(), 12);
  EXPECT_EQ(r.cell_volume(), b.cell_volume());
  EXPECT_TRUE(r.modes() == b.modes());
  EXPECT_TRUE(r.eigenvalues() == b.eigenvalues());

  // a cache for fewer modes is rebuilt, a wider one reused
  const StokesBasis more = load_or_build_stokes_basis(g, 20, path);
  EXPECT_EQ(more.size(), 20);
  EXPECT_EQ(load_stokes_basis(path).size(), 20);
  EXPECT_EQ(load_or_build_stokes_basis(g, 5, path).size(), 20);
  // another grid invalidates it
  const Grid h = square(8);
  EXPECT_EQ(load_or_build_stokes_basis(h, 5, path).grid_hash(), h.hash());
  std::filesystem::remove(path);
}

TEST(StokesBasis, CorruptCacheRejected) {
  const auto path = temp_path("corrupt.bin");
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTABASIS-------------------------------";
  }
  EXPECT_THROW(load_stokes_basis(path), std::runtime_error);
  EXPECT_THROW(load_stokes_basis(temp_path("missing.bin")), std::runtime_error);
  std::filesystem::remove(path);
}
