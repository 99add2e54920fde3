#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "cns/config.hpp"
#include "cns/errors.hpp"

using namespace cns;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cns_cfg_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.initial.preset, "equilibrium");
  EXPECT_EQ(c.mode, FluidMode::projection);
  EXPECT_EQ(c.dt, 0.0);
  EXPECT_TRUE(c.check_invariants);
  EXPECT_EQ(c.splitting.size(), 3u);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, ParsesAllSections) {
  const RunConfig c = parse_config(R"(
# comment
preset = aerotaxis_drop
domain = l_shape
nx = 40
ny = 30
lx = 2
t_final = 7.5
dt = 0.002
mu = 0.5
epsilon = 0.01
mode = galerkin
galerkin_m = 12
basis_cache = basis.bin
blob_amplitude = 2
kappa_north = 3
gamma = 1.5
gravity_y = 9.81
output_every = 4
seed = 42
K = 10
L = 2
csv = out.csv
dump = out.dump
check_invariants = false
splitting = density, oxygen, fluid
linear_solver = cg
solver_tolerance = 1e-12
)");
  EXPECT_EQ(c.initial.preset, "aerotaxis_drop");
  EXPECT_EQ(c.domain.shape, DomainShape::l_shape);
  EXPECT_EQ(c.domain.nx, 40);
  EXPECT_EQ(c.domain.ny, 30);
  EXPECT_EQ(c.domain.lx, 2.0);
  EXPECT_EQ(c.t_final, 7.5);
  EXPECT_EQ(c.dt, 0.002);
  EXPECT_EQ(c.mu, 0.5);
  EXPECT_EQ(c.epsilon, 0.01);
  EXPECT_EQ(c.mode, FluidMode::galerkin);
  EXPECT_EQ(c.galerkin_m, 12);
  EXPECT_EQ(c.basis_cache, "basis.bin");
  EXPECT_EQ(c.initial.blob_amplitude, 2.0);
  // preset default for the other sides survives, north overridden
  EXPECT_EQ(c.boundary.kappa[static_cast<int>(Side::west)], 0.0);
  EXPECT_EQ(c.boundary.kappa[static_cast<int>(Side::north)], 3.0);
  for (double g : c.boundary.gamma) EXPECT_EQ(g, 1.5);
  EXPECT_EQ(c.gravity_y, 9.81);
  EXPECT_EQ(c.output_every, 4);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(*c.K, 10.0);
  EXPECT_EQ(*c.L, 2.0);
  EXPECT_EQ(c.csv_path, "out.csv");
  EXPECT_EQ(c.dump_path, "out.dump");
  EXPECT_FALSE(c.check_invariants);
  ASSERT_EQ(c.splitting.size(), 3u);
  EXPECT_EQ(c.splitting[0], Subsystem::density);
  EXPECT_EQ(c.splitting[2], Subsystem::fluid);
  EXPECT_EQ(c.solver.kind, LinearSolverKind::conjugate_gradient);
  EXPECT_EQ(c.solver.tolerance, 1e-12);
}

TEST(Config, PresetDefaults) {
  const RunConfig a = parse_config("preset = aerotaxis_drop\n");
  EXPECT_EQ(a.boundary.kappa[static_cast<int>(Side::north)], 1.0);
  EXPECT_EQ(a.boundary.kappa[static_cast<int>(Side::south)], 0.0);
  EXPECT_EQ(a.gravity_y, 1.0);
  EXPECT_EQ(parse_config("preset = oxygen_fill\n").initial.n_mean, 0.0);
  EXPECT_EQ(parse_config("preset = equilibrium\n").initial.n_mean, 0.0);
  EXPECT_EQ(parse_config("preset = equilibrium\nn_mean = 2\n").initial.n_mean, 2.0);
  EXPECT_GT(parse_config("preset = random\n").initial.noise, 0.0);
  for (const std::string& p : preset_names()) EXPECT_NO_THROW(parse_config("preset = " + p + "\n"));
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("bogus_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[section]\nnx = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("nx = four\n"), ConfigError);
  EXPECT_THROW(parse_config("t_final = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("dt = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("cfl = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("mu = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("preset = nope\n"), ConfigError);
  EXPECT_THROW(parse_config("kappa = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("gamma = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("mode = spectral\n"), ConfigError);
  EXPECT_THROW(parse_config("domain = circle\n"), ConfigError);
  EXPECT_THROW(parse_config("domain = mask\n"), ConfigError);
  EXPECT_THROW(parse_config("splitting = fluid, magic\n"), ConfigError);
  EXPECT_THROW(parse_config("check_invariants = maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("output_every = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("linear_solver = qr\n"), ConfigError);
  EXPECT_THROW(load_config(temp_path("absent.cfg")), ConfigError);
}

TEST(Config, MaskFileTopRowFirst) {
  const auto mask = temp_path("mask.txt");
  {
    std::ofstream os(mask);
    os << "110\n111\n111\n";
  }
  const auto cfg = temp_path("mask.cfg");
  {
    std::ofstream os(cfg);
    os << "domain = mask\nmask_file = " << mask.string() << "\n";
  }
  const RunConfig c = load_config(cfg);
  EXPECT_EQ(c.domain.shape, DomainShape::mask);
  EXPECT_EQ(c.domain.nx, 3);
  EXPECT_EQ(c.domain.ny, 3);
  ASSERT_EQ(c.domain.mask.size(), 9u);
  EXPECT_EQ(c.domain.mask[2 * 3 + 2], 0);  // top-right
  EXPECT_EQ(c.domain.mask[0], 1);
  std::filesystem::remove(mask);
  std::filesystem::remove(cfg);
}
