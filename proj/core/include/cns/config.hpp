#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cns/fluid.hpp"
#include "cns/geometry.hpp"
#include "cns/linear_solver.hpp"

namespace cns {

enum class Subsystem { fluid, oxygen, density };

/// Initial-condition parameters shared by the presets. Each preset reads
/// only the keys it documents (see README).
struct InitialSpec {
  std::string preset = "equilibrium";
  double n_mean = 1.0;        ///< equilibrium/uniform level, background of the blob
  double c_level = -1.0;      ///< < 0 selects the preset default
  double blob_amplitude = 4.0;
  double blob_x = 0.5;        ///< fraction of the box width
  double blob_y = 0.5;        ///< fraction of the box height
  double blob_width = 0.1;    ///< Gaussian standard deviation, length units
  double u_amplitude = 0.0;   ///< peak of the random divergence-free u0
  double noise = 0.0;         ///< relative amplitude of random perturbations of n0, c0
};

/// Per-side Robin data: faces whose outward normal points west/east/south/north.
struct BoundarySpec {
  std::array<double, 4> kappa{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> gamma{1.0, 1.0, 1.0, 1.0};
};

struct RunConfig {
  DomainSpec domain;
  double t_final = 1.0;
  double dt = 0.0;      ///< fixed step; 0 selects automatic steps from `cfl`
  double cfl = 0.5;     ///< fraction of the stability limit used by automatic steps
  double dt_max = 1e-2; ///< upper bound (and base of the halving ladder) for automatic steps
  double mu = 1.0;
  double epsilon = 0.0;
  FluidMode mode = FluidMode::projection;
  int galerkin_m = 0;   ///< 0 selects the full basis
  std::string basis_cache;
  InitialSpec initial;
  BoundarySpec boundary;
  double gravity_x = 0.0;  ///< φ = gravity_x·x + gravity_y·y
  double gravity_y = 0.0;
  int output_every = 10;   ///< steps between reports (the final state is always reported)
  std::uint64_t seed = 1;
  std::optional<double> K;
  std::optional<double> L;
  std::string csv_path;
  std::string dump_path;
  bool check_invariants = true;
  std::vector<Subsystem> splitting{Subsystem::fluid, Subsystem::oxygen, Subsystem::density};
  LinearSolverOptions solver{};
};

/// Parses INI-style `key = value` text. Throws ConfigError on unknown keys,
/// malformed values or violated invariants.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks T > 0, dt/CFL ranges, known preset, positive μ, ... Throws ConfigError.
void validate(const RunConfig& config);

/// Names accepted by `preset =`.
const std::vector<std::string>& preset_names();

}  // namespace cns
