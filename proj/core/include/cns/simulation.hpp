#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cns/config.hpp"
#include "cns/density.hpp"
#include "cns/energy.hpp"
#include "cns/fluid.hpp"
#include "cns/geometry.hpp"
#include "cns/oxygen.hpp"
#include "cns/stokes_basis.hpp"

namespace cns {

struct State {
  double t = 0.0;
  ScalarField n;
  ScalarField c;
  VectorField u;
  ScalarField P;
};

struct StepMeta {
  double t = 0.0;   ///< time after the step
  double dt = 0.0;
  int oxygen_iterations = 0;
  int density_iterations = 0;
};

struct TimeSeries {
  std::vector<EnergyReport> reports;
  std::vector<StepMeta> steps;
  EnergyConstants constants;
  double fluid_decay_rate = 0.0;  ///< measured C(μ)
};

/// Initial n, c, u for the configured preset. Deterministic in `config.seed`.
State make_initial_state(const Grid& grid, const BoundaryData& bdata, const RunConfig& config);
BoundaryData make_boundary(const Grid& grid, const RunConfig& config);
ScalarField make_potential(const Grid& grid, const RunConfig& config);

/// Coupled time loop with Lie splitting in the configured order.
class Simulation {
 public:
  explicit Simulation(RunConfig config);
  ~Simulation();

  const RunConfig& config() const { return config_; }
  const Grid& grid() const { return *grid_; }
  const BoundaryData& boundary() const { return bdata_; }
  const ScalarField& potential() const { return phi_; }
  const State& state() const { return state_; }
  const EnergyConstants& constants() const { return constants_; }
  double fluid_decay_rate() const { return decay_rate_; }
  double diagnostics_floor() const { return floor_; }
  std::shared_ptr<const StokesBasis> basis() const { return basis_; }

  /// Step size for the current state: the fixed dt, or the largest
  /// dt_max/2^k within cfl times every explicit stability limit.
  double next_dt() const;
  /// Advances one step, clipped so that t does not pass t_final. Throws
  /// InvariantViolation when check_invariants is on and a bound fails.
  StepMeta step();
  StepMeta step(double dt);
  bool finished() const;

  EnergyReport report() const;

 private:
  void set_dt(double dt);
  void check_invariants(const State& s) const;

  RunConfig config_;
  std::unique_ptr<Grid> grid_;
  BoundaryData bdata_;
  ScalarField phi_;
  State state_;
  std::shared_ptr<const StokesBasis> basis_;
  std::unique_ptr<FluidStepper> fluid_;
  std::unique_ptr<OxygenStepper> oxygen_;
  std::unique_ptr<DensityStepper> density_;
  EnergyConstants constants_;
  double decay_rate_ = 0.0;
  double floor_ = 1e-12;
  double mass0_ = 0.0;
  double c_bound_ = 0.0;
  double current_dt_ = 0.0;
};

/// Runs to t_final, reporting every output_every steps and at the end.
/// Writes the CSV/dump named in the config. On a stepper or invariant error
/// the last valid state is dumped (when a dump path is set) and the error
/// is rethrown. `on_step` sees the simulation after every step.
TimeSeries run_simulation(const RunConfig& config, const std::function<void(const Simulation&)>& on_step = {});

}  // namespace cns
