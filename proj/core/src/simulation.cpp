#include "cns/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cns/errors.hpp"
#include "cns/io.hpp"

namespace cns {

namespace {

constexpr double kMassSlack = 1.0886621079036347;  // 4√6/9 = max over n ≥ 0 of 2n − n³

// Smooth random field with values in [−1, 1].
ScalarField smooth_noise(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double lx = g.nx() * g.dx();
  const double ly = g.ny() * g.dy();
  ScalarField f = ScalarField::Zero(g.num_cells());
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= (g.dim() == 1 ? 0 : 3); ++l) {
      if (k == 0 && l == 0) continue;
      const double a = unit(rng) / (k + l);
      const double px = M_PI * unit(rng);
      const double py = M_PI * unit(rng);
      for (int c = 0; c < g.num_cells(); ++c)
        f[c] += a * std::cos(k * M_PI * g.x_center(g.cell_i(c)) / lx + px) *
                std::cos(l * M_PI * g.y_center(g.cell_j(c)) / ly + py);
    }
  const double m = f.cwiseAbs().maxCoeff();
  return m > 0.0 ? ScalarField(f / m) : f;
}

VectorField random_solenoidal(const Grid& g, double amplitude, std::mt19937_64& rng) {
  if (amplitude == 0.0 || g.dim() == 1) return FaceField::zeros(g);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double lx = g.nx() * g.dx();
  const double ly = g.ny() * g.dy();
  double a[3][3];
  for (auto& row : a)
    for (double& v : row) v = unit(rng);
  VectorField u = curl_of_streamfunction(g, [&](double x, double y) {
    double s = 0.0;
    for (int k = 1; k <= 3; ++k)
      for (int l = 1; l <= 3; ++l) s += a[k - 1][l - 1] * std::sin(k * M_PI * x / lx) * std::sin(l * M_PI * y / ly) / (k * l);
    return s;
  });
  const double m = std::max(u.x.cwiseAbs().maxCoeff(), u.y.cwiseAbs().maxCoeff());
  if (m > 0.0) {
    u.x *= amplitude / m;
    u.y *= amplitude / m;
  }
  return u;
}

Side side_of(const BoundaryFace& f) { return f.side; }

}  // namespace

BoundaryData make_boundary(const Grid& grid, const RunConfig& config) {
  const BoundarySpec& b = config.boundary;
  return make_boundary_data(
      grid, [&](const BoundaryFace& f) { return b.kappa[static_cast<int>(side_of(f))]; },
      [&](const BoundaryFace& f) { return b.gamma[static_cast<int>(side_of(f))]; });
}

ScalarField make_potential(const Grid& grid, const RunConfig& config) {
  if (config.gravity_x == 0.0 && config.gravity_y == 0.0) return {};
  ScalarField phi(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c)
    phi[c] = config.gravity_x * grid.x_center(grid.cell_i(c)) +
             (grid.dim() == 1 ? 0.0 : config.gravity_y * grid.y_center(grid.cell_j(c)));
  return phi;
}

State make_initial_state(const Grid& grid, const BoundaryData& bdata, const RunConfig& config) {
  const InitialSpec& ic = config.initial;
  std::mt19937_64 rng(config.seed);
  const int nc = grid.num_cells();
  State s;
  s.P = ScalarField::Zero(nc);
  s.u = FaceField::zeros(grid);
  auto level = [&](double fallback) { return ic.c_level >= 0.0 ? ic.c_level : fallback; };

  if (ic.preset == "equilibrium") {
    s.n = ScalarField::Constant(nc, ic.n_mean);
    s.c = ScalarField::Constant(nc, level(bdata.gamma.empty() ? 1.0 : bdata.gamma.front()));
  } else if (ic.preset == "uniform") {
    s.n = ScalarField::Constant(nc, ic.n_mean);
    s.c = ScalarField::Constant(nc, level(1.0));
  } else if (ic.preset == "oxygen_fill") {
    s.n = ScalarField::Constant(nc, ic.n_mean);
    s.c = ScalarField::Constant(nc, level(0.0));
  } else if (ic.preset == "aerotaxis_drop") {
    const double x0 = ic.blob_x * grid.nx() * grid.dx();
    const double y0 = grid.dim() == 1 ? 0.5 : ic.blob_y * grid.ny() * grid.dy();
    const double w2 = 2.0 * ic.blob_width * ic.blob_width;
    s.n.resize(nc);
    for (int c = 0; c < nc; ++c) {
      const double dx = grid.x_center(grid.cell_i(c)) - x0;
      const double dy = grid.dim() == 1 ? 0.0 : grid.y_center(grid.cell_j(c)) - y0;
      s.n[c] = ic.n_mean + ic.blob_amplitude * std::exp(-(dx * dx + dy * dy) / w2);
    }
    s.c = ScalarField::Constant(nc, level(0.5 * bdata.gamma_max()));
  } else if (ic.preset == "random") {
    s.n = ScalarField::Constant(nc, ic.n_mean);
    s.c = ScalarField::Constant(nc, level(1.0));
  } else {
    throw ConfigError("unknown preset '" + ic.preset + "'");
  }
  if (ic.noise > 0.0) {
    s.n = s.n.cwiseProduct(ScalarField::Ones(nc) + ic.noise * smooth_noise(grid, rng));
    s.c = s.c.cwiseProduct(ScalarField::Ones(nc) + ic.noise * smooth_noise(grid, rng));
  }
  s.u = random_solenoidal(grid, ic.u_amplitude, rng);
  return s;
}

Simulation::Simulation(RunConfig config) : config_(std::move(config)) {
  validate(config_);
  try {
    grid_ = std::make_unique<Grid>(Grid::build(config_.domain));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  const Grid& g = *grid_;
  bdata_ = make_boundary(g, config_);
  phi_ = make_potential(g, config_);
  state_ = make_initial_state(g, bdata_, config_);
  current_dt_ = config_.dt > 0.0 ? config_.dt : config_.dt_max;

  FluidParams fp;
  fp.mu = config_.mu;
  fp.dt = current_dt_;
  fp.phi = phi_;
  fp.mode = config_.mode;
  fp.solver = config_.solver;
  if (config_.mode == FluidMode::galerkin) {
    const int full = stokes_dimension(g);
    const int m = config_.galerkin_m == 0 ? full : config_.galerkin_m;
    if (m > full) throw ConfigError("galerkin_m exceeds the Stokes dimension of the grid");
    basis_ = std::make_shared<const StokesBasis>(
        config_.basis_cache.empty() ? build_stokes_basis(g, m) : load_or_build_stokes_basis(g, m, config_.basis_cache));
    fp.galerkin_m = m;
    state_.u = leray_project(g, *basis_, state_.u, m);
  }
  fluid_ = std::make_unique<FluidStepper>(g, fp, basis_);
  oxygen_ = std::make_unique<OxygenStepper>(g, bdata_, OxygenStepParams{current_dt_, 1.0, config_.solver});
  density_ = std::make_unique<DensityStepper>(g, DensityStepParams{current_dt_, config_.epsilon, true, config_.solver});

  floor_ = cns::diagnostics_floor(state_.c);
  decay_rate_ = measure_fluid_decay_rate(g, fp);
  constants_.K = config_.K ? *config_.K : choose_fluid_weight(state_.c, bdata_, decay_rate_);
  constants_.L = config_.L ? *config_.L : 1.0;
  constants_.a = 2.0;
  constants_.b = constants_.K;
  mass0_ = integrate_volume(g, state_.n);
  c_bound_ = std::max(bdata_.gamma_max(), state_.c.cwiseAbs().maxCoeff());
}

Simulation::~Simulation() = default;

bool Simulation::finished() const { return state_.t >= config_.t_final - 1e-12 * std::max(1.0, config_.t_final); }

double Simulation::next_dt() const {
  if (config_.dt > 0.0) return config_.dt;
  const Grid& g = *grid_;
  const double limit = std::min({fluid_cfl_limit(g, state_.u), oxygen_cfl_limit(g, state_.u),
                                 density_cfl_limit(g, state_.u, state_.c)});
  double dt = config_.dt_max;
  while (dt > config_.cfl * limit) {
    dt *= 0.5;
    if (dt < 1e-12 * config_.dt_max) throw CflError("automatic time step underflow");
  }
  return dt;
}

void Simulation::set_dt(double dt) {
  if (dt == current_dt_) return;
  current_dt_ = dt;
  fluid_->set_dt(dt);
  oxygen_->set_dt(dt);
  density_->set_dt(dt);
}

StepMeta Simulation::step() {
  double dt = next_dt();
  while (true) {
    try {
      return step(dt);
    } catch (const CflError&) {
      // The limit is evaluated on the state before the step; a subsystem that
      // runs later can see faster transport.
      if (config_.dt > 0.0) throw;
      dt *= 0.5;
      if (dt < 1e-12 * config_.dt_max) throw;
    }
  }
}

StepMeta Simulation::step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("Simulation::step: dt must be positive");
  const double remaining = config_.t_final - state_.t;
  bool last = false;
  if (dt >= remaining * (1.0 - 1e-9)) {
    dt = remaining;
    last = true;
  }
  set_dt(dt);
  State next = state_;
  StepMeta meta;
  meta.dt = dt;
  for (Subsystem s : config_.splitting) {
    switch (s) {
      case Subsystem::fluid:
        next.u = fluid_->step(next.u, next.n);
        next.P = fluid_->pressure();
        break;
      case Subsystem::oxygen:
        next.c = oxygen_->step(next.c, next.n, next.u);
        meta.oxygen_iterations = oxygen_->last_iterations();
        break;
      case Subsystem::density:
        next.n = density_->step(next.n, next.c, next.u);
        meta.density_iterations = density_->last_iterations();
        break;
    }
  }
  next.t = last ? config_.t_final : state_.t + dt;
  meta.t = next.t;
  if (config_.check_invariants) check_invariants(next);
  state_ = std::move(next);
  return meta;
}

void Simulation::check_invariants(const State& s) const {
  const Grid& g = *grid_;
  auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "invariant violated at t = " << s.t << ": " << what;
    throw InvariantViolation(msg.str());
  };
  if (!s.n.allFinite() || !s.c.allFinite() || !s.u.x.allFinite() || !s.u.y.allFinite()) fail("non-finite field");
  if (s.n.minCoeff() < 0.0) fail("negative density");
  if (s.c.minCoeff() < 0.0) fail("negative oxygen");
  if (s.c.maxCoeff() > c_bound_ + 1e-10) fail("oxygen above max(|gamma|, |c0|)");
  const double mass = integrate_volume(g, s.n);
  if (config_.epsilon == 0.0) {
    if (std::abs(mass - mass0_) > 1e-10 * std::max(1.0, std::abs(mass0_))) fail("density mass drift");
  } else if (mass > mass0_ + kMassSlack * g.area() + 1e-8) {
    fail("density mass above the regularised bound");
  }
  if (max_divergence(g, s.u) > 1e-10) fail("velocity divergence above 1e-10");
  if (max_wall_velocity(g, s.u) != 0.0) fail("nonzero wall velocity");
}

EnergyReport Simulation::report() const {
  return compute_report(*grid_, bdata_, state_.n, state_.c, state_.u, state_.t, constants_, floor_);
}

TimeSeries run_simulation(const RunConfig& config, const std::function<void(const Simulation&)>& on_step) {
  Simulation sim(config);
  TimeSeries ts;
  ts.constants = sim.constants();
  ts.fluid_decay_rate = sim.fluid_decay_rate();
  ts.reports.push_back(sim.report());
  try {
    int k = 0;
    while (!sim.finished()) {
      ts.steps.push_back(sim.step());
      ++k;
      if (on_step) on_step(sim);
      if (k % config.output_every == 0 || sim.finished()) ts.reports.push_back(sim.report());
    }
  } catch (...) {
    if (!config.dump_path.empty()) dump_field(sim.grid(), sim.state(), config.dump_path);
    if (!config.csv_path.empty()) write_timeseries(ts.reports, config.csv_path);
    throw;
  }
  if (!config.csv_path.empty()) write_timeseries(ts.reports, config.csv_path);
  if (!config.dump_path.empty()) dump_field(sim.grid(), sim.state(), config.dump_path);
  return ts;
}

}  // namespace cns
