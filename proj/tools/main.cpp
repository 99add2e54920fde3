// cnsim: command-line driver for the chemotaxis–Navier–Stokes simulator.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cns/config.hpp"
#include "cns/energy.hpp"
#include "cns/errors.hpp"
#include "cns/simulation.hpp"
#include "cns/stokes_basis.hpp"
#include "cns/verify.hpp"
#include "cns/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

cns::DomainShape parse_shape(const std::string& s) {
  if (s == "rectangle") return cns::DomainShape::rectangle;
  if (s == "l_shape") return cns::DomainShape::l_shape;
  throw cns::ConfigError("unknown domain '" + s + "' (expected rectangle or l_shape)");
}

json report_json(const cns::EnergyReport& r) {
  return {{"t", r.t},         {"mass_n", r.mass_n},   {"c_max", r.c_max},         {"S", r.S},
          {"S_boundary", r.S_boundary}, {"S_add", r.S_add}, {"F", r.F},          {"X", r.X},
          {"E", r.E},         {"lp_n_2", r.lp_n_2},   {"lp_n_3", r.lp_n_3},       {"grad_c_l4", r.grad_c_l4},
          {"u_l2", r.u_l2},   {"grad_u_l2", r.grad_u_l2}};
}

int cmd_run(const std::string& config_path, const std::string& csv, const std::string& dump, bool as_json) {
  cns::RunConfig cfg = cns::load_config(config_path);
  if (!csv.empty()) cfg.csv_path = csv;
  if (!dump.empty()) cfg.dump_path = dump;
  const auto t0 = std::chrono::steady_clock::now();
  const cns::TimeSeries ts = cns::run_simulation(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const cns::EnergyReport& last = ts.reports.back();
  if (as_json) {
    json out{{"steps", ts.steps.size()},
             {"reports", ts.reports.size()},
             {"K", ts.constants.K},
             {"L", ts.constants.L},
             {"fluid_decay_rate", ts.fluid_decay_rate},
             {"wall_seconds", wall},
             {"final", report_json(last)}};
    if (!cfg.csv_path.empty()) out["csv"] = cfg.csv_path;
    if (!cfg.dump_path.empty()) out["dump"] = cfg.dump_path;
    std::cout << out.dump(2) << '\n';
  } else {
    std::printf("steps %zu  reports %zu  K %.6g  C(mu) %.6g  wall %.2fs\n", ts.steps.size(), ts.reports.size(),
                ts.constants.K, ts.fluid_decay_rate, wall);
    std::printf("t %.6g  mass_n %.12g  c_max %.12g  F %.9g  X %.9g  E %.9g\n", last.t, last.mass_n, last.c_max, last.F,
                last.X, last.E);
    if (!cfg.csv_path.empty()) std::printf("wrote %s\n", cfg.csv_path.c_str());
    if (!cfg.dump_path.empty()) std::printf("wrote %s\n", cfg.dump_path.c_str());
  }
  return 0;
}

int cmd_bernstein(int count, int res, std::uint64_t seed, const std::string& shape, bool as_json) {
  if (count < 1 || res < 4) throw cns::ConfigError("check-bernstein: need --n >= 1 and --res >= 4");
  const cns::Grid grid = cns::Grid::build(cns::DomainSpec{parse_shape(shape), 2, res, res, 1.0, 1.0, {}});
  std::mt19937_64 rng(seed);
  int violations = 0;
  double worst_ratio = 0.0;
  json rows = json::array();
  if (!as_json) std::printf("%5s %14s %14s %14s %10s %8s\n", "#", "lhs", "rhs", "margin", "robin_res", "holds");
  for (int k = 0; k < count; ++k) {
    const cns::RobinField f = cns::make_robin_compatible_field(grid, rng);
    const cns::BernsteinReport r = cns::check_bernstein(grid, f.bdata, f.c);
    violations += !r.holds;
    if (r.rhs > 0.0) worst_ratio = std::max(worst_ratio, r.lhs / r.rhs);
    if (as_json)
      rows.push_back({{"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin}, {"robin_residual", r.robin_residual},
                      {"holds", r.holds}});
    else
      std::printf("%5d %14.6e %14.6e %14.6e %10.2e %8s\n", k, r.lhs, r.rhs, r.margin, r.robin_residual,
                  r.holds ? "yes" : "NO");
  }
  if (as_json)
    std::cout << json{{"fields", count}, {"resolution", res}, {"violations", violations},
                      {"max_lhs_over_rhs", worst_ratio}, {"rows", rows}}
                     .dump(2)
              << '\n';
  else
    std::printf("violations %d of %d  max lhs/rhs %.4f\n", violations, count, worst_ratio);
  return violations == 0 ? 0 : kExitViolation;
}

int cmd_eigenbasis(int nx, int ny, int m, const std::string& shape, const std::string& cache, bool as_json) {
  const cns::Grid grid = cns::Grid::build(cns::DomainSpec{parse_shape(shape), 2, nx, ny, 1.0, 1.0, {}});
  const int dim = cns::stokes_dimension(grid);
  const int mm = m == 0 ? dim : m;
  const auto t0 = std::chrono::steady_clock::now();
  const cns::StokesBasis b =
      cache.empty() ? cns::build_stokes_basis(grid, mm) : cns::load_or_build_stokes_basis(grid, mm, cache);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int shown = std::min(b.size(), 10);
  if (as_json) {
    json lam = json::array();
    for (int k = 0; k < shown; ++k) lam.push_back(b.eigenvalues()[k]);
    json out{{"stokes_dimension", dim}, {"modes", b.size()}, {"ndof", b.num_dofs()}, {"lowest", lam},
             {"wall_seconds", wall}};
    if (!cache.empty()) out["cache"] = cache;
    std::cout << out.dump(2) << '\n';
  } else {
    std::printf("stokes dimension %d  modes %d  dofs %d  (%.2fs)\n", dim, b.size(), b.num_dofs(), wall);
    for (int k = 0; k < shown; ++k) std::printf("  lambda_%d = %.10g\n", k + 1, b.eigenvalues()[k]);
    if (!cache.empty()) std::printf("cache %s\n", cache.c_str());
  }
  return 0;
}

int cmd_verify(bool as_json) {
  const std::vector<cns::ConvergenceStudy> studies = cns::verify_identities();
  if (as_json) {
    json out = json::array();
    for (const auto& s : studies)
      out.push_back({{"name", s.name}, {"resolutions", s.resolutions}, {"errors", s.errors}, {"orders", s.orders}});
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  for (const auto& s : studies) {
    std::printf("%s\n", s.name.c_str());
    for (std::size_t k = 0; k < s.errors.size(); ++k) {
      std::printf("  %5d  %.6e", s.resolutions[k], s.errors[k]);
      if (k > 0) std::printf("  order %.3f", s.orders[k - 1]);
      std::printf("\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cnsim: chemotaxis-Navier-Stokes simulator with Robin oxygen exchange"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  auto* run = app.add_subcommand("run", "Run a simulation from a config file");
  std::string config_path, csv, dump;
  run->add_option("--config,-c", config_path, "Config file")->required();
  run->add_option("--csv", csv, "Override the CSV output path");
  run->add_option("--dump", dump, "Override the field dump path");
  run->add_flag("--json", as_json, "Machine-readable output");

  auto* bern = app.add_subcommand("check-bernstein", "Sweep the Bernstein inequality over generated fields");
  int count = 200, res = 128;
  std::uint64_t seed = 1;
  std::string shape = "rectangle";
  bern->add_option("--n", count, "Number of fields");
  bern->add_option("--res", res, "Grid resolution per side");
  bern->add_option("--seed", seed, "Random seed");
  bern->add_option("--domain", shape, "rectangle or l_shape");
  bern->add_flag("--json", as_json, "Machine-readable output");

  auto* eig = app.add_subcommand("eigenbasis", "Build (and cache) the discrete Stokes eigenbasis");
  int nx = 32, ny = 32, m = 0;
  std::string cache;
  eig->add_option("--nx", nx, "Cells in x");
  eig->add_option("--ny", ny, "Cells in y");
  eig->add_option("--m", m, "Modes to keep (0 = all)");
  eig->add_option("--domain", shape, "rectangle or l_shape");
  eig->add_option("--cache", cache, "Cache file");
  eig->add_flag("--json", as_json, "Machine-readable output");

  auto* ver = app.add_subcommand("verify-identities", "Refinement studies of operators and the entropy identity");
  ver->add_flag("--json", as_json, "Machine-readable output");

  auto* version = app.add_subcommand("version", "Print the version");
  version->add_flag("--json", as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, csv, dump, as_json);
    if (*bern) return cmd_bernstein(count, res, seed, shape, as_json);
    if (*eig) return cmd_eigenbasis(nx, ny, m, shape, cache, as_json);
    if (*ver) return cmd_verify(as_json);
    if (*version) {
      if (as_json)
        std::cout << json{{"version", cns::version_string}}.dump() << '\n';
      else
        std::printf("cnsim %s\n", cns::version_string);
      return 0;
    }
  } catch (const cns::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const cns::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitViolation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitViolation;
  }
  return kExitUsage;
}
