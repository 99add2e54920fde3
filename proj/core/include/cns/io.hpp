#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "cns/energy.hpp"
#include "cns/geometry.hpp"

namespace cns {

struct State;

inline constexpr std::string_view timeseries_header =
    "t,mass_n,c_max,S,S_boundary,S_add,F,X,E,lp_n_2,lp_n_3,grad_c_l4,u_l2,grad_u_l2";

/// CSV with timeseries_header and one row per report, shortest round-trip
/// decimal representation. Throws std::runtime_error on I/O failure.
void write_timeseries(const std::vector<EnergyReport>& reports, const std::filesystem::path& path);
/// Throws std::runtime_error on I/O failure or header mismatch.
std::vector<EnergyReport> read_timeseries(const std::filesystem::path& path);

/// Text field dump. Line 1: "nx ny dx dy t" values. Then five blocks
/// separated by blank lines, in the order n, c, u_x, u_y, P; each block holds
/// the full box array row by row (j = 0 first), one row per line:
/// n, c, P are ny×nx, u_x is ny×(nx+1), u_y is (ny+1)×nx (empty in 1D).
/// Cells outside the mask are written as nan.
void dump_field(const Grid& grid, const State& state, const std::filesystem::path& path);

struct FieldDump {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double t = 0.0;
  std::vector<double> n, c, u_x, u_y, P;  ///< full box arrays, row-major
};

FieldDump read_field_dump(const std::filesystem::path& path);

}  // namespace cns
