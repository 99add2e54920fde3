#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "cns/io.hpp"
#include "cns/simulation.hpp"

using namespace cns;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cns_io_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

EnergyReport random_report(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  EnergyReport r;
  for (double* f : {&r.t, &r.mass_n, &r.c_max, &r.S, &r.S_boundary, &r.S_add, &r.F, &r.X, &r.E, &r.lp_n_2, &r.lp_n_3,
                    &r.grad_c_l4, &r.u_l2, &r.grad_u_l2})
    *f = U(rng) * std::pow(10.0, static_cast<int>(U(rng) / 100));
  return r;
}

}  // namespace

TEST(Timeseries, EmptySeriesWritesHeaderOnly) {
  const auto p = temp_path("empty.csv");
  write_timeseries({}, p);
  EXPECT_EQ(slurp(p), std::string(timeseries_header) + "\n");
  EXPECT_TRUE(read_timeseries(p).empty());
  std::filesystem::remove(p);
}

TEST(Timeseries, RoundTripIsBitwise) {
  std::mt19937_64 rng(8);
  std::vector<EnergyReport> in;
  for (int k = 0; k < 25; ++k) in.push_back(random_report(rng));
  in[3].S = 0.1;
  in[4].E = 1.0 / 3.0;
  const auto p = temp_path("rt.csv");
  write_timeseries(in, p);
  const std::vector<EnergyReport> out = read_timeseries(p);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    EXPECT_TRUE(same_bits(out[k].t, in[k].t));
    EXPECT_TRUE(same_bits(out[k].S, in[k].S));
    EXPECT_TRUE(same_bits(out[k].X, in[k].X));
    EXPECT_TRUE(same_bits(out[k].E, in[k].E));
    EXPECT_TRUE(same_bits(out[k].grad_u_l2, in[k].grad_u_l2));
  }
  std::filesystem::remove(p);
}

TEST(Timeseries, PermutedHeaderRejected) {
  const auto p = temp_path("perm.csv");
  {
    std::ofstream os(p);
    os << "mass_n,t,c_max,S,S_boundary,S_add,F,X,E,lp_n_2,lp_n_3,grad_c_l4,u_l2,grad_u_l2\n";
  }
  EXPECT_THROW(read_timeseries(p), std::runtime_error);
  EXPECT_THROW(read_timeseries(temp_path("missing.csv")), std::runtime_error);
  std::filesystem::remove(p);
}

TEST(FieldDump, RoundTripWithMask) {
  RunConfig cfg = parse_config("preset = random\ndomain = l_shape\nnx = 10\nny = 8\n");
  Simulation sim(cfg);
  sim.step();
  const State& s = sim.state();
  const Grid& g = sim.grid();
  const auto p = temp_path("dump.txt");
  dump_field(g, s, p);
  const FieldDump d = read_field_dump(p);
  EXPECT_EQ(d.nx, 10);
  EXPECT_EQ(d.ny, 8);
  EXPECT_TRUE(same_bits(d.dx, g.dx()));
  EXPECT_TRUE(same_bits(d.dy, g.dy()));
  EXPECT_TRUE(same_bits(d.t, s.t));
  ASSERT_EQ(d.n.size(), 80u);
  ASSERT_EQ(d.u_x.size(), 88u);
  ASSERT_EQ(d.u_y.size(), 90u);
  ASSERT_EQ(d.P.size(), 80u);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 10; ++i) {
      const int c = g.index(i, j);
      const double v = d.n[j * 10 + i];
      if (c < 0) {
        EXPECT_TRUE(std::isnan(v));
      } else {
        EXPECT_TRUE(same_bits(v, s.n[c]));
        EXPECT_TRUE(same_bits(d.c[j * 10 + i], s.c[c]));
        EXPECT_TRUE(same_bits(d.P[j * 10 + i], s.P[c]));
      }
    }
  for (int f = 0; f < g.num_x_faces(); ++f)
    if (!std::isnan(d.u_x[f])) EXPECT_TRUE(same_bits(d.u_x[f], s.u.x[f]));
  for (int f = 0; f < g.num_y_faces(); ++f)
    if (!std::isnan(d.u_y[f])) EXPECT_TRUE(same_bits(d.u_y[f], s.u.y[f]));
  std::filesystem::remove(p);
}

TEST(FieldDump, HeaderLine) {
  RunConfig cfg = parse_config("nx = 4\nny = 3\n");
  Simulation sim(cfg);
  const auto p = temp_path("hdr.txt");
  dump_field(sim.grid(), sim.state(), p);
  std::ifstream is(p);
  int nx, ny;
  double dx, dy, t;
  is >> nx >> ny >> dx >> dy >> t;
  EXPECT_EQ(nx, 4);
  EXPECT_EQ(ny, 3);
  EXPECT_DOUBLE_EQ(dx, 0.25);
  EXPECT_DOUBLE_EQ(dy, 1.0 / 3.0);
  EXPECT_EQ(t, 0.0);
  std::filesystem::remove(p);
}
