#include "cns/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cns/simulation.hpp"

namespace cns {

namespace {

void put(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("cannot parse number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_timeseries(const std::vector<EnergyReport>& reports, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << timeseries_header << '\n';
  for (const EnergyReport& r : reports) {
    const double row[] = {r.t, r.mass_n, r.c_max, r.S,         r.S_boundary, r.S_add, r.F,
                          r.X, r.E,      r.lp_n_2, r.lp_n_3, r.grad_c_l4,  r.u_l2,  r.grad_u_l2};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      if (k) os << ',';
      put(os, row[k]);
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("error writing " + path.string());
}

std::vector<EnergyReport> read_timeseries(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != timeseries_header)
    throw std::runtime_error(path.string() + ": unexpected time-series header");
  std::vector<EnergyReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 14) throw std::runtime_error(path.string() + ": expected 14 columns");
    EnergyReport r;
    double* dst[] = {&r.t, &r.mass_n, &r.c_max, &r.S,      &r.S_boundary, &r.S_add, &r.F,
                     &r.X, &r.E,      &r.lp_n_2, &r.lp_n_3, &r.grad_c_l4,  &r.u_l2,  &r.grad_u_l2};
    for (std::size_t k = 0; k < f.size(); ++k) *dst[k] = parse_double(f[k]);
    out.push_back(r);
  }
  return out;
}

void dump_field(const Grid& g, const State& s, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  os << g.nx() << ' ' << g.ny() << ' ';
  put(os, g.dx());
  os << ' ';
  put(os, g.dy());
  os << ' ';
  put(os, s.t);
  os << '\n';

  auto cell_block = [&](const ScalarField& f) {
    os << '\n';
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        if (i) os << ' ';
        const int c = g.index(i, j);
        put(os, c >= 0 && f.size() ? f[c] : nan);
      }
      os << '\n';
    }
  };
  cell_block(s.n);
  cell_block(s.c);
  os << '\n';
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i <= g.nx(); ++i) {
      if (i) os << ' ';
      const bool touches = g.inside(i - 1, j) || g.inside(i, j);
      put(os, touches ? s.u.x[g.x_face(i, j)] : nan);
    }
    os << '\n';
  }
  os << '\n';
  if (g.dim() == 2)
    for (int j = 0; j <= g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        if (i) os << ' ';
        const bool touches = g.inside(i, j - 1) || g.inside(i, j);
        put(os, touches ? s.u.y[g.y_face(i, j)] : nan);
      }
      os << '\n';
    }
  cell_block(s.P);
  if (!os) throw std::runtime_error("error writing " + path.string());
}

FieldDump read_field_dump(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  FieldDump d;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty dump");
  {
    const auto f = split(line, ' ');
    if (f.size() != 5) throw std::runtime_error(path.string() + ": malformed header");
    d.nx = static_cast<int>(parse_double(f[0]));
    d.ny = static_cast<int>(parse_double(f[1]));
    d.dx = parse_double(f[2]);
    d.dy = parse_double(f[3]);
    d.t = parse_double(f[4]);
  }
  // Blocks are delimited by single blank lines; an empty block (u_y in 1D)
  // shows up as two consecutive blank lines.
  std::vector<std::vector<double>> blocks;
  std::vector<double>* cur = nullptr;
  while (std::getline(is, line)) {
    if (line.empty()) {
      blocks.emplace_back();
      cur = &blocks.back();
      continue;
    }
    if (!cur) throw std::runtime_error(path.string() + ": missing block separator");
    for (auto tok : split(line, ' ')) cur->push_back(parse_double(tok));
  }
  if (blocks.size() != 5) throw std::runtime_error(path.string() + ": expected 5 field blocks");
  d.n = std::move(blocks[0]);
  d.c = std::move(blocks[1]);
  d.u_x = std::move(blocks[2]);
  d.u_y = std::move(blocks[3]);
  d.P = std::move(blocks[4]);
  const std::size_t cells = static_cast<std::size_t>(d.nx) * d.ny;
  if (d.n.size() != cells || d.c.size() != cells || d.P.size() != cells ||
      d.u_x.size() != static_cast<std::size_t>(d.nx + 1) * d.ny)
    throw std::runtime_error(path.string() + ": block sizes do not match the header");
  return d;
}

}  // namespace cns
