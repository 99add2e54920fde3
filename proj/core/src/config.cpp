#include "cns/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cns/errors.hpp"

namespace cns {

namespace pt = boost::property_tree;

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"equilibrium", "aerotaxis_drop", "uniform", "oxygen_fill", "random"};
  return names;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "domain",       "dim",          "nx",           "ny",          "lx",          "ly",
      "mask_file",    "t_final",      "dt",           "cfl",         "dt_max",      "mu",
      "epsilon",      "mode",         "galerkin_m",   "basis_cache", "preset",      "n_mean",
      "c_level",      "blob_amplitude", "blob_x",     "blob_y",      "blob_width",  "u_amplitude",
      "noise",        "kappa",        "kappa_west",   "kappa_east",  "kappa_south", "kappa_north",
      "gamma",        "gamma_west",   "gamma_east",   "gamma_south", "gamma_north", "gravity_x",
      "gravity_y",    "output_every", "seed",         "K",           "L",           "csv",
      "dump",         "check_invariants", "splitting", "linear_solver", "solver_tolerance"};
  return keys;
}

template <class T>
T get_as(const pt::ptree& tree, const std::string& key) {
  const std::string raw = tree.get<std::string>(key);
  std::istringstream is(raw);
  T v{};
  is >> v;
  if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("config: invalid value '" + raw + "' for key '" + key + "'");
  return v;
}

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  if (tree.count(key)) out = get_as<T>(tree, key);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: invalid boolean '" + v + "' for key '" + key + "'");
}

std::vector<std::uint8_t> read_mask_file(const std::string& path, int& nx, int& ny) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open mask file " + path);
  std::vector<std::string> rows;
  for (std::string line; std::getline(is, line);) {
    line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }),
               line.end());
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("config: empty mask file " + path);
  nx = static_cast<int>(rows.front().size());
  ny = static_cast<int>(rows.size());
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny);
  // First line is the top row.
  for (int r = 0; r < ny; ++r) {
    if (static_cast<int>(rows[r].size()) != nx) throw ConfigError("config: ragged mask file " + path);
    const int j = ny - 1 - r;
    for (int i = 0; i < nx; ++i) {
      const char ch = rows[r][i];
      if (ch != '0' && ch != '1') throw ConfigError("config: mask file must contain only 0 and 1");
      mask[j * nx + i] = ch == '1';
    }
  }
  return mask;
}

void apply_preset_defaults(RunConfig& cfg) {
  const std::string& p = cfg.initial.preset;
  if (p == "aerotaxis_drop") {
    cfg.boundary.kappa = {0.0, 0.0, 0.0, 1.0};
    cfg.gravity_y = 1.0;
    cfg.initial.blob_y = 0.7;
  } else if (p == "oxygen_fill" || p == "equilibrium") {
    // c ≡ γ is stationary only without consumption
    cfg.initial.n_mean = 0.0;
  } else if (p == "random") {
    cfg.initial.noise = 0.2;
    cfg.initial.u_amplitude = 0.1;
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [key, child] : tree) {
    if (!child.empty()) throw ConfigError("config: sections are not supported ('" + key + "')");
    if (!known_keys().count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }

  RunConfig cfg;
  read(tree, "preset", cfg.initial.preset);
  apply_preset_defaults(cfg);

  std::string domain = "rectangle";
  read(tree, "domain", domain);
  if (domain == "rectangle")
    cfg.domain.shape = DomainShape::rectangle;
  else if (domain == "l_shape")
    cfg.domain.shape = DomainShape::l_shape;
  else if (domain == "mask")
    cfg.domain.shape = DomainShape::mask;
  else
    throw ConfigError("config: unknown domain '" + domain + "'");
  cfg.domain.nx = 32;
  cfg.domain.ny = 32;
  read(tree, "dim", cfg.domain.dim);
  read(tree, "nx", cfg.domain.nx);
  read(tree, "ny", cfg.domain.ny);
  read(tree, "lx", cfg.domain.lx);
  read(tree, "ly", cfg.domain.ly);
  if (cfg.domain.dim == 1) cfg.domain.ny = 1;
  if (cfg.domain.shape == DomainShape::mask) {
    if (!tree.count("mask_file")) throw ConfigError("config: domain = mask requires mask_file");
    cfg.domain.mask = read_mask_file(tree.get<std::string>("mask_file"), cfg.domain.nx, cfg.domain.ny);
  }

  read(tree, "t_final", cfg.t_final);
  read(tree, "dt", cfg.dt);
  read(tree, "cfl", cfg.cfl);
  read(tree, "dt_max", cfg.dt_max);
  read(tree, "mu", cfg.mu);
  read(tree, "epsilon", cfg.epsilon);
  if (tree.count("mode")) {
    const std::string m = tree.get<std::string>("mode");
    if (m == "projection")
      cfg.mode = FluidMode::projection;
    else if (m == "galerkin")
      cfg.mode = FluidMode::galerkin;
    else
      throw ConfigError("config: unknown mode '" + m + "'");
  }
  read(tree, "galerkin_m", cfg.galerkin_m);
  read(tree, "basis_cache", cfg.basis_cache);

  InitialSpec& ic = cfg.initial;
  read(tree, "n_mean", ic.n_mean);
  read(tree, "c_level", ic.c_level);
  read(tree, "blob_amplitude", ic.blob_amplitude);
  read(tree, "blob_x", ic.blob_x);
  read(tree, "blob_y", ic.blob_y);
  read(tree, "blob_width", ic.blob_width);
  read(tree, "u_amplitude", ic.u_amplitude);
  read(tree, "noise", ic.noise);

  static const char* side_names[] = {"west", "east", "south", "north"};
  if (tree.count("kappa")) cfg.boundary.kappa.fill(get_as<double>(tree, "kappa"));
  if (tree.count("gamma")) cfg.boundary.gamma.fill(get_as<double>(tree, "gamma"));
  for (int s = 0; s < 4; ++s) {
    read(tree, std::string("kappa_") + side_names[s], cfg.boundary.kappa[s]);
    read(tree, std::string("gamma_") + side_names[s], cfg.boundary.gamma[s]);
  }
  read(tree, "gravity_x", cfg.gravity_x);
  read(tree, "gravity_y", cfg.gravity_y);

  read(tree, "output_every", cfg.output_every);
  read(tree, "seed", cfg.seed);
  if (tree.count("K")) cfg.K = get_as<double>(tree, "K");
  if (tree.count("L")) cfg.L = get_as<double>(tree, "L");
  read(tree, "csv", cfg.csv_path);
  read(tree, "dump", cfg.dump_path);
  if (tree.count("check_invariants"))
    cfg.check_invariants = parse_bool("check_invariants", tree.get<std::string>("check_invariants"));
  if (tree.count("splitting")) {
    cfg.splitting.clear();
    std::istringstream is(tree.get<std::string>("splitting"));
    for (std::string item; std::getline(is, item, ',');) {
      item.erase(std::remove_if(item.begin(), item.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }),
                 item.end());
      if (item == "fluid")
        cfg.splitting.push_back(Subsystem::fluid);
      else if (item == "oxygen")
        cfg.splitting.push_back(Subsystem::oxygen);
      else if (item == "density")
        cfg.splitting.push_back(Subsystem::density);
      else
        throw ConfigError("config: unknown subsystem '" + item + "' in splitting");
    }
  }
  if (tree.count("linear_solver")) {
    try {
      cfg.solver.kind = parse_linear_solver(tree.get<std::string>("linear_solver"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  read(tree, "solver_tolerance", cfg.solver.tolerance);

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (c.domain.dim != 1 && c.domain.dim != 2) fail("dim must be 1 or 2");
  if (!(c.domain.lx > 0.0) || !(c.domain.ly > 0.0)) fail("lx and ly must be positive");
  if (!(c.t_final > 0.0)) fail("t_final must be positive");
  if (c.dt < 0.0) fail("dt must be positive (or 0 for automatic steps)");
  if (c.dt == 0.0 && !(c.cfl > 0.0 && c.cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(c.dt_max > 0.0)) fail("dt_max must be positive");
  if (!(c.mu > 0.0)) fail("mu must be positive");
  if (c.epsilon < 0.0) fail("epsilon must be >= 0");
  if (c.galerkin_m < 0) fail("galerkin_m must be >= 0");
  if (c.mode == FluidMode::galerkin && c.domain.dim != 2) fail("galerkin mode requires dim = 2");
  if (std::find(preset_names().begin(), preset_names().end(), c.initial.preset) == preset_names().end())
    fail("unknown preset '" + c.initial.preset + "'");
  if (c.initial.n_mean < 0.0) fail("n_mean must be >= 0");
  if (!(c.initial.blob_width > 0.0)) fail("blob_width must be positive");
  if (c.initial.noise < 0.0 || c.initial.noise >= 1.0) fail("noise must lie in [0, 1)");
  for (double k : c.boundary.kappa)
    if (k < 0.0) fail("kappa must be >= 0");
  for (double g : c.boundary.gamma)
    if (!(g > 0.0)) fail("gamma must be positive");
  if (c.output_every < 1) fail("output_every must be >= 1");
  if (c.K && !(*c.K > 0.0)) fail("K must be positive");
  if (c.L && !(*c.L > 0.0)) fail("L must be positive");
  if (c.splitting.empty()) fail("splitting must name at least one subsystem");
  if (!(c.solver.tolerance > 0.0)) fail("solver_tolerance must be positive");
}

}  // namespace cns
