#include "fbh/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fbh/twoplane.hpp"

namespace fbh {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

ConfigText ConfigText::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

ConfigText ConfigText::parse_string(const std::string& text) {
  ConfigText cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigInvalid("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigInvalid("config line " + std::to_string(lineno) + ": empty key");
    cfg.sections[section][key] = value;
  }
  return cfg;
}

bool ConfigText::has(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string ConfigText::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  const auto kt = it->second.find(key);
  return kt == it->second.end() ? fallback : kt->second;
}

double ConfigText::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    return std::stod(v);
  } catch (...) {
    throw ConfigInvalid("config key " + section + "." + key + ": not a number: " + v);
  }
}

int ConfigText::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    return std::stoi(v);
  } catch (...) {
    throw ConfigInvalid("config key " + section + "." + key + ": not an integer: " + v);
  }
}

std::uint64_t ConfigText::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    return std::stoull(v);
  } catch (...) {
    throw ConfigInvalid("config key " + section + "." + key + ": not an integer: " + v);
  }
}

std::vector<double> ConfigText::get_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  std::istringstream in(get(section, key, ""));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw ConfigInvalid("config key " + section + "." + key + ": bad list entry: " + tok);
    }
  }
  if (out.empty())
    throw ConfigInvalid("config key " + section + "." + key + ": empty list");
  return out;
}

void ConfigText::reject_unknown(
    const std::map<std::string, std::vector<std::string>>& schema) const {
  for (const auto& [section, kv] : sections) {
    const auto it = schema.find(section);
    if (it == schema.end()) throw ConfigInvalid("unknown config section: [" + section + "]");
    for (const auto& [key, _] : kv) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigInvalid("unknown config key: " + section + "." + key);
    }
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_text(ConfigText::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_text(const ConfigText& t) {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"medium", {"preset", "lambda", "contrast", "cell_resolution", "file"}},
      {"grid", {"dim", "radius", "h"}},
      {"boundary", {"kind", "alpha", "nu", "offset", "bump", "file"}},
      {"minimize",
       {"max_outer", "descent_steps", "epsilon_schedule", "accept_rel", "converge_rel",
        "solver_tol", "two_plane_start"}},
      {"profile", {"what", "radii"}},
      {"homerror", {"gamma", "microscale", "radii"}},
      {"transmission", {"alpha", "data"}},
      {"run", {"seed", "threads"}},
  };
  t.reject_unknown(schema);

  ExperimentConfig c;
  c.medium = t.get("medium", "preset", c.medium);
  c.lambda = t.get_double("medium", "lambda", 0.0);
  c.contrast = t.get_double("medium", "contrast", c.contrast);
  c.cell_resolution = t.get_int("medium", "cell_resolution", c.cell_resolution);
  c.medium_file = t.get("medium", "file", "");

  c.dim = t.get_int("grid", "dim", c.dim);
  c.radius = t.get_double("grid", "radius", c.radius);
  c.h = t.get_double("grid", "h", c.h);

  c.boundary_kind = t.get("boundary", "kind", c.boundary_kind);
  c.alpha = t.get_double("boundary", "alpha", c.alpha);
  const auto nu = t.get_list("boundary", "nu", {0.0, 1.0});
  c.nu = Vec2(nu[0], nu.size() > 1 ? nu[1] : 0.0);
  if (c.nu.norm() == 0.0) throw ConfigInvalid("boundary.nu must be nonzero");
  c.nu.normalize();
  c.offset = t.get_double("boundary", "offset", c.offset);
  c.bump = t.get_double("boundary", "bump", c.bump);
  c.boundary_file = t.get("boundary", "file", "");
  if (c.boundary_kind != "two_plane" && c.boundary_kind != "file")
    throw ConfigInvalid("boundary.kind must be two_plane or file");
  if (c.boundary_kind == "file" && c.boundary_file.empty())
    throw ConfigInvalid("boundary.kind = file requires boundary.file");

  c.minimize.max_outer = t.get_int("minimize", "max_outer", c.minimize.max_outer);
  c.minimize.descent_steps = t.get_int("minimize", "descent_steps", c.minimize.descent_steps);
  c.minimize.epsilon_schedule = t.get_list("minimize", "epsilon_schedule", {});
  for (size_t i = 1; i < c.minimize.epsilon_schedule.size(); ++i)
    if (!(c.minimize.epsilon_schedule[i] < c.minimize.epsilon_schedule[i - 1]))
      throw ConfigInvalid("minimize.epsilon_schedule must be descending");
  for (double e : c.minimize.epsilon_schedule)
    if (!(e > 0.0)) throw ConfigInvalid("minimize.epsilon_schedule must be positive");
  c.minimize.accept_rel = t.get_double("minimize", "accept_rel", c.minimize.accept_rel);
  c.minimize.converge_rel = t.get_double("minimize", "converge_rel", c.minimize.converge_rel);
  c.minimize.solver_tol = t.get_double("minimize", "solver_tol", c.minimize.solver_tol);
  c.minimize.two_plane_start = t.get_int("minimize", "two_plane_start", 1) != 0;

  c.what = t.get("profile", "what", c.what);
  c.radii = t.get_list("profile", "radii", c.radii);

  c.gamma = t.get_double("homerror", "gamma", c.gamma);
  c.microscale = t.get_double("homerror", "microscale", c.microscale);
  if (t.has("homerror", "radii")) c.radii = t.get_list("homerror", "radii", c.radii);

  const std::string ta = t.get("transmission", "alpha", "");
  if (!ta.empty()) {
    if (ta == "inf" || ta == "infinity") {
      c.t_alpha_infinite = true;
    } else {
      c.t_alpha = t.get_double("transmission", "alpha", c.t_alpha);
    }
  }
  c.t_data = t.get("transmission", "data", "");

  c.seed = t.get_u64("run", "seed", c.seed);
  c.minimize.seed = c.seed;
  return c;
}

CoefficientField ExperimentConfig::build_field() const {
  CoefficientField f;
  if (medium == "custom") {
    if (medium_file.empty()) throw ConfigInvalid("medium.preset = custom requires medium.file");
    std::ifstream in(medium_file);
    if (!in) throw ConfigInvalid("cannot open medium file: " + medium_file);
    nlohmann::json j;
    in >> j;
    f.dim = dim;
    f.lambda = j.value("lambda", 2.0);
    f.cell_resolution = j.at("resolution").get<int>();
    const auto read = [&](const char* key, Arr& dst, bool required) {
      const int count =
          f.dim == 1 ? f.cell_resolution : f.cell_resolution * f.cell_resolution;
      if (!j.contains(key)) {
        if (required) throw ConfigInvalid(std::string("medium file missing ") + key);
        dst = Arr::Zero(count);
        return;
      }
      const auto v = j.at(key).get<std::vector<double>>();
      if (static_cast<int>(v.size()) != count)
        throw ConfigInvalid(std::string("medium file: ") + key + " has wrong length");
      dst = Eigen::Map<const Arr>(v.data(), count);
    };
    read("a11", f.a11, true);
    read("a22", f.a22, dim == 2);
    read("a12", f.a12, false);
    read("qplus", f.qplus, true);
    read("qminus", f.qminus, true);
    f.validate();
  } else {
    f = make_preset_field(medium, dim, cell_resolution);
    if (medium == "checkerboard" && contrast != 2.0)
      f = make_checkerboard_field(contrast, cell_resolution);
  }
  if (lambda > 0.0) {
    f.lambda = lambda;
    f.validate();
  }
  return normalize_coefficients(f);
}

Grid ExperimentConfig::build_grid() const { return Grid(dim, radius, h); }

GridFunction ExperimentConfig::boundary_data(const Grid& g) const {
  if (boundary_kind == "file") {
    GridFunction u = read_gridfunction(boundary_file);
    if (!u.grid.same_layout(g))
      throw ConfigInvalid("boundary file grid does not match [grid] settings");
    return u;
  }
  const double R = g.R, a = alpha, off = offset, amp = bump;
  const Vec2 dir = nu;
  const int dm = g.dim;
  return GridFunction::sample(g, [=](double x, double y) {
    const double s = x * dir[0] + (dm == 2 ? y * dir[1] : 0.0);
    double b = 0.0;
    if (amp != 0.0) {
      b = amp * std::cos(kPi * x / (2.0 * R));
      if (dm == 2) b *= std::cos(kPi * y / (2.0 * R));
    }
    return phi(a, s + off + b);
  });
}

}  // namespace fbh
