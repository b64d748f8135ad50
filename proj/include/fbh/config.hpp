#ifndef FBH_CONFIG_HPP
#define FBH_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fbh/coefficients.hpp"
#include "fbh/grid.hpp"
#include "fbh/minimize.hpp"
#include "fbh/types.hpp"

namespace fbh {

/// Line-oriented `key = value` text with [section] headers, # comments, no
/// includes. Unknown sections and keys are rejected with the offending name.
struct ConfigText {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigText parse_file(const std::string& path);
  static ConfigText parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  /// Throws ConfigInvalid naming the first section/key outside the schema.
  void reject_unknown(
      const std::map<std::string, std::vector<std::string>>& schema) const;
};

struct ExperimentConfig {
  // [medium]
  std::string medium = "constant";
  double lambda = 0.0;  // 0 = preset default
  double contrast = 2.0;
  int cell_resolution = 128;
  std::string medium_file;
  // [grid]
  int dim = 2;
  double radius = 8.0;
  double h = 0.125;
  // [boundary]
  std::string boundary_kind = "two_plane";  // two_plane | file
  double alpha = 1.0;
  Vec2 nu = Vec2(0.0, 1.0);
  double offset = 0.0;
  double bump = 0.0;
  std::string boundary_file;
  // [minimize]
  MinimizeConfig minimize;
  // [profile]
  std::string what = "gradient";
  std::vector<double> radii = {4.0, 8.0};
  // [homerror]
  double gamma = 0.25;
  double microscale = 4.0;
  // [transmission]
  double t_alpha = 1.0;
  bool t_alpha_infinite = false;
  std::string t_data;
  // [run]
  std::uint64_t seed = 1;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_text(const ConfigText& text);

  CoefficientField build_field() const;
  Grid build_grid() const;
  /// Boundary data sampled on the grid: a two-plane profile
  /// PHI_alpha(x.nu + offset + bump * cos(pi x1 / 2R) cos(pi x2 / 2R)), or the
  /// contents of boundary_file.
  GridFunction boundary_data(const Grid& g) const;
};

}  // namespace fbh

#endif
