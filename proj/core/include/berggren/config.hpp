#pragma once

// Run configuration: a JSON document with a versioned schema. Every key is
// optional and defaults to the values below; unknown keys are rejected.
//
// {
//   "schema_version": 1,
//   "potential": {"V_o": 52, "V_so": 5, "R_0": 3, "d": 0.65,      // MeV, MeV, fm, fm
//                 "alpha": 0.443113,                              // fm^-1, default 3 sqrt(pi)/(4 R_0)
//                 "C_c": 1.43996, "hbar2_over_2m": 20.749,        // MeV fm, MeV fm^2
//                 "Z_basis": 10, "Z_diag": 8},
//   "waves": ["s12", "d52", "d32"],
//   "schemes": ["cut", "sub", "offdiag"],
//   "n_gl": [15, 30, 45, 60, 75, 90, 105, 120],
//   "contour": {"k_min": null,            // fm^-1, null resolves it per wave
//               "kmin_target": 1e-5,
//               "cut_from_origin": true,  // cut scheme contours start at k = 0
//               "vertices": {"d32": [[0.4, -0.39], [1, 0], [4, 0]]}},  // fm^-1, after k_min
//   "grid": {"R": 15, "n_nodes": 300, "n_probe": 512},                  // fm
//   "rotation": {"R": 15, "panel_threshold": 1e-15},                    // fm
//   "cut": {"R_cut": null, "panel": 2, "nodes_per_panel": 24},          // fm; null: 35 for d3/2, else 75
//   "quadstudy": {"alphas": [0.25, 0.45, 0.65, "point"], "k_max": [1, 2, 4],
//                 "n_gl": [50, 100, 200], "radial_nodes": 300, "radial_R": 30},
//   "output": {"path": "", "digits": 0}  // digits 0: shortest round-trip numbers
// }

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "berggren/exterior.hpp"
#include "berggren/kernel.hpp"
#include "berggren/potential.hpp"
#include "berggren/quadstudy.hpp"

namespace berggren {

inline constexpr int kConfigSchemaVersion = 1;

/// "s12", "d52", "d32" and so on; throws ConfigurationError.
PartialWave wave_from_string(std::string_view tag);
std::string wave_tag(const PartialWave& pw);

struct ContourConfig {
  std::optional<double> k_min;
  double kmin_target = 1e-5;
  bool cut_from_origin = true;
  std::map<std::string, std::vector<cplx>> vertices;  // keyed by wave tag

  bool operator==(const ContourConfig&) const = default;
};

struct GridConfig {
  double R = 15.0;
  int n_nodes = 300;
  int n_probe = 512;

  bool operator==(const GridConfig&) const = default;
};

struct CutConfig {
  std::optional<double> R_cut;
  double panel = 2.0;
  int nodes_per_panel = 24;

  bool operator==(const CutConfig&) const = default;
};

struct QuadstudyConfig {
  std::vector<std::optional<double>> alphas = {0.25, 0.45, 0.65, std::nullopt};
  std::vector<double> k_max = {1.0, 2.0, 4.0};
  std::vector<int> n_gl = {50, 100, 200};
  int radial_nodes = 300;
  double radial_R = 30.0;

  bool operator==(const QuadstudyConfig&) const = default;

  /// Cartesian product in alpha, k_max, n_gl order.
  std::vector<StudyConfig> sweep(const PotentialParams& p, double Z_diag) const;
};

struct OutputConfig {
  std::string path;
  int digits = 0;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  PotentialParams potential;  // Z_c is the basis charge
  double Z_diag = 8.0;
  std::vector<PartialWave> waves = {PartialWave{0, 1}, PartialWave{2, 5}, PartialWave{2, 3}};
  std::vector<Scheme> schemes = {Scheme::cut, Scheme::subtraction, Scheme::offdiag};
  std::vector<int> n_gl = {15, 30, 45, 60, 75, 90, 105, 120};
  ContourConfig contour;
  GridConfig grid;
  RotationPolicy rotation;
  CutConfig cut;
  QuadstudyConfig quadstudy;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigurationError on inconsistent values or empty sweeps.
  void validate() const;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
/// Full effective configuration; parse_config(to_json_text(c)) == c.
std::string to_json_text(const RunConfig& config);

}  // namespace berggren
