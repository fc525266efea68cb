#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emfreeze/emergent.hpp"

namespace emfreeze {

/// Invalid configuration text. The message names the offending section.key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  fig2_entropy,
  fig2_hamming_schmidt,
  fig3_single_particle,
  fig4_overlap,
  fig5_overlap_jcross,
  fig6_spectral,
  fig7_ghz,
  freeze_demo,
  custom,
};

enum class InitialState {
  none,  // only the particle number matters (spectral statistics)
  density_wave,
  domain_wall,
  single_corner,
  two_corners,
  three_corner_cluster,
  dicke_minus_y,
  explicit_sites,
};

enum class HfModel {
  transfer,              // perfect-transfer chain / rectangle (+ diagonal j_cross)
  two_spin_interacting,  // S1x + S2x + S1x S2x, single excitation
  oat,                   // -lambda Sz^2 on the Dicke sector
};

std::string_view to_string(Experiment e);
std::string_view to_string(InitialState s);
std::string_view to_string(HfModel m);

/// The eight named reproductions (custom excluded).
const std::vector<Experiment>& named_experiments();

struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;              // 0: no uniform grid, only `extra`
  std::vector<double> extra;  // additional sample times

  /// Sorted union of the uniform grid and the extra samples, duplicates merged.
  std::vector<double> times() const;
  bool operator==(const TimeGrid&) const = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::custom;

  bool rectangle = false;
  std::vector<std::pair<int, int>> sizes;  // (L, 1) for chains

  InitialState state = InitialState::none;
  std::vector<int> sites;  // explicit_sites only
  int particles = 0;       // InitialState::none only

  HfModel hf = HfModel::transfer;
  std::vector<double> j_cross{0.0};
  double lambda = 1.0;
  std::vector<int> qubits;  // OAT only

  std::vector<EmergentTag> variants;

  TimeGrid time;
  std::optional<double> t_freeze;

  std::string output_dir = "out";
  int histogram_bins = 0;  // 0: Freedman-Diaconis

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses INI text. Missing keys take the experiment's defaults; unknown
/// sections or keys, malformed values and inconsistent combinations throw
/// ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// INI text listing every field explicitly; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& cfg);

/// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace emfreeze
