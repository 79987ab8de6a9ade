#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lfsim/types.hpp"

namespace lfsim {

enum class Fading { kIid, kOneRing };

enum class Scheme {
  kZfbfSus,
  kFullInr,
  kFullInrGreedy,
  kPartialInr,
  kPartialInrImproved,
  kOneBitInr,
  kDftSinr,
  kRbf,
};

/// How INR schemes are charged for dedicated pilots.
enum class OverheadMode {
  kFixed,
  kGrouping,
};

/// Whether each drop redraws user geometry or the users stay put.
enum class SpreadMode { kPerDrop, kFixed };

std::string_view to_string(Fading fading);
std::string_view to_string(Scheme scheme);
std::string_view to_string(OverheadMode mode);
std::string_view to_string(SpreadMode mode);
Scheme parse_scheme(std::string_view name);
bool uses_inr_feedback(Scheme scheme);

/// One Monte Carlo sweep. Angles are in degrees here and converted at the
/// channel boundary. Every list-valued field is a grid axis.
struct ExperimentConfig {
  std::string name = "custom";
  int antennas = 4;
  std::vector<int> users{20};
  int subsets = 2;
  std::vector<double> snr_db{10.0};
  int drops = 1000;
  std::vector<Fading> fading{Fading::kOneRing};
  Range azimuth_deg{-60.0, 60.0};
  std::vector<Range> spread_deg{{5.0, 20.0}};
  double antenna_spacing = 0.5;
  SpreadMode spread_mode = SpreadMode::kPerDrop;
  /// Heterogeneous received SNR: per-user offset drawn uniform in dB.
  std::optional<Range> snr_spread_db;
  std::vector<double> err_var{0.0};
  std::vector<Scheme> schemes{Scheme::kPartialInr};
  std::optional<int> cqi_bits;
  Range cqi_range_db{-20.0, 25.0};
  double gamma_threshold = 0.01;
  double sus_epsilon = 0.3;
  OverheadMode overhead = OverheadMode::kFixed;
  double pilot_threshold_db = -20.0;
  std::uint64_t base_seed = 1;
  std::string output;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

/// Throws ConfigError describing the first invalid field.
void validate(const ExperimentConfig& config);

/// Parses the flat `key = value` format. Lists are comma separated; several
/// spread ranges are separated by ';'. '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config_text(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical text, excluding the output path and thread count.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace lfsim
