#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfsim/config.hpp"
#include "lfsim/types.hpp"

namespace lfsim {

/// One point of the sweep grid. Spread fields are unused for i.i.d. fading.
struct GridPoint {
  Fading fading = Fading::kIid;
  int spread_index = -1;
  Range spread_deg{0.0, 0.0};
  double err_var = 0.0;
  double snr_db = 10.0;
  int users = 1;
};

/// Expands the config's axes in the order fading, spread, err_var, snr, K.
/// i.i.d. fading contributes a single spread-less entry.
std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

/// One scheme evaluated on one drop at one grid point.
struct ResultRow {
  int grid = 0;
  std::int64_t drop = 0;
  Scheme scheme = Scheme::kPartialInr;
  int streams = 0;
  int subset_t = -1;
  int set_size = 0;
  std::vector<int> beams;
  std::vector<int> users;
  double predicted_rate = 0.0;
  double sum_rate_raw = 0.0;
  double sum_rate_outage = 0.0;
  double kappa = 1.0;
  double sum_rate_adjusted = 0.0;
  int pilot_symbols = -1;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values);

struct Aggregate {
  int grid = 0;
  Scheme scheme = Scheme::kPartialInr;
  int drops = 0;
  MeanSe raw;
  MeanSe adjusted;
  MeanSe outage;
  double mean_streams = 0.0;
};

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::vector<GridPoint> grid;
  std::vector<ResultRow> rows;
  std::vector<Aggregate> aggregates;

  /// Rows of one scheme at one grid point, in drop order.
  std::vector<const ResultRow*> select(int grid_index, Scheme scheme) const;
  const Aggregate& aggregate(int grid_index, Scheme scheme) const;
};

/// Mean and standard error per (grid point, scheme), in grid-then-scheme order.
std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows, int grid_points,
                                      const std::vector<Scheme>& schemes);

/// Called after each finished (grid point, drop) task with (done, total).
using ProgressFn = std::function<void(std::int64_t, std::int64_t)>;

/// Runs every drop of every grid point for every scheme. Drops run on worker
/// threads; rows come back ordered by grid point, then drop, then scheme, so
/// the output does not depend on the thread count. When config.output is
/// set, writes the rows CSV there and the aggregates next to it
/// (`<output>.summary.csv`).
RunRecord run_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

inline constexpr int kCsvSchemaVersion = 1;

void write_rows_csv(std::ostream& out, const ExperimentConfig& config, const RunRecord& record);
void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const RunRecord& record);

/// Reads back a rows CSV written by write_rows_csv (header comment included).
std::vector<ResultRow> read_rows_csv(std::istream& in);

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// Desk-scale configurations mirroring the figure setups. Throws ConfigError
/// for an unknown name.
ExperimentConfig preset(std::string_view name);

}  // namespace lfsim
