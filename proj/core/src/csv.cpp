#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "lfsim/harness.hpp"

namespace lfsim {

namespace {

constexpr std::string_view kRowsHeader =
    "grid,drop,M,K,T,snr_db,fading,spread_lo_deg,spread_hi_deg,err_var,scheme,S,subset_t,"
    "set_size,beams,users,predicted_rate,sum_rate_raw,sum_rate_outage,kappa,sum_rate_adjusted,"
    "pilot_symbols";

constexpr std::string_view kSummaryHeader =
    "grid,M,K,T,snr_db,fading,spread_lo_deg,spread_hi_deg,err_var,scheme,drops,mean_rate,"
    "se_rate,mean_adjusted,se_adjusted,mean_outage,se_outage,mean_S";

std::string point_fields(const ExperimentConfig& config, const GridPoint& g) {
  const bool ring = g.fading == Fading::kOneRing;
  return fmt::format("{},{},{},{:.17g},{},{},{},{:.17g}", config.antennas, g.users,
                     config.subsets, g.snr_db, to_string(g.fading),
                     ring ? fmt::format("{:.17g}", g.spread_deg.lo) : std::string("nan"),
                     ring ? fmt::format("{:.17g}", g.spread_deg.hi) : std::string("nan"),
                     g.err_var);
}

void write_header_comment(std::ostream& out, const RunRecord& record, std::string_view kind,
                          const ExperimentConfig& config) {
  fmt::print(out, "# lfsim-{} schema={} config_hash={:016x} preset={}\n", kind,
             kCsvSchemaVersion, record.config_hash, config.name);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& field) {
  std::vector<int> out;
  if (field.empty()) {
    return out;
  }
  std::istringstream in(field);
  std::string item;
  while (std::getline(in, item, ';')) {
    out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace

void write_rows_csv(std::ostream& out, const ExperimentConfig& config, const RunRecord& record) {
  write_header_comment(out, record, "run", config);
  out << kRowsHeader << '\n';
  for (const auto& r : record.rows) {
    const GridPoint& g = record.grid[static_cast<std::size_t>(r.grid)];
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
               r.grid, r.drop, point_fields(config, g), to_string(r.scheme), r.streams,
               r.subset_t, r.set_size, fmt::join(r.beams, ";"), fmt::join(r.users, ";"),
               r.predicted_rate, r.sum_rate_raw, r.sum_rate_outage, r.kappa, r.sum_rate_adjusted,
               r.pilot_symbols);
  }
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const RunRecord& record) {
  write_header_comment(out, record, "summary", config);
  out << kSummaryHeader << '\n';
  for (const auto& a : record.aggregates) {
    const GridPoint& g = record.grid[static_cast<std::size_t>(a.grid)];
    fmt::print(out, "{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
               a.grid, point_fields(config, g), to_string(a.scheme), a.drops, a.raw.mean,
               a.raw.se, a.adjusted.mean, a.adjusted.se, a.outage.mean, a.outage.se,
               a.mean_streams);
  }
}

std::vector<ResultRow> read_rows_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (!header_seen) {
      if (line != kRowsHeader) {
        throw ConfigError("rows CSV header does not match schema");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 22) {
      throw ConfigError(fmt::format("rows CSV line has {} fields, expected 22", f.size()));
    }
    ResultRow r;
    r.grid = std::stoi(f[0]);
    r.drop = std::stoll(f[1]);
    r.scheme = parse_scheme(f[10]);
    r.streams = std::stoi(f[11]);
    r.subset_t = std::stoi(f[12]);
    r.set_size = std::stoi(f[13]);
    r.beams = parse_int_list(f[14]);
    r.users = parse_int_list(f[15]);
    r.predicted_rate = std::stod(f[16]);
    r.sum_rate_raw = std::stod(f[17]);
    r.sum_rate_outage = std::stod(f[18]);
    r.kappa = std::stod(f[19]);
    r.sum_rate_adjusted = std::stod(f[20]);
    r.pilot_symbols = std::stoi(f[21]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace lfsim
