#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lfsim/analysis.hpp"
#include "lfsim/codebook.hpp"
#include "lfsim/harness.hpp"

namespace {

struct RunOverrides {
  std::optional<int> drops;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string output;
  bool print_config = false;
  bool quiet = false;
};

void add_run_overrides(CLI::App* cmd, RunOverrides& o) {
  cmd->add_option("--drops", o.drops, "Override the number of drops per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "Override the base seed");
  cmd->add_option("-o,--output", o.output, "Rows CSV path; the summary goes to <path>.summary.csv");
  cmd->add_flag("--print-config", o.print_config, "Print the resolved config and exit");
  cmd->add_flag("-q,--quiet", o.quiet, "No progress output");
}

int execute(lfsim::ExperimentConfig config, const RunOverrides& o) {
  if (o.drops) config.drops = *o.drops;
  if (o.threads) config.threads = *o.threads;
  if (o.seed) config.base_seed = *o.seed;
  if (!o.output.empty()) config.output = o.output;
  lfsim::validate(config);

  if (o.print_config) {
    std::cout << lfsim::to_text(config);
    return 0;
  }
  if (config.output.empty()) {
    config.output = config.name + ".csv";
  }

  lfsim::ProgressFn progress;
  if (!o.quiet) {
    progress = [last = -1](std::int64_t done, std::int64_t total) mutable {
      const int pct = static_cast<int>(100 * done / total);
      if (pct != last) {
        last = pct;
        fmt::print(stderr, "\r{}: {:3d}%", "lfsim", pct);
        if (done == total) fmt::print(stderr, "\n");
      }
    };
  }
  const auto record = lfsim::run_sweep(config, progress);

  for (const auto& a : record.aggregates) {
    const auto& g = record.grid[static_cast<std::size_t>(a.grid)];
    fmt::print("{:>4} K={:<4} snr={:<5g} {:<8} err={:<4g} {:<20} rate={:8.4f} +- {:.4f}  adj={:8.4f}\n",
               a.grid, g.users, g.snr_db, lfsim::to_string(g.fading), g.err_var,
               lfsim::to_string(a.scheme), a.raw.mean, a.raw.se, a.adjusted.mean);
  }
  fmt::print("rows: {}\nsummary: {}.summary.csv\n", config.output, config.output);
  return 0;
}

std::vector<double> parse_k_list(const std::vector<double>& ks) {
  for (double k : ks) {
    if (!(k > 0)) throw lfsim::ConfigError("user counts must be positive");
  }
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for limited-feedback multiuser MIMO with INR feedback"};
  app.require_subcommand(1);

  RunOverrides run_o;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a sweep described by a config file");
  run->add_option("config", config_path, "Config file (key = value)")->required()->check(
      CLI::ExistingFile);
  add_run_overrides(run, run_o);

  RunOverrides preset_o;
  std::string preset_name;
  bool list_presets = false;
  auto* pre = app.add_subcommand("preset", "Run a built-in figure preset");
  pre->add_option("name", preset_name, "Preset name (fig1..fig8)");
  pre->add_flag("--list", list_presets, "List preset names");
  add_run_overrides(pre, preset_o);

  int a_m = 8;
  int a_t = 1;
  double a_p = 10.0;
  std::vector<double> a_k{8, 16, 32};
  std::string a_variant = "T1";
  std::string a_base = "ln";
  std::string a_output;
  bool a_limit = false;
  auto* ana = app.add_subcommand("analyze", "Asymptotic scaling tables");
  ana->add_option("-M,--antennas", a_m, "Antennas")->check(CLI::PositiveNumber);
  ana->add_option("-K,--users", a_k, "User counts")->delimiter(',');
  ana->add_option("-T,--subsets", a_t, "Codebook subsets")->check(CLI::PositiveNumber);
  ana->add_option("-P,--power", a_p, "Total transmit power (linear)")->check(CLI::PositiveNumber);
  ana->add_option("--variant", a_variant, "T1, full or partial")
      ->check(CLI::IsMember({"T1", "full", "partial"}));
  ana->add_option("--base", a_base, "Log base")->check(CLI::IsMember({"ln", "log2"}));
  ana->add_option("-o,--output", a_output, "CSV path (default stdout)");
  ana->add_flag("--limit", a_limit, "Print the INR vs RBF gap along the K grid instead");

  int c_m = 4;
  int c_t = 2;
  std::string c_output;
  auto* cb = app.add_subcommand("codebook", "Dump the DFT codebook as CSV");
  cb->add_option("-M,--antennas", c_m, "Antennas")->check(CLI::PositiveNumber);
  cb->add_option("-T,--subsets", c_t, "Subsets")->check(CLI::PositiveNumber);
  cb->add_option("-o,--output", c_output, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return execute(lfsim::load_config(config_path), run_o);
    }
    if (*pre) {
      if (list_presets) {
        for (const auto& n : lfsim::preset_names()) std::cout << n << '\n';
        return 0;
      }
      if (preset_name.empty()) throw lfsim::ConfigError("preset name required (see --list)");
      return execute(lfsim::preset(preset_name), preset_o);
    }
    if (*ana) {
      const auto base = a_base == "ln" ? lfsim::LogBase::kNatural : lfsim::LogBase::kTwo;
      const auto variant = a_variant == "T1"     ? lfsim::InrVariant::kSingleSubset
                           : a_variant == "full" ? lfsim::InrVariant::kFull
                                                 : lfsim::InrVariant::kPartial;
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!a_output.empty()) {
        file.open(a_output);
        if (!file) throw lfsim::ConfigError(fmt::format("cannot open '{}'", a_output));
        out = &file;
      }
      const auto ks = parse_k_list(a_k);
      if (a_limit) {
        const auto rep = lfsim::limit_consistency_check(a_m, a_p, ks, base);
        *out << "K,gap,s_star\n";
        for (std::size_t i = 0; i < rep.users.size(); ++i) {
          fmt::print(*out, "{:g},{:.17g},{}\n", rep.users[i], rep.gaps[i], rep.s_star[i]);
        }
        return 0;
      }
      *out << lfsim::kScalingCsvHeader << '\n';
      for (double k : ks) {
        const auto pred = lfsim::inr_scaling(a_m, k, a_t, a_p, variant, base);
        lfsim::write_scaling_rows(*out, a_m, k, a_t, a_p, pred);
      }
      return 0;
    }
    if (*cb) {
      const auto codebook = lfsim::build_dft_codebook(c_m, c_t);
      if (c_output.empty()) {
        codebook.write_csv(std::cout);
      } else {
        std::ofstream file(c_output);
        if (!file) throw lfsim::ConfigError(fmt::format("cannot open '{}'", c_output));
        codebook.write_csv(file);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "lfsim: error: {}\n", e.what());
    return 1;
  }
  return 0;
}
