#include "lfsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "lfsim/channel.hpp"
#include "lfsim/codebook.hpp"
#include "lfsim/feedback.hpp"
#include "lfsim/metrics.hpp"
#include "lfsim/rng.hpp"
#include "lfsim/scheduler.hpp"

namespace lfsim {

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> out;
  for (Fading fading : config.fading) {
    const int spreads = fading == Fading::kIid ? 1 : static_cast<int>(config.spread_deg.size());
    for (int si = 0; si < spreads; ++si) {
      for (double err : config.err_var) {
        for (double snr : config.snr_db) {
          for (int k : config.users) {
            GridPoint g;
            g.fading = fading;
            if (fading == Fading::kOneRing) {
              g.spread_index = si;
              g.spread_deg = config.spread_deg[static_cast<std::size_t>(si)];
            }
            g.err_var = err;
            g.snr_db = snr;
            g.users = k;
            out.push_back(g);
          }
        }
      }
    }
  }
  return out;
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) {
    return out;
  }
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  out.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - out.mean) * (v - out.mean);
    }
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows, int grid_points,
                                      const std::vector<Scheme>& schemes) {
  std::vector<Aggregate> out;
  for (int g = 0; g < grid_points; ++g) {
    for (Scheme scheme : schemes) {
      std::vector<double> raw;
      std::vector<double> adjusted;
      std::vector<double> outage;
      double streams = 0.0;
      for (const auto& r : rows) {
        if (r.grid == g && r.scheme == scheme) {
          raw.push_back(r.sum_rate_raw);
          adjusted.push_back(r.sum_rate_adjusted);
          outage.push_back(r.sum_rate_outage);
          streams += r.streams;
        }
      }
      Aggregate a;
      a.grid = g;
      a.scheme = scheme;
      a.drops = static_cast<int>(raw.size());
      a.raw = mean_and_se(raw);
      a.adjusted = mean_and_se(adjusted);
      a.outage = mean_and_se(outage);
      a.mean_streams = raw.empty() ? 0.0 : streams / static_cast<double>(raw.size());
      out.push_back(a);
    }
  }
  return out;
}

std::vector<const ResultRow*> RunRecord::select(int grid_index, Scheme scheme) const {
  std::vector<const ResultRow*> out;
  for (const auto& r : rows) {
    if (r.grid == grid_index && r.scheme == scheme) {
      out.push_back(&r);
    }
  }
  return out;
}

const Aggregate& RunRecord::aggregate(int grid_index, Scheme scheme) const {
  for (const auto& a : aggregates) {
    if (a.grid == grid_index && a.scheme == scheme) {
      return a;
    }
  }
  throw ContractViolation(
      fmt::format("no aggregate for grid {} scheme {}", grid_index, to_string(scheme)));
}

namespace {

constexpr std::uint64_t kFixedGeometryStream = 0x6765'6f6d'6669'7864ULL;

struct Evaluator {
  const ExperimentConfig& config;
  const Codebook& codebook;
  CqiQuantizer quantizer;
};

ChannelRealization draw_channel(const ExperimentConfig& config, const GridPoint& point,
                                std::uint64_t drop_seed) {
  const int antennas = config.antennas;
  const bool need_geometry = point.fading == Fading::kOneRing || config.snr_spread_db;
  std::vector<UserGeometry> users;
  if (need_geometry) {
    const Range spread = point.fading == Fading::kOneRing ? point.spread_deg
                                                          : config.spread_deg.front();
    const std::uint64_t geometry_seed =
        config.spread_mode == SpreadMode::kPerDrop
            ? drop_seed
            : derive_seed(config.base_seed, kFixedGeometryStream);
    users = drop_users(point.users,
                       {deg_to_rad(config.azimuth_deg.lo), deg_to_rad(config.azimuth_deg.hi)},
                       {deg_to_rad(spread.lo), deg_to_rad(spread.hi)}, geometry_seed,
                       config.snr_spread_db);
  } else {
    users.assign(static_cast<std::size_t>(point.users), UserGeometry{});
  }
  const std::vector<double> noise = noise_powers(users);

  ChannelRealization channel;
  if (point.fading == Fading::kIid) {
    channel = gen_channel_iid(antennas, noise, drop_seed);
  } else {
    std::vector<CorrelationMatrix> correlations;
    correlations.reserve(users.size());
    for (const auto& u : users) {
      correlations.push_back(one_ring_correlation(u, antennas, config.antenna_spacing));
    }
    channel = gen_channel(correlations, noise, drop_seed);
  }
  return add_csit_noise(std::move(channel), point.err_var, drop_seed);
}

template <typename Report, typename Fn>
std::vector<Report> collect_reports(const ChannelRealization& ch, const CqiQuantizer& quantizer,
                                    Fn&& compute) {
  std::vector<Report> out;
  out.reserve(static_cast<std::size_t>(ch.users()));
  for (int k = 0; k < ch.users(); ++k) {
    Report r = compute(CVector(ch.csit().col(k)), ch.noise_power(k));
    if (quantizer.enabled()) {
      r = std::get<Report>(quantize_cqi(r, quantizer));
    }
    out.push_back(std::move(r));
  }
  return out;
}

ResultRow evaluate_scheme(const Evaluator& ev, Scheme scheme, const GridPoint& point,
                          const ChannelRealization& ch, std::uint64_t drop_seed) {
  const double power = std::pow(10.0, point.snr_db / 10.0);
  const Codebook& cb = ev.codebook;
  const int max_streams = std::min(ev.config.antennas, point.users);

  ScheduleDecision decision;
  std::optional<PilotGrouping> grouping;
  const bool group_pilots = ev.config.overhead == OverheadMode::kGrouping;

  switch (scheme) {
    case Scheme::kZfbfSus:
      decision = schedule_zfbf_sus(ch.csit(), ch.noise_power, power, ev.config.sus_epsilon);
      break;
    case Scheme::kRbf:
      decision = schedule_rbf(ch.csit(), ch.noise_power,
                              build_random_unitary(ev.config.antennas, drop_seed), power);
      break;
    case Scheme::kDftSinr: {
      const auto reports = collect_reports<SinrReport>(
          ch, ev.quantizer,
          [&](const CVector& h, double n) { return compute_sinr_report(h, n, cb, power); });
      decision = schedule_dft_sinr(reports, cb, power);
      break;
    }
    case Scheme::kPartialInr:
    case Scheme::kPartialInrImproved: {
      const auto reports = collect_reports<PartialInrReport>(
          ch, ev.quantizer,
          [&](const CVector& h, double n) { return compute_partial_inr(h, n, cb); });
      PartialInrOptions options;
      if (scheme == Scheme::kPartialInrImproved) {
        options.conflict = ConflictRule::kNextBestUser;
      }
      decision = schedule_partial_inr(reports, cb, power, options);
      if (group_pilots && !decision.empty()) {
        grouping = pilot_grouping(decision, pilot_inr_table(decision, reports),
                                  ev.config.pilot_threshold_db);
      }
      break;
    }
    case Scheme::kFullInr:
    case Scheme::kFullInrGreedy: {
      const auto reports = collect_reports<FullInrReport>(
          ch, ev.quantizer,
          [&](const CVector& h, double n) { return compute_full_inr(h, n, cb); });
      decision = schedule_full_inr(
          reports, cb, power,
          scheme == Scheme::kFullInr ? FullInrMode::kExhaustive : FullInrMode::kGreedy);
      if (group_pilots && !decision.empty()) {
        grouping = pilot_grouping(decision, pilot_inr_table(decision, reports),
                                  ev.config.pilot_threshold_db);
      }
      break;
    }
    case Scheme::kOneBitInr: {
      const auto reports = collect_reports<OneBitInrReport>(
          ch, ev.quantizer, [&](const CVector& h, double n) {
            return compute_one_bit_inr(h, n, cb, ev.config.gamma_threshold);
          });
      decision = schedule_one_bit_inr(reports, cb, power);
      break;
    }
  }

  const std::vector<double> realized = exact_sinr(decision, ch.h_true, ch.noise_power);
  ResultRow row;
  row.scheme = scheme;
  row.streams = decision.streams();
  row.subset_t = decision.subset_t;
  row.set_size = decision.set_size;
  for (const auto& b : decision.beams) {
    row.beams.push_back(b.flat);
  }
  row.users = decision.users;
  row.predicted_rate = decision.predicted_sum_rate;
  row.sum_rate_raw = sum_rate(realized);
  row.sum_rate_outage = outage_sum_rate(decision.predicted_sinrs, realized);

  const PilotFamily family = uses_inr_feedback(scheme) ? PilotFamily::kInr : PilotFamily::kNoInr;
  if (decision.empty()) {
    row.kappa = family == PilotFamily::kInr ? 10.0 / 14.0 : 11.0 / 14.0;
  } else {
    row.kappa = overhead_factor(family, decision.streams(), max_streams,
                                grouping ? &*grouping : nullptr);
  }
  if (grouping) {
    row.pilot_symbols = grouping->symbols_used;
  }
  row.sum_rate_adjusted = adjusted_throughput(row.sum_rate_raw, row.kappa);
  return row;
}

}  // namespace

RunRecord run_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
  validate(config);
  RunRecord record;
  record.config_hash = config_hash(config);
  record.grid = expand_grid(config);

  const Codebook codebook(config.antennas, config.subsets);
  Evaluator ev{config, codebook, {}};
  if (config.cqi_bits) {
    ev.quantizer = {config.cqi_bits, config.cqi_range_db.lo, config.cqi_range_db.hi};
  }

  const auto grid_points = static_cast<std::int64_t>(record.grid.size());
  const std::int64_t tasks = grid_points * config.drops;
  std::vector<std::vector<ResultRow>> results(static_cast<std::size_t>(tasks));

  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> done{0};
  std::exception_ptr failure;
  std::mutex mutex;

  auto worker = [&] {
    while (true) {
      const std::int64_t task = next.fetch_add(1);
      if (task >= tasks) {
        return;
      }
      {
        std::lock_guard lock(mutex);
        if (failure) {
          return;
        }
      }
      try {
        const auto g = static_cast<int>(task / config.drops);
        const std::int64_t drop = task % config.drops;
        const GridPoint& point = record.grid[static_cast<std::size_t>(g)];
        const std::uint64_t drop_seed =
            derive_seed(config.base_seed, static_cast<std::uint64_t>(drop));
        const ChannelRealization channel = draw_channel(config, point, drop_seed);
        auto& out = results[static_cast<std::size_t>(task)];
        for (Scheme scheme : config.schemes) {
          ResultRow row = evaluate_scheme(ev, scheme, point, channel, drop_seed);
          row.grid = g;
          row.drop = drop;
          out.push_back(std::move(row));
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        return;
      }
      const std::int64_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mutex);
        progress(finished, tasks);
      }
    }
  };

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(tasks, 256))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  for (auto& chunk : results) {
    for (auto& row : chunk) {
      record.rows.push_back(std::move(row));
    }
  }
  record.aggregates =
      aggregate_rows(record.rows, static_cast<int>(grid_points), config.schemes);

  if (!config.output.empty()) {
    std::ofstream rows(config.output);
    if (!rows) {
      throw std::runtime_error(fmt::format("cannot write '{}'", config.output));
    }
    write_rows_csv(rows, config, record);
    std::ofstream summary(config.output + ".summary.csv");
    if (!summary) {
      throw std::runtime_error(fmt::format("cannot write '{}.summary.csv'", config.output));
    }
    write_summary_csv(summary, config, record);
  }
  return record;
}

}  // namespace lfsim
