#include <vector>

#include <benchmark/benchmark.h>

#include "lfsim/channel.hpp"
#include "lfsim/codebook.hpp"
#include "lfsim/feedback.hpp"
#include "lfsim/rng.hpp"
#include "lfsim/scheduler.hpp"

namespace {

using namespace lfsim;

CMatrix channels(int antennas, int users) {
  Engine engine(42);
  return complex_gaussian_matrix(antennas, users, engine);
}

void BM_PartialInrSchedule(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Codebook cb(m, 2);
  const CMatrix h = channels(m, k);
  std::vector<PartialInrReport> reports;
  for (int u = 0; u < k; ++u) reports.push_back(compute_partial_inr(h.col(u), 1.0, cb));
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_partial_inr(reports, cb, 10.0));
  }
}
BENCHMARK(BM_PartialInrSchedule)->Args({8, 16})->Args({16, 20})->Args({16, 40})->Unit(benchmark::kMillisecond);

void BM_OneBitSchedule(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Codebook cb(16, 2);
  const CMatrix h = channels(16, k);
  std::vector<OneBitInrReport> reports;
  for (int u = 0; u < k; ++u) reports.push_back(compute_one_bit_inr(h.col(u), 1.0, cb, 0.02));
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_one_bit_inr(reports, cb, 10.0));
  }
}
BENCHMARK(BM_OneBitSchedule)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FullInrGreedy(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Codebook cb(16, 2);
  const CMatrix h = channels(16, k);
  std::vector<FullInrReport> reports;
  for (int u = 0; u < k; ++u) reports.push_back(compute_full_inr(h.col(u), 1.0, cb));
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_full_inr(reports, cb, 10.0, FullInrMode::kGreedy));
  }
}
BENCHMARK(BM_FullInrGreedy)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ZfbfSus(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const CMatrix h = channels(16, k);
  const Eigen::VectorXd noise = Eigen::VectorXd::Ones(k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_zfbf_sus(h, noise, 10.0));
  }
}
BENCHMARK(BM_ZfbfSus)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_OneRingCorrelation(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const UserGeometry user{0.3, 0.2, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(one_ring_correlation(user, m, 0.5));
  }
}
BENCHMARK(BM_OneRingCorrelation)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_PartialInrFeedback(benchmark::State& state) {
  const Codebook cb(16, 2);
  const CMatrix h = channels(16, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_partial_inr(h.col(0), 1.0, cb));
  }
}
BENCHMARK(BM_PartialInrFeedback);

}  // namespace

BENCHMARK_MAIN();
