// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails. Statistical checks run >= 1000 paired drops:
// every grid point of a sweep reuses the same per-drop seeds, so quantities
// from different grid points (or schemes) are paired by drop index.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "lfsim/analysis.hpp"
#include "lfsim/channel.hpp"
#include "lfsim/codebook.hpp"
#include "lfsim/feedback.hpp"
#include "lfsim/harness.hpp"
#include "lfsim/metrics.hpp"
#include "lfsim/rng.hpp"
#include "lfsim/scheduler.hpp"
#include "oracles.hpp"

namespace {

using namespace lfsim;

constexpr int kDrops = 1000;
constexpr double kZ95Two = 1.959963984540054;  // two-sided 95%
constexpr double kZ95One = 1.6448536269514722;  // one-sided 95%

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  fmt::print("{} {}: {}\n", pass ? "PASS" : "FAIL", id, detail);
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Stat {
  double mean = 0;
  double se = 0;
  double lo() const { return mean - kZ95Two * se; }
  double hi() const { return mean + kZ95Two * se; }
};

Stat stat(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

/// Ratio of paired means with a delta-method standard error.
Stat ratio_of_means(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = stat(a).mean;
  const double mb = stat(b).mean;
  const double r = ma / mb;
  std::vector<double> lin(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) lin[i] = (a[i] - r * b[i]) / mb;
  return {r, stat(lin).se};
}

enum class Field { kRaw, kAdjusted, kStreams };

std::vector<double> values(const RunRecord& rec, int grid, Scheme scheme, Field field) {
  std::vector<double> out;
  for (const ResultRow* row : rec.select(grid, scheme)) {
    switch (field) {
      case Field::kRaw: out.push_back(row->sum_rate_raw); break;
      case Field::kAdjusted: out.push_back(row->sum_rate_adjusted); break;
      case Field::kStreams: out.push_back(row->streams); break;
    }
  }
  return out;
}

int find_point(const RunRecord& rec, const std::function<bool(const GridPoint&)>& match) {
  for (std::size_t i = 0; i < rec.grid.size(); ++i) {
    if (match(rec.grid[i])) return static_cast<int>(i);
  }
  throw std::logic_error("grid point not found");
}

ExperimentConfig base_config(const std::string& name, int antennas, int subsets) {
  ExperimentConfig c;
  c.name = name;
  c.antennas = antennas;
  c.subsets = subsets;
  c.snr_db = {10.0};
  c.drops = kDrops;
  c.base_seed = 20240601;
  c.threads = 0;
  return c;
}

std::string ci(const Stat& s) { return fmt::format("{:.3f} [{:.3f}, {:.3f}]", s.mean, s.lo(), s.hi()); }

// ---------------------------------------------------------------------------

void exactness() {
  double unit = 0;
  double unitary = 0;
  for (int m : {1, 2, 4, 8, 16}) {
    for (int t : {1, 2, 4}) {
      const Codebook cb(m, t);
      for (int l = 0; l < cb.size(); ++l) unit = std::max(unit, std::abs(cb.vector(l).norm() - 1));
      for (int s = 0; s < t; ++s) {
        const CMatrix c = cb.subset(s);
        unitary = std::max(unitary, (c.adjoint() * c - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff());
      }
    }
  }

  Engine engine(99);
  double parseval = 0;
  double identity = 0;
  std::uniform_int_distribution<int> pick_m(1, 16);
  std::uniform_real_distribution<double> pick_noise(0.05, 5.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = pick_m(engine);
    const int t = 1 + trial % 3;
    const Codebook cb(m, t);
    const CVector h = complex_gaussian_matrix(m, 1, engine).col(0);
    const double noise = pick_noise(engine);
    const auto full = compute_full_inr(h, noise, cb);
    for (int s = 0; s < t; ++s) {
      double sum = 0;
      for (int q = 0; q < m; ++q) sum += full.inrs[static_cast<std::size_t>(cb.index(s, q).flat)];
      parseval = std::max(parseval, std::abs(sum * noise / h.squaredNorm() - 1));
    }
    // Random active set within one subset; compare against explicit summation.
    const int sub = trial % t;
    std::vector<int> set;
    std::vector<CVector> beams;
    std::vector<double> inrs;
    for (int q = 0; q < m; ++q) {
      beams.push_back(oracle::dft_vector(m, t, cb.index(sub, q).flat));
      inrs.push_back(full.inrs[static_cast<std::size_t>(cb.index(sub, q).flat)]);
      if (engine() & 1) set.push_back(q);
    }
    if (set.empty()) set.push_back(0);
    const double power = 0.5 + static_cast<double>(engine() % 100);
    for (int q : set) {
      const double direct = oracle::direct_sinr(h, noise, beams, set, q, power);
      const double rebuilt = sinr_from_inrs(inrs, q, set, power);
      identity = std::max(identity, std::abs(rebuilt - direct) / direct);
    }
  }

  auto c = base_config("exact", 8, 2);
  c.users = {20};
  c.drops = 500;
  c.fading = {Fading::kOneRing};
  c.schemes = {Scheme::kPartialInr};
  const RunRecord rec = run_sweep(c);
  double realized = 0;
  for (const auto& row : rec.rows) {
    realized = std::max(realized, std::abs(row.predicted_rate - row.sum_rate_raw) / row.sum_rate_raw);
  }

  const bool pass = unit <= 1e-10 && unitary <= 1e-10 && parseval <= 1e-10 && identity <= 1e-12 &&
                    realized <= 1e-9 && rec.rows.size() == 500;
  report("exactness", pass,
         fmt::format("unit-norm {:.1e}, unitarity {:.1e}, Parseval {:.1e}, INR identity {:.1e} "
                     "(10^4 instances), predicted-vs-realized {:.1e} (500 drops)",
                     unit, unitary, parseval, identity, realized));
}

void overhead() {
  const int table[16] = {10, 10, 9, 9, 8, 8, 7, 7, 6, 6, 5, 5, 4, 4, 3, 3};
  bool pass = true;
  for (int s = 1; s <= 16; ++s) {
    pass = pass && overhead_factor(PilotFamily::kNoInr, s, 16) == table[s - 1] / 14.0;
    pass = pass && overhead_factor(PilotFamily::kInr, s, 16) == 10.0 / 14.0;
  }
  report("overhead", pass, "kappa_noINR(S), S=1..16, and kappa_INR = 10/14 bit-exact");
}

void oracle_suite() {
  const auto start = std::chrono::steady_clock::now();
  int drops = 0;
  int greedy_above = 0;
  int partial_mismatch = 0;
  for (int m = 2; m <= 4; ++m) {
    const Codebook cb(m, 1);
    for (int k = 4; k <= 6; ++k) {
      for (int drop = 0; drop < 200; ++drop) {
        const std::uint64_t seed = derive_seed(static_cast<std::uint64_t>(m * 100 + k), drop);
        const std::vector<double> noise(static_cast<std::size_t>(k), 1.0);
        const auto ch = gen_channel_iid(m, noise, seed);
        std::vector<FullInrReport> full;
        std::vector<PartialInrReport> partial;
        std::vector<oracle::PartialFeedback> plain;
        for (int u = 0; u < k; ++u) {
          full.push_back(compute_full_inr(ch.h_true.col(u), 1.0, cb));
          partial.push_back(compute_partial_inr(ch.h_true.col(u), 1.0, cb));
          plain.push_back({partial.back().subset_t, partial.back().inrs});
        }
        const auto gr = schedule_full_inr(full, cb, 10.0, FullInrMode::kGreedy);
        const auto ex = schedule_full_inr(full, cb, 10.0, FullInrMode::kExhaustive);
        if (gr.predicted_sum_rate > ex.predicted_sum_rate * (1 + 1e-12)) ++greedy_above;
        const double mu = schedule_partial_inr(partial, cb, 10.0).predicted_sum_rate;
        const double expected = oracle::partial_inr_best_rate(plain, m, 1, 10.0);
        if (std::abs(mu - expected) > 1e-12 * expected) ++partial_mismatch;
        ++drops;
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report("oracle", greedy_above == 0 && partial_mismatch == 0 && secs < 60,
         fmt::format("{} drops (M=2..4, K=4..6, T=1): greedy>exhaustive on {}, partial mu "
                     "mismatches {}, {:.1f}s",
                     drops, greedy_above, partial_mismatch, secs));
}

void fig1_ordering() {
  auto c = base_config("fig1", 16, 1);
  c.users = {20};
  c.fading = {Fading::kIid};
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr, Scheme::kRbf};
  const RunRecord rec = run_sweep(c);
  const Stat z = stat(values(rec, 0, Scheme::kZfbfSus, Field::kRaw));
  const Stat p = stat(values(rec, 0, Scheme::kPartialInr, Field::kRaw));
  const Stat r = stat(values(rec, 0, Scheme::kRbf, Field::kRaw));
  report("fig1-ordering", z.lo() > p.hi() && p.lo() > r.hi(),
         fmt::format("M=16 K=20 iid 10dB: ZFBF-SUS {} > partial-INR {} > RBF {}", ci(z), ci(p),
                     ci(r)));
}

void flexibility_gain() {
  bool pass = true;
  std::string detail;
  for (int m : {4, 8}) {
    auto c = base_config("flex", m, 2);
    const int large = 50 * m / 4;
    c.users = {m, m + 4, large};
    c.fading = {Fading::kIid, Fading::kOneRing};
    c.spread_deg = {{5, 20}};
    c.schemes = {Scheme::kPartialInr, Scheme::kDftSinr};
    const RunRecord rec = run_sweep(c);
    for (Fading f : c.fading) {
      std::map<int, std::vector<double>> gaps;
      for (int k : c.users) {
        const int g = find_point(rec, [&](const GridPoint& p) { return p.fading == f && p.users == k; });
        const auto pi = values(rec, g, Scheme::kPartialInr, Field::kRaw);
        const auto ds = values(rec, g, Scheme::kDftSinr, Field::kRaw);
        gaps[k] = minus(pi, ds);
        if (k <= m + 4) {
          const Stat a = stat(pi);
          const Stat b = stat(ds);
          pass = pass && a.lo() > b.hi();
          detail += fmt::format("M={} {} K={}: {} vs {}; ", m, to_string(f), k, ci(a), ci(b));
        }
      }
      const Stat shrink = stat(minus(gaps[m], gaps[large]));
      pass = pass && shrink.mean - kZ95One * shrink.se > 0;
      detail += fmt::format("M={} {} gap K={} {:.3f} > K={} {:.3f} (diff lower95 {:.3f}); ", m,
                            to_string(f), m, stat(gaps[m]).mean, large, stat(gaps[large]).mean,
                            shrink.mean - kZ95One * shrink.se);
    }
  }
  detail.resize(detail.size() - 2);
  report("fig2-4-flexibility", pass, detail);
}

void correlation_trend() {
  auto c = base_config("fig5", 8, 2);
  c.users = {16};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 10}, {20, 40}};
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr};
  const RunRecord rec = run_sweep(c);
  std::vector<double> gap[2];
  for (int s = 0; s < 2; ++s) {
    const int g = find_point(rec, [&](const GridPoint& p) { return p.spread_index == s; });
    gap[s] = minus(values(rec, g, Scheme::kZfbfSus, Field::kRaw),
                   values(rec, g, Scheme::kPartialInr, Field::kRaw));
  }
  const Stat d = stat(minus(gap[0], gap[1]));
  report("fig5-correlation", d.mean + kZ95One * d.se < 0,
         fmt::format("M=8 K=16: gap [5,10] {:.3f}, gap [20,40] {:.3f}, diff {:.3f} upper95 {:.3f}",
                     stat(gap[0]).mean, stat(gap[1]).mean, d.mean, d.mean + kZ95One * d.se));
}

void error_sensitivity() {
  auto c = base_config("fig6", 16, 2);
  c.users = {24};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.err_var = {0.0, 0.2};
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr};
  const RunRecord rec = run_sweep(c);
  const int clean = find_point(rec, [](const GridPoint& p) { return p.err_var == 0.0; });
  const int noisy = find_point(rec, [](const GridPoint& p) { return p.err_var == 0.2; });
  const auto z0 = values(rec, clean, Scheme::kZfbfSus, Field::kRaw);
  const auto z1 = values(rec, noisy, Scheme::kZfbfSus, Field::kRaw);
  const auto p0 = values(rec, clean, Scheme::kPartialInr, Field::kRaw);
  const auto p1 = values(rec, noisy, Scheme::kPartialInr, Field::kRaw);
  const auto loss_gap = [&](const std::vector<std::size_t>& idx) {
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
    for (std::size_t i : idx) {
      a0 += z0[i]; a1 += z1[i]; b0 += p0[i]; b1 += p1[i];
    }
    return (1 - a1 / a0) - (1 - b1 / b0);
  };
  std::vector<std::size_t> all(z0.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double point = loss_gap(all);
  std::mt19937_64 boot(7);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::vector<double> reps;
  for (int b = 0; b < 2000; ++b) {
    std::vector<std::size_t> idx(all.size());
    for (auto& i : idx) i = pick(boot);
    reps.push_back(loss_gap(idx));
  }
  std::sort(reps.begin(), reps.end());
  const double lo = reps[49];
  const double hi = reps[1949];
  report("fig6-sensitivity", lo > 0,
         fmt::format("M=16 K=24 err 0 -> 0.2: ZFBF-SUS loss {:.1f}%, partial-INR loss {:.1f}%, "
                     "difference {:.3f} bootstrap95 [{:.3f}, {:.3f}]",
                     100 * (1 - stat(z1).mean / stat(z0).mean),
                     100 * (1 - stat(p1).mean / stat(p0).mean), point, lo, hi));
}

void pilot_crossover() {
  auto c = base_config("fig7", 16, 2);
  c.users = {8, 16, 24, 32, 40};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.err_var = {0.1};
  c.overhead = OverheadMode::kGrouping;
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr};
  const RunRecord rec = run_sweep(c);
  std::vector<std::vector<double>> part, zf;
  for (std::size_t g = 0; g < rec.grid.size(); ++g) {
    part.push_back(values(rec, static_cast<int>(g), Scheme::kPartialInr, Field::kAdjusted));
    zf.push_back(values(rec, static_cast<int>(g), Scheme::kZfbfSus, Field::kAdjusted));
  }
  bool monotone = true;
  std::string curve;
  for (std::size_t g = 0; g < part.size(); ++g) {
    if (g > 0 && !(stat(part[g]).mean > stat(part[g - 1]).mean)) monotone = false;
    curve += fmt::format("{}{:.2f}/{:.2f}", g ? " " : "", stat(part[g]).mean, stat(zf[g]).mean);
  }
  const Stat rise = stat(minus(part.back(), part.front()));
  const Stat zf_rise = stat(minus(zf.back(), zf.front()));
  const Stat excess = stat(minus(minus(part.back(), part.front()), minus(zf.back(), zf.front())));
  const Stat lead = stat(minus(part.back(), zf.back()));
  const bool pass = monotone && rise.mean - kZ95One * rise.se > 0 &&
                    excess.mean - kZ95One * excess.se > 0 && lead.mean - kZ95One * lead.se > 0;
  report("fig7-crossover", pass,
         fmt::format("adjusted partial/ZFBF by K=8..40: {}; partial rise {:.3f} vs ZFBF rise "
                     "{:.3f} (excess lower95 {:.3f}); lead at K=40 {:.3f} lower95 {:.3f}",
                     curve, rise.mean, zf_rise.mean, excess.mean - kZ95One * excess.se, lead.mean,
                     lead.mean - kZ95One * lead.se));
}

void optimal_s_trend() {
  auto c = base_config("thm1", 8, 1);
  c.users = {8, 16, 32};
  c.fading = {Fading::kIid};
  c.schemes = {Scheme::kPartialInr};
  const RunRecord rec = run_sweep(c);
  bool pass = true;
  std::string detail;
  for (std::size_t g = 0; g < rec.grid.size(); ++g) {
    const int k = rec.grid[g].users;
    std::vector<int> hist(9, 0);
    for (double s : values(rec, static_cast<int>(g), Scheme::kPartialInr, Field::kStreams)) {
      ++hist[static_cast<std::size_t>(s)];
    }
    const int mode = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    const int argmax = inr_scaling(8, k, 1, 10.0, InrVariant::kSingleSubset).s_star;
    pass = pass && std::abs(mode - argmax) <= 1;
    std::string h;
    for (int s = 1; s <= 8; ++s) h += fmt::format("{}{}", s > 1 ? "," : "", hist[static_cast<std::size_t>(s)]);
    detail += fmt::format("K={}: mode {} argmax {} (hist s=1..8: {}); ", k, mode, argmax, h);
  }
  double identity = 0;
  for (int m = 1; m <= 16; ++m) {
    for (double k : {8.0, 16.0, 32.0, 1e3, 1e6}) {
      const auto pred = inr_scaling(m, k, 1, 10.0, InrVariant::kSingleSubset);
      identity = std::max(identity, std::abs(pred.objective.back() - rbf_scaling(m, k, 10.0)));
    }
  }
  pass = pass && identity == 0.0;
  detail += fmt::format("objective(s=M) - RBF max |diff| {:.1e}", identity);
  report("optimal-s-trend", pass, detail);
}

void one_bit() {
  auto c = base_config("fig8", 16, 2);
  c.users = {8, 24, 40};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.snr_spread_db = Range{0, 20};
  c.err_var = {0.1};
  c.gamma_threshold = 0.02;
  c.schemes = {Scheme::kPartialInr, Scheme::kOneBitInr};
  const RunRecord rec = run_sweep(c);
  bool pass = true;
  std::string detail;
  for (std::size_t g = 0; g < rec.grid.size(); ++g) {
    const auto ob = values(rec, static_cast<int>(g), Scheme::kOneBitInr, Field::kRaw);
    const auto pi = values(rec, static_cast<int>(g), Scheme::kPartialInr, Field::kRaw);
    const Stat r = ratio_of_means(ob, pi);
    const double lower = r.mean - kZ95One * r.se;
    pass = pass && lower >= 0.85;
    detail += fmt::format("K={}: {:.3f}/{:.3f} = {:.3f} lower95 {:.3f}; ", rec.grid[g].users,
                          stat(ob).mean, stat(pi).mean, r.mean, lower);
  }
  detail += "floor 0.85";
  report("one-bit-85pct", pass, detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)()>> suites{
      {"exactness", exactness},         {"overhead", overhead},
      {"oracle", oracle_suite},         {"fig1", fig1_ordering},
      {"fig2-4", flexibility_gain},     {"fig5", correlation_trend},
      {"fig6", error_sensitivity},      {"fig7", pilot_crossover},
      {"optimal-s", optimal_s_trend},      {"one-bit", one_bit},
  };
  for (const auto& [name, fn] : suites) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, fmt::format("threw: {}", e.what()));
    }
  }
  fmt::print("{} of {} criteria failed\n", failures, suites.size());
  return failures == 0 ? 0 : 1;
}
