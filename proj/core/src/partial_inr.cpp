// Flexible scheduling over the beam sets of each unitary subset.
//
// Beam sets of subset t are bitmasks over the M within-subset indices; bit m
// set means beam c_m^(t) is active. For every mask the beams are visited in
// increasing m, which is the element order of the set, and each beam goes to
// the user with the largest SINR among those who reported subset t.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include <fmt/format.h>

#include "lfsim/scheduler.hpp"

namespace lfsim {

namespace {

// True when `a` precedes `b` in lexicographic order of their sorted elements.
// Both masks have the same popcount.
bool lex_before(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t diff = a ^ b;
  if (diff == 0) {
    return false;
  }
  return (a & (diff & (~diff + 1))) != 0;
}

// Sets are ranked by prod(1 + sinr), which orders them like the sum rate
// without a logarithm per set.
struct Candidate {
  double gain = -1.0;
  int t = -1;
  int s = 0;
  std::uint32_t mask = 0;
};

bool better(double gain, int t, int s, std::uint32_t mask, const Candidate& best) {
  if (gain != best.gain) {
    return gain > best.gain;
  }
  if (t != best.t) {
    return t < best.t;
  }
  if (s != best.s) {
    return s < best.s;
  }
  return lex_before(mask, best.mask);
}

void check_cap(int antennas, int subsets, const PartialInrOptions& options) {
  if (antennas > 30) {
    throw ConfigError(fmt::format("partial-INR enumeration does not support M={}", antennas));
  }
  const std::int64_t states = static_cast<std::int64_t>(subsets) << antennas;
  if (states > options.enumeration_cap) {
    throw ConfigError(fmt::format("partial-INR enumeration needs {} states (cap {})", states,
                                  options.enumeration_cap));
  }
}

// Runs the beam-assignment loop for every subset and beam set.
//
// `sinr.fill(q, mask, s, row)` writes the SINR of every local user of the
// current subset on beam q when `mask` is active with s beams; `user_ids[t]` maps
// local indices back to global user numbers. Local users are in increasing
// global order so strict comparisons give the smallest-index tie break.
template <typename SinrFn>
ScheduleDecision run_flexible(const std::vector<std::vector<int>>& user_ids,
                              const Codebook& codebook, double total_power,
                              const PartialInrOptions& options, SinrFn&& sinr) {
  const int antennas = codebook.antennas();
  const int subsets = codebook.subsets();
  const std::uint32_t full = (antennas == 32) ? 0xffffffffu : ((1u << antennas) - 1u);

  Candidate best;
  std::vector<int> best_users;
  std::vector<int> best_beams;
  std::vector<double> best_sinrs;

  std::vector<int> users;
  std::vector<int> beams;
  std::vector<double> sinrs;
  std::vector<char> taken;
  std::vector<double> row;

  for (int t = 0; t < subsets; ++t) {
    const auto& ids = user_ids[static_cast<std::size_t>(t)];
    const int local_count = static_cast<int>(ids.size());
    if (local_count == 0) {
      continue;
    }
    sinr.prepare(t);
    row.assign(static_cast<std::size_t>(local_count), 0.0);
    taken.assign(static_cast<std::size_t>(local_count), 0);

    for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
      const int s = std::popcount(mask);
      sinr.advance(t, mask);
      users.clear();
      beams.clear();
      sinrs.clear();
      double gain = 1.0;

      for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
        const int q = std::countr_zero(rest);
        sinr.fill(q, mask, s, row.data());
        int pick = -1;
        double pick_sinr = -1.0;
        for (int u = 0; u < local_count; ++u) {
          if (options.conflict == ConflictRule::kNextBestUser && taken[static_cast<std::size_t>(u)]) {
            continue;
          }
          if (row[static_cast<std::size_t>(u)] > pick_sinr) {
            pick_sinr = row[static_cast<std::size_t>(u)];
            pick = u;
          }
        }
        if (pick < 0 || taken[static_cast<std::size_t>(pick)]) {
          break;
        }
        taken[static_cast<std::size_t>(pick)] = 1;
        users.push_back(pick);
        beams.push_back(q);
        sinrs.push_back(pick_sinr);
        gain *= 1.0 + pick_sinr;
      }
      for (int u : users) {
        taken[static_cast<std::size_t>(u)] = 0;
      }

      if (better(gain, t, s, mask, best)) {
        best = {gain, t, s, mask};
        best_users.clear();
        for (int u : users) {
          best_users.push_back(ids[static_cast<std::size_t>(u)]);
        }
        best_beams = beams;
        best_sinrs = sinrs;
      }
    }
  }

  ScheduleDecision out;
  if (best.t < 0) {
    return out;
  }
  out.subset_t = best.t;
  out.set_size = best.s;
  for (double g : best_sinrs) {
    out.predicted_sum_rate += std::log2(1.0 + g);
  }
  out.users = std::move(best_users);
  out.predicted_sinrs = std::move(best_sinrs);
  out.precoders.resize(antennas, static_cast<Eigen::Index>(best_beams.size()));
  for (std::size_t i = 0; i < best_beams.size(); ++i) {
    out.beams.push_back(codebook.index(best.t, best_beams[i]));
    out.powers.push_back(total_power / best.s);
    out.precoders.col(static_cast<Eigen::Index>(i)) = codebook.vector(out.beams.back().flat);
  }
  return out;
}

// INR sums over every beam set: table[mask * users + u] = sum_{m in mask} INR_u,m,
// accumulated by peeling the lowest set bit so each entry is an exact
// ordered sum independent of the enumeration path.
class PartialInrSinr {
 public:
  PartialInrSinr(std::span<const PartialInrReport> reports,
                 const std::vector<std::vector<int>>& user_ids, int antennas, double total_power)
      : reports_(reports), user_ids_(user_ids), antennas_(antennas), total_power_(total_power) {}

  void prepare(int t) {
    const auto& ids = user_ids_[static_cast<std::size_t>(t)];
    users_ = ids.size();
    inrs_.assign(users_ * static_cast<std::size_t>(antennas_), 0.0);
    for (std::size_t u = 0; u < users_; ++u) {
      const auto& r = reports_[static_cast<std::size_t>(ids[u])];
      for (int m = 0; m < antennas_; ++m) {
        inrs_[static_cast<std::size_t>(m) * users_ + u] = r.inrs[static_cast<std::size_t>(m)];
      }
    }
    table_.assign((std::size_t{1} << antennas_) * users_, 0.0);
  }

  void advance(int /*t*/, std::uint32_t mask) {
    const std::uint32_t parent = mask & (mask - 1);
    const int low = std::countr_zero(mask);
    const double* from = &table_[parent * users_];
    const double* add = &inrs_[static_cast<std::size_t>(low) * users_];
    double* to = &table_[mask * users_];
    for (std::size_t u = 0; u < users_; ++u) {
      to[u] = from[u] + add[u];
    }
  }

  void fill(int q, std::uint32_t mask, int s, double* out) const {
    const std::uint32_t others = mask & ~(1u << q);
    const double* interference = &table_[others * users_];
    const double* signal = &inrs_[static_cast<std::size_t>(q) * users_];
    const double floor = s / total_power_;
    for (std::size_t u = 0; u < users_; ++u) {
      out[u] = signal[u] / (floor + interference[u]);
    }
  }

 private:
  std::span<const PartialInrReport> reports_;
  const std::vector<std::vector<int>>& user_ids_;
  int antennas_;
  double total_power_;
  std::size_t users_ = 0;
  std::vector<double> inrs_;
  std::vector<double> table_;
};

class OneBitSinr {
 public:
  OneBitSinr(std::span<const OneBitInrReport> reports,
             const std::vector<std::vector<int>>& user_ids, int antennas, double total_power)
      : reports_(reports), user_ids_(user_ids), antennas_(antennas), total_power_(total_power) {}

  void prepare(int t) {
    const auto& ids = user_ids_[static_cast<std::size_t>(t)];
    serving_.clear();
    flags_.clear();
    snr_.clear();
    for (int k : ids) {
      const auto& r = reports_[static_cast<std::size_t>(k)];
      std::uint32_t flags = 0;
      for (int m = 0; m < antennas_; ++m) {
        if (r.flagged(m)) {
          flags |= 1u << m;
        }
      }
      serving_.push_back(r.beam.within_m);
      flags_.push_back(flags);
      snr_.push_back(r.snr);
    }
  }

  void advance(int, std::uint32_t) {}

  void fill(int q, std::uint32_t mask, int s, double* out) const {
    for (std::size_t i = 0; i < serving_.size(); ++i) {
      out[i] = (serving_[i] != q || (mask & flags_[i]) != 0) ? 0.0 : snr_[i] * total_power_ / s;
    }
  }

 private:
  std::span<const OneBitInrReport> reports_;
  const std::vector<std::vector<int>>& user_ids_;
  int antennas_;
  double total_power_;
  std::vector<int> serving_;
  std::vector<std::uint32_t> flags_;
  std::vector<double> snr_;
};

template <typename Report>
std::vector<std::vector<int>> users_by_subset(std::span<const Report> reports, int subsets,
                                              int antennas) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(subsets));
  for (int k = 0; k < static_cast<int>(reports.size()); ++k) {
    int t = 0;
    const auto& r = reports[static_cast<std::size_t>(k)];
    if constexpr (std::is_same_v<Report, PartialInrReport>) {
      t = r.subset_t;
      if (static_cast<int>(r.inrs.size()) != antennas) {
        throw ContractViolation("partial INR report does not cover the subset");
      }
    } else {
      t = r.beam.subset_t;
      if (static_cast<int>(r.bits.size()) != antennas - 1) {
        throw ContractViolation("one-bit report does not cover the subset");
      }
    }
    if (t < 0 || t >= subsets) {
      throw ContractViolation(fmt::format("report of user {} names subset {}", k, t));
    }
    out[static_cast<std::size_t>(t)].push_back(k);
  }
  return out;
}

}  // namespace

ScheduleDecision schedule_partial_inr(std::span<const PartialInrReport> reports,
                                      const Codebook& codebook, double total_power,
                                      const PartialInrOptions& options) {
  if (!(total_power > 0.0)) {
    throw ConfigError("total power must be positive");
  }
  check_cap(codebook.antennas(), codebook.subsets(), options);
  const auto ids = users_by_subset(reports, codebook.subsets(), codebook.antennas());
  PartialInrSinr sinr(reports, ids, codebook.antennas(), total_power);
  return run_flexible(ids, codebook, total_power, options, sinr);
}

ScheduleDecision schedule_one_bit_inr(std::span<const OneBitInrReport> reports,
                                      const Codebook& codebook, double total_power,
                                      const PartialInrOptions& options) {
  if (!(total_power > 0.0)) {
    throw ConfigError("total power must be positive");
  }
  check_cap(codebook.antennas(), codebook.subsets(), options);
  const auto ids = users_by_subset(reports, codebook.subsets(), codebook.antennas());
  OneBitSinr sinr(reports, ids, codebook.antennas(), total_power);
  return run_flexible(ids, codebook, total_power, options, sinr);
}

}  // namespace lfsim
