#include "lfsim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace lfsim {

namespace {

double rate(double sinr) { return std::log2(1.0 + sinr); }

void fill_codebook_precoders(ScheduleDecision& decision, const Codebook& codebook) {
  decision.precoders.resize(codebook.antennas(), decision.streams());
  for (int i = 0; i < decision.streams(); ++i) {
    decision.precoders.col(i) = codebook.vector(decision.beams[static_cast<std::size_t>(i)].flat);
  }
}

}  // namespace

void check_decision(const ScheduleDecision& d, double total_power, int max_streams,
                    bool single_subset) {
  const auto s = d.users.size();
  if (d.powers.size() != s || d.predicted_sinrs.size() != s ||
      static_cast<std::size_t>(d.precoders.cols()) != s) {
    throw ContractViolation("decision fields disagree on the number of streams");
  }
  if (!d.beams.empty() && d.beams.size() != s) {
    throw ContractViolation("decision has a beam count different from its user count");
  }
  if (static_cast<int>(s) > max_streams) {
    throw ContractViolation(fmt::format("decision schedules {} > {} streams", s, max_streams));
  }
  if (std::set<int>(d.users.begin(), d.users.end()).size() != s) {
    throw ContractViolation("a user appears twice in the decision");
  }
  std::set<int> flats;
  for (const auto& b : d.beams) {
    flats.insert(b.flat);
    if (single_subset && b.subset_t != d.subset_t) {
      throw ContractViolation("decision mixes beams from different subsets");
    }
  }
  if (flats.size() != d.beams.size()) {
    throw ContractViolation("a beam appears twice in the decision");
  }
  const double used = std::accumulate(d.powers.begin(), d.powers.end(), 0.0);
  if (used > total_power * (1.0 + 1e-9)) {
    throw ContractViolation(fmt::format("power {} exceeds budget {}", used, total_power));
  }
  for (double p : d.powers) {
    if (p < 0.0) {
      throw ContractViolation("negative power in decision");
    }
  }
}

double sinr_from_inrs(std::span<const double> inrs, int serving, std::span<const int> active_set,
                      double total_power) {
  if (!(total_power > 0.0)) {
    throw ContractViolation("total power must be positive");
  }
  if (std::find(active_set.begin(), active_set.end(), serving) == active_set.end()) {
    throw ContractViolation(fmt::format("serving beam {} not in the active set", serving));
  }
  const auto s = static_cast<double>(active_set.size());
  double interference = 0.0;
  for (int j : active_set) {
    if (j < 0 || static_cast<std::size_t>(j) >= inrs.size()) {
      throw ContractViolation(fmt::format("beam {} has no INR", j));
    }
    if (j != serving) {
      interference += inrs[static_cast<std::size_t>(j)];
    }
  }
  return inrs[static_cast<std::size_t>(serving)] / (s / total_power + interference);
}

ScheduleDecision schedule_dft_sinr(std::span<const SinrReport> reports, const Codebook& codebook,
                                   double total_power) {
  ScheduleDecision out;
  if (reports.empty()) {
    return out;
  }
  const int antennas = codebook.antennas();
  int best_t = -1;
  double best_sum = -1.0;
  std::vector<int> best_users;

  for (int t = 0; t < codebook.subsets(); ++t) {
    std::vector<int> winner(static_cast<std::size_t>(antennas), -1);
    for (int k = 0; k < static_cast<int>(reports.size()); ++k) {
      const auto& r = reports[static_cast<std::size_t>(k)];
      if (r.beam.subset_t != t) {
        continue;
      }
      int& w = winner[static_cast<std::size_t>(r.beam.within_m)];
      if (w < 0 || r.sinr > reports[static_cast<std::size_t>(w)].sinr) {
        w = k;
      }
    }
    double sum = 0.0;
    bool any = false;
    for (int w : winner) {
      if (w >= 0) {
        any = true;
        sum += rate(reports[static_cast<std::size_t>(w)].sinr);
      }
    }
    if (any && sum > best_sum) {
      best_sum = sum;
      best_t = t;
      best_users = std::move(winner);
    }
  }

  out.subset_t = best_t;
  out.set_size = antennas;
  for (int m = 0; m < antennas; ++m) {
    const int k = best_users[static_cast<std::size_t>(m)];
    if (k < 0) {
      continue;
    }
    out.users.push_back(k);
    out.beams.push_back(codebook.index(best_t, m));
    out.powers.push_back(total_power / antennas);
    out.predicted_sinrs.push_back(reports[static_cast<std::size_t>(k)].sinr);
  }
  out.predicted_sum_rate = best_sum;
  fill_codebook_precoders(out, codebook);
  return out;
}

std::int64_t full_inr_search_size(int codebook_size, int antennas) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t total = 0;
  long double binom = 1.0L;
  for (int s = 1; s <= std::min(antennas, codebook_size); ++s) {
    binom = binom * static_cast<long double>(codebook_size - s + 1) / static_cast<long double>(s);
    if (binom + static_cast<long double>(total) >= static_cast<long double>(kMax)) {
      return kMax;
    }
    total += static_cast<std::int64_t>(std::llround(binom));
  }
  return total;
}

namespace {

struct Assignment {
  double value = -1.0;
  std::vector<int> user_of_beam;
};

// Max-weight assignment of every beam (columns of weights) to a distinct user
// (rows), by DP over the set of beams already taken.
Assignment assign_all_beams(const RMatrix& weights) {
  const auto users = static_cast<int>(weights.rows());
  const auto beams = static_cast<int>(weights.cols());
  const int full = (1 << beams) - 1;
  constexpr double kNone = -std::numeric_limits<double>::infinity();

  std::vector<double> dp(static_cast<std::size_t>(full + 1), kNone);
  std::vector<std::int8_t> choice(static_cast<std::size_t>(users) * (full + 1), -1);
  dp[0] = 0.0;
  for (int k = 0; k < users; ++k) {
    std::vector<double> next = dp;
    auto* pick = &choice[static_cast<std::size_t>(k) * (full + 1)];
    for (int mask = 0; mask <= full; ++mask) {
      if (dp[static_cast<std::size_t>(mask)] == kNone) {
        continue;
      }
      for (int i = 0; i < beams; ++i) {
        if (mask & (1 << i)) {
          continue;
        }
        const double cand = dp[static_cast<std::size_t>(mask)] + weights(k, i);
        const int target = mask | (1 << i);
        if (cand > next[static_cast<std::size_t>(target)]) {
          next[static_cast<std::size_t>(target)] = cand;
          pick[target] = static_cast<std::int8_t>(i);
        }
      }
    }
    dp = std::move(next);
  }

  Assignment out;
  if (dp[static_cast<std::size_t>(full)] == kNone) {
    return out;
  }
  out.value = dp[static_cast<std::size_t>(full)];
  out.user_of_beam.assign(static_cast<std::size_t>(beams), -1);
  int mask = full;
  for (int k = users - 1; k >= 0 && mask != 0; --k) {
    // pick >= 0 means user k's beam improved on leaving k idle at this mask.
    const int i = choice[static_cast<std::size_t>(k) * (full + 1) + mask];
    if (i >= 0) {
      out.user_of_beam[static_cast<std::size_t>(i)] = k;
      mask ^= 1 << i;
    }
  }
  return out;
}

}  // namespace

ScheduleDecision schedule_full_inr(std::span<const FullInrReport> reports,
                                   const Codebook& codebook, double total_power, FullInrMode mode,
                                   std::int64_t cap) {
  ScheduleDecision out;
  if (reports.empty()) {
    return out;
  }
  const int antennas = codebook.antennas();
  const int size = codebook.size();
  const int users = static_cast<int>(reports.size());
  for (const auto& r : reports) {
    if (static_cast<int>(r.inrs.size()) != size) {
      throw ContractViolation("full INR report does not cover the codebook");
    }
  }
  const int max_s = std::min(antennas, users);

  std::vector<int> chosen_beams;
  std::vector<int> chosen_users;

  if (mode == FullInrMode::kExhaustive) {
    const std::int64_t visits = full_inr_search_size(size, antennas);
    if (visits > cap) {
      throw ConfigError(fmt::format(
          "exhaustive full-INR search visits {} beam sets (cap {}); use greedy mode", visits,
          cap));
    }
    double best = -1.0;
    for (int s = 1; s <= max_s; ++s) {
      std::vector<int> combo(static_cast<std::size_t>(s));
      std::iota(combo.begin(), combo.end(), 0);
      RMatrix weights(users, s);
      while (true) {
        for (int k = 0; k < users; ++k) {
          const auto& inrs = reports[static_cast<std::size_t>(k)].inrs;
          for (int i = 0; i < s; ++i) {
            weights(k, i) =
                rate(sinr_from_inrs(inrs, combo[static_cast<std::size_t>(i)], combo, total_power));
          }
        }
        Assignment a = assign_all_beams(weights);
        if (a.value > best) {
          best = a.value;
          chosen_beams = combo;
          chosen_users = std::move(a.user_of_beam);
        }
        // Next combination in lexicographic order.
        int i = s - 1;
        while (i >= 0 && combo[static_cast<std::size_t>(i)] == size - s + i) {
          --i;
        }
        if (i < 0) {
          break;
        }
        ++combo[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < s; ++j) {
          combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
        }
      }
    }
  } else {
    // Greedy: add the (user, beam) pair that raises the equal-power sum rate most.
    std::vector<double> interference;  // per scheduled user, over the other active beams
    std::vector<char> user_used(static_cast<std::size_t>(users), 0);
    std::vector<char> beam_used(static_cast<std::size_t>(size), 0);
    double current = 0.0;
    while (static_cast<int>(chosen_beams.size()) < max_s) {
      const double noise_term = static_cast<double>(chosen_beams.size() + 1) / total_power;
      double best = current;
      int best_k = -1;
      int best_l = -1;
      for (int k = 0; k < users; ++k) {
        if (user_used[static_cast<std::size_t>(k)]) {
          continue;
        }
        const auto& inrs_k = reports[static_cast<std::size_t>(k)].inrs;
        double base_k = 0.0;
        for (int b : chosen_beams) {
          base_k += inrs_k[static_cast<std::size_t>(b)];
        }
        for (int l = 0; l < size; ++l) {
          if (beam_used[static_cast<std::size_t>(l)]) {
            continue;
          }
          double total = rate(inrs_k[static_cast<std::size_t>(l)] / (noise_term + base_k));
          for (std::size_t i = 0; i < chosen_users.size(); ++i) {
            const auto& inrs_u = reports[static_cast<std::size_t>(chosen_users[i])].inrs;
            total += rate(inrs_u[static_cast<std::size_t>(chosen_beams[i])] /
                          (noise_term + interference[i] + inrs_u[static_cast<std::size_t>(l)]));
          }
          if (total > best) {
            best = total;
            best_k = k;
            best_l = l;
          }
        }
      }
      if (best_k < 0) {
        break;
      }
      for (std::size_t i = 0; i < chosen_users.size(); ++i) {
        interference[i] += reports[static_cast<std::size_t>(chosen_users[i])]
                               .inrs[static_cast<std::size_t>(best_l)];
      }
      double base = 0.0;
      for (int b : chosen_beams) {
        base += reports[static_cast<std::size_t>(best_k)].inrs[static_cast<std::size_t>(b)];
      }
      interference.push_back(base);
      chosen_users.push_back(best_k);
      chosen_beams.push_back(best_l);
      user_used[static_cast<std::size_t>(best_k)] = 1;
      beam_used[static_cast<std::size_t>(best_l)] = 1;
      current = best;
    }
    // Report in flat-beam order.
    std::vector<std::size_t> order(chosen_beams.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return chosen_beams[a] < chosen_beams[b]; });
    std::vector<int> beams_sorted;
    std::vector<int> users_sorted;
    for (auto i : order) {
      beams_sorted.push_back(chosen_beams[i]);
      users_sorted.push_back(chosen_users[i]);
    }
    chosen_beams = std::move(beams_sorted);
    chosen_users = std::move(users_sorted);
  }

  const int s = static_cast<int>(chosen_beams.size());
  out.set_size = s;
  double total = 0.0;
  for (int i = 0; i < s; ++i) {
    const int k = chosen_users[static_cast<std::size_t>(i)];
    const int l = chosen_beams[static_cast<std::size_t>(i)];
    const double sinr =
        sinr_from_inrs(reports[static_cast<std::size_t>(k)].inrs, l, chosen_beams, total_power);
    out.users.push_back(k);
    out.beams.push_back(codebook.index(l));
    out.powers.push_back(total_power / s);
    out.predicted_sinrs.push_back(sinr);
    total += rate(sinr);
  }
  out.predicted_sum_rate = total;
  fill_codebook_precoders(out, codebook);
  return out;
}

ScheduleDecision schedule_rbf(const CMatrix& channel, const Eigen::VectorXd& noise_power,
                              const CMatrix& beams, double total_power) {
  const auto antennas = static_cast<int>(beams.cols());
  const auto users = static_cast<int>(channel.cols());
  if (channel.rows() != beams.rows() || noise_power.size() != users) {
    throw ContractViolation("RBF inputs have inconsistent dimensions");
  }
  ScheduleDecision out;
  out.set_size = antennas;
  if (users == 0) {
    return out;
  }

  // gains(k, m) = |h_k^H b_m|^2
  const RMatrix gains = (channel.adjoint() * beams).cwiseAbs2();
  RMatrix sinr(users, antennas);
  for (int k = 0; k < users; ++k) {
    for (int m = 0; m < antennas; ++m) {
      double interference = 0.0;
      for (int j = 0; j < antennas; ++j) {
        if (j != m) {
          interference += gains(k, j);
        }
      }
      sinr(k, m) = gains(k, m) / (antennas / total_power * noise_power(k) + interference);
    }
  }

  std::vector<int> holder(static_cast<std::size_t>(antennas), -1);
  for (int m = 0; m < antennas; ++m) {
    int best = 0;
    for (int k = 1; k < users; ++k) {
      if (sinr(k, m) > sinr(best, m)) {
        best = k;
      }
    }
    holder[static_cast<std::size_t>(m)] = best;
  }
  // A user with several wins keeps its strongest beam.
  std::vector<int> kept(static_cast<std::size_t>(users), -1);
  for (int m = 0; m < antennas; ++m) {
    const int k = holder[static_cast<std::size_t>(m)];
    int& keep = kept[static_cast<std::size_t>(k)];
    if (keep < 0 || sinr(k, m) > sinr(k, keep)) {
      keep = m;
    }
  }
  for (int m = 0; m < antennas; ++m) {
    const int k = holder[static_cast<std::size_t>(m)];
    if (kept[static_cast<std::size_t>(k)] != m) {
      holder[static_cast<std::size_t>(m)] = -1;
    }
  }
  std::vector<char> busy(static_cast<std::size_t>(users), 0);
  for (int m = 0; m < antennas; ++m) {
    if (holder[static_cast<std::size_t>(m)] >= 0) {
      busy[static_cast<std::size_t>(holder[static_cast<std::size_t>(m)])] = 1;
    }
  }
  for (int m = 0; m < antennas; ++m) {
    if (holder[static_cast<std::size_t>(m)] >= 0) {
      continue;
    }
    int best = -1;
    for (int k = 0; k < users; ++k) {
      if (!busy[static_cast<std::size_t>(k)] && (best < 0 || sinr(k, m) > sinr(best, m))) {
        best = k;
      }
    }
    if (best >= 0) {
      holder[static_cast<std::size_t>(m)] = best;
      busy[static_cast<std::size_t>(best)] = 1;
    }
  }

  double total = 0.0;
  for (int m = 0; m < antennas; ++m) {
    const int k = holder[static_cast<std::size_t>(m)];
    if (k < 0) {
      continue;
    }
    out.users.push_back(k);
    out.beams.push_back(BeamIndex{0, m, m});
    out.powers.push_back(total_power / antennas);
    out.predicted_sinrs.push_back(sinr(k, m));
    total += rate(sinr(k, m));
  }
  out.predicted_sum_rate = total;
  out.subset_t = 0;
  out.precoders.resize(beams.rows(), out.streams());
  for (int i = 0; i < out.streams(); ++i) {
    out.precoders.col(i) = beams.col(out.beams[static_cast<std::size_t>(i)].within_m);
  }
  return out;
}

namespace {

struct ZfResult {
  CMatrix precoders;
  std::vector<double> sinrs;
  double sum_rate = 0.0;
};

ZfResult zero_forcing(const CMatrix& channel, const Eigen::VectorXd& noise_power,
                      double total_power, const std::vector<int>& users) {
  const auto s = static_cast<Eigen::Index>(users.size());
  CMatrix hs(channel.rows(), s);
  for (Eigen::Index i = 0; i < s; ++i) {
    hs.col(i) = channel.col(users[static_cast<std::size_t>(i)]);
  }
  // Columns of pinv(H_S^H) null every other selected user.
  CMatrix w = hs.adjoint().completeOrthogonalDecomposition().pseudoInverse();
  for (Eigen::Index i = 0; i < s; ++i) {
    const double n = w.col(i).norm();
    if (n > 0.0) {
      w.col(i) /= n;
    }
  }
  ZfResult out;
  const double p = total_power / static_cast<double>(s);
  const RMatrix gains = (hs.adjoint() * w).cwiseAbs2();
  for (Eigen::Index i = 0; i < s; ++i) {
    double interference = 0.0;
    for (Eigen::Index j = 0; j < s; ++j) {
      if (j != i) {
        interference += p * gains(i, j);
      }
    }
    const double sinr =
        p * gains(i, i) / (noise_power(users[static_cast<std::size_t>(i)]) + interference);
    out.sinrs.push_back(sinr);
    out.sum_rate += rate(sinr);
  }
  out.precoders = std::move(w);
  return out;
}

}  // namespace

ScheduleDecision schedule_zfbf_sus(const CMatrix& channel, const Eigen::VectorXd& noise_power,
                                   double total_power, double epsilon) {
  const auto antennas = static_cast<int>(channel.rows());
  const auto users = static_cast<int>(channel.cols());
  if (noise_power.size() != users) {
    throw ContractViolation("noise power vector does not match user count");
  }
  ScheduleDecision out;
  if (users == 0) {
    return out;
  }

  const Eigen::VectorXd norms = channel.colwise().norm().transpose();
  std::vector<char> candidate(static_cast<std::size_t>(users), 1);
  std::vector<int> selected;
  std::vector<CVector> basis;  // orthonormal basis of the selected residuals
  ZfResult current;

  while (static_cast<int>(selected.size()) < antennas) {
    int pick = -1;
    double pick_norm = -1.0;
    for (int k = 0; k < users; ++k) {
      if (!candidate[static_cast<std::size_t>(k)]) {
        continue;
      }
      CVector g = channel.col(k);
      for (const auto& e : basis) {
        g -= e * e.dot(g);
      }
      const double n = g.norm();
      if (n > pick_norm) {
        pick_norm = n;
        pick = k;
      }
    }
    if (pick < 0) {
      break;
    }
    std::vector<int> trial = selected;
    trial.push_back(pick);
    ZfResult next = zero_forcing(channel, noise_power, total_power, trial);
    if (!selected.empty() && next.sum_rate < current.sum_rate) {
      break;
    }
    selected = std::move(trial);
    current = std::move(next);
    if (pick_norm > 0.0) {
      CVector g = channel.col(pick);
      for (const auto& e : basis) {
        g -= e * e.dot(g);
      }
      basis.push_back(g / g.norm());
    }
    candidate[static_cast<std::size_t>(pick)] = 0;
    for (int k = 0; k < users; ++k) {
      if (!candidate[static_cast<std::size_t>(k)]) {
        continue;
      }
      const double denom = norms(k) * norms(pick);
      const double corr =
          denom > 0.0 ? std::abs(channel.col(k).dot(channel.col(pick))) / denom : 1.0;
      if (corr >= epsilon) {
        candidate[static_cast<std::size_t>(k)] = 0;
      }
    }
  }

  out.users = selected;
  out.set_size = static_cast<int>(selected.size());
  out.precoders = std::move(current.precoders);
  out.powers.assign(selected.size(), total_power / static_cast<double>(selected.size()));
  out.predicted_sinrs = std::move(current.sinrs);
  out.predicted_sum_rate = current.sum_rate;
  return out;
}

PilotGrouping pilot_grouping(const ScheduleDecision& decision, const RMatrix& inr_table,
                             double threshold_db) {
  const int s = decision.streams();
  if (inr_table.rows() != s || inr_table.cols() != s || inr_table.hasNaN()) {
    throw ContractViolation("pilot INR table must be a complete S x S table");
  }
  const double threshold = std::pow(10.0, threshold_db / 10.0);
  auto conflict = [&](int i, int j) {
    return inr_table(i, j) >= threshold * inr_table(i, i) ||
           inr_table(j, i) >= threshold * inr_table(j, j);
  };

  std::vector<std::vector<int>> slots;  // decision positions per group
  for (int i = 0; i < s; ++i) {
    bool placed = false;
    for (auto& group : slots) {
      const bool clear =
          std::none_of(group.begin(), group.end(), [&](int j) { return conflict(i, j); });
      if (clear) {
        group.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      slots.push_back({i});
    }
  }

  PilotGrouping out;
  for (const auto& group : slots) {
    std::vector<int> members;
    for (int i : group) {
      members.push_back(decision.users[static_cast<std::size_t>(i)]);
    }
    out.groups.push_back(std::move(members));
  }
  out.symbols_used = (static_cast<int>(out.groups.size()) + 1) / 2;
  return out;
}

RMatrix pilot_inr_table(const ScheduleDecision& decision,
                        std::span<const PartialInrReport> reports) {
  const int s = decision.streams();
  RMatrix table(s, s);
  for (int i = 0; i < s; ++i) {
    const auto& r = reports[static_cast<std::size_t>(decision.users[static_cast<std::size_t>(i)])];
    for (int j = 0; j < s; ++j) {
      const BeamIndex& b = decision.beams[static_cast<std::size_t>(j)];
      table(i, j) = b.subset_t == r.subset_t
                        ? r.inrs[static_cast<std::size_t>(b.within_m)]
                        : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return table;
}

RMatrix pilot_inr_table(const ScheduleDecision& decision, std::span<const FullInrReport> reports) {
  const int s = decision.streams();
  RMatrix table(s, s);
  for (int i = 0; i < s; ++i) {
    const auto& r = reports[static_cast<std::size_t>(decision.users[static_cast<std::size_t>(i)])];
    for (int j = 0; j < s; ++j) {
      table(i, j) = r.inrs[static_cast<std::size_t>(decision.beams[static_cast<std::size_t>(j)].flat)];
    }
  }
  return table;
}

void write_decision_row(std::ostream& out, std::int64_t drop, std::string_view scheme,
                        const ScheduleDecision& decision) {
  std::vector<int> flats;
  for (const auto& b : decision.beams) {
    flats.push_back(b.flat);
  }
  fmt::print(out, "{},{},{},{},{},{},{:.17g}\n", drop, scheme, decision.streams(),
             decision.subset_t, fmt::join(flats, ";"), fmt::join(decision.users, ";"),
             decision.predicted_sum_rate);
}

}  // namespace lfsim
