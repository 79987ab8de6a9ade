#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "lfsim/codebook.hpp"
#include "lfsim/feedback.hpp"
#include "lfsim/types.hpp"

namespace lfsim {

/// Users picked for one transmission and how they are served.
///
/// users[i] is served on precoders.col(i) with power powers[i]. For codebook
/// schemes beams[i] names the codebook vector (RBF uses subset 0 and the
/// random-beam column); ZFBF leaves beams empty because its precoders are
/// explicit. set_size is the s the power split was computed for; it can
/// exceed the number of users when the greedy loop stopped early.
struct ScheduleDecision {
  std::vector<int> users;
  std::vector<BeamIndex> beams;
  CMatrix precoders;
  std::vector<double> powers;
  std::vector<double> predicted_sinrs;
  double predicted_sum_rate = 0.0;
  int subset_t = -1;
  int set_size = 0;

  int streams() const { return static_cast<int>(users.size()); }
  bool empty() const { return users.empty(); }
};

/// Checks the structural invariants (sizes, distinct users and beams, power
/// budget, single subset when `single_subset`). Throws ContractViolation.
void check_decision(const ScheduleDecision& decision, double total_power, int max_streams,
                    bool single_subset = false);

/// SINR of the user on beam `serving` when the beams in `active_set` are all
/// transmitted at power P/s, reconstructed from the user's per-beam INRs:
/// INR_q / (s/P + sum_{j in set, j != q} INR_j). `inrs` is indexed by beam id.
double sinr_from_inrs(std::span<const double> inrs, int serving, std::span<const int> active_set,
                      double total_power);

/// Conventional scheduling on (beam index, SINR) feedback: best user per beam,
/// then the subset with the largest sum rate. Powers are P/M per beam.
ScheduleDecision schedule_dft_sinr(std::span<const SinrReport> reports, const Codebook& codebook,
                                   double total_power);

enum class ConflictRule {
  /// Stop the beam loop when the best user already holds a beam.
  kStop,
  /// Hand the beam to the best user that holds no beam yet.
  kNextBestUser,
};

struct PartialInrOptions {
  ConflictRule conflict = ConflictRule::kStop;
  /// Upper bound on T * 2^M enumerated (subset, beam-set) states.
  std::int64_t enumeration_cap = std::int64_t{1} << 20;
};

/// Flexible scheduling on partial INR feedback. Enumerates every subset t and
/// every non-empty beam set of that subset, assigns users beam by beam in
/// index order, and returns the set with the largest sum rate. Ties go to the
/// smaller t, then smaller s, then the lexicographically first set.
ScheduleDecision schedule_partial_inr(std::span<const PartialInrReport> reports,
                                      const Codebook& codebook, double total_power,
                                      const PartialInrOptions& options = {});

/// Same search on one-bit feedback. A user can only be served on its reported
/// beam, and only when none of the other active beams is flagged; the SINR is
/// then predicted as SNR * P / s.
ScheduleDecision schedule_one_bit_inr(std::span<const OneBitInrReport> reports,
                                      const Codebook& codebook, double total_power,
                                      const PartialInrOptions& options = {});

enum class FullInrMode { kGreedy, kExhaustive };

inline constexpr std::int64_t kFullInrEnumerationCap = 1'000'000;

/// Number of beam sets sum_{s=1}^{M} C(MT, s) the exhaustive search visits
/// (saturates at INT64_MAX).
std::int64_t full_inr_search_size(int codebook_size, int antennas);

/// Scheduling on full INR feedback over beams from every subset.
/// Exhaustive mode solves each beam set's user assignment exactly and throws
/// ConfigError when the search size exceeds `cap`.
ScheduleDecision schedule_full_inr(std::span<const FullInrReport> reports,
                                   const Codebook& codebook, double total_power, FullInrMode mode,
                                   std::int64_t cap = kFullInrEnumerationCap);

/// Random beamforming on the unitary columns of `beams`, all at power P/M.
/// Users that win several beams keep their best; freed beams go to the best
/// user still without a beam, or are dropped.
ScheduleDecision schedule_rbf(const CMatrix& channel, const Eigen::VectorXd& noise_power,
                              const CMatrix& beams, double total_power);

inline constexpr double kDefaultSusEpsilon = 0.3;

/// Zero-forcing with semi-orthogonal user selection on `channel` (the CSIT
/// estimate). Equal power P/S; predicted SINRs are computed on `channel`.
ScheduleDecision schedule_zfbf_sus(const CMatrix& channel, const Eigen::VectorXd& noise_power,
                                   double total_power, double epsilon = kDefaultSusEpsilon);

/// Users sharing a dedicated-pilot resource.
struct PilotGrouping {
  std::vector<std::vector<int>> groups;
  int symbols_used = 0;
};

inline constexpr double kDefaultPilotThresholdDb = -20.0;

/// First-fit colouring of the pilot conflict graph. inr_table(i, j) is the
/// INR of scheduled user i toward the beam of scheduled user j (decision
/// order); two users conflict when either one's cross INR relative to its own
/// serving INR reaches the threshold. Two groups share one pilot symbol.
PilotGrouping pilot_grouping(const ScheduleDecision& decision, const RMatrix& inr_table,
                             double threshold_db = kDefaultPilotThresholdDb);

/// Builds pilot_grouping's table from the reports of all K users.
RMatrix pilot_inr_table(const ScheduleDecision& decision,
                        std::span<const PartialInrReport> reports);
RMatrix pilot_inr_table(const ScheduleDecision& decision, std::span<const FullInrReport> reports);

/// CSV row: drop,scheme,S,t,beams,users,predicted_rate (lists ';'-separated).
void write_decision_row(std::ostream& out, std::int64_t drop, std::string_view scheme,
                        const ScheduleDecision& decision);

}  // namespace lfsim
