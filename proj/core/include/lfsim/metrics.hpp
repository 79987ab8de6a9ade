#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfsim/scheduler.hpp"
#include "lfsim/types.hpp"

namespace lfsim {

/// Which dedicated-pilot accounting a scheme falls under.
enum class PilotFamily {
  /// Conventional feedback (ZFBF-SUS, DFT-SINR, RBF): one pilot symbol per two streams.
  kNoInr,
  /// INR feedback: pilots share resources, fixed 10/14 or derived from a grouping.
  kInr,
};

/// Realized per-user SINRs of a decision on the true channel:
/// p_k |h_k^H w_k|^2 / (sigma_k^2 + sum_{j != k} p_j |h_k^H w_j|^2).
std::vector<double> exact_sinr(const ScheduleDecision& decision, const CMatrix& h_true,
                               const Eigen::VectorXd& noise_power);

/// sum_k log2(1 + sinr_k).
double sum_rate(std::span<const double> sinrs);

/// Rate with outage: a user gets its predicted rate when the realized SINR
/// reaches the prediction, otherwise nothing.
double outage_sum_rate(std::span<const double> predicted, std::span<const double> realized);

/// Fraction of OFDM symbols left for data after control and dedicated pilots.
/// kNoInr: (11 - ceil(S/2)) / 14. kInr: 10/14, or (11 - symbols_used) / 14
/// when a grouping is passed. Throws ContractViolation for S outside
/// [1, max_streams].
double overhead_factor(PilotFamily family, int streams, int max_streams,
                       const PilotGrouping* grouping = nullptr);

/// raw * kappa; kappa must lie in (0, 1].
double adjusted_throughput(double sum_rate_raw, double kappa);

struct DropResult {
  std::string scheme;
  int streams = 0;
  double sum_rate_raw = 0.0;
  double sum_rate_outage = 0.0;
  double predicted_rate = 0.0;
  double overhead = 1.0;
  double sum_rate_adjusted = 0.0;
  std::vector<double> realized_sinrs;
};

}  // namespace lfsim
