#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lfsim {

// Asymptotic sum-rate expressions for i.i.d. Rayleigh fading. o(1) terms are
// dropped, so values are "asymptotic" predictions; compare trends and argmax
// against Monte Carlo rather than absolute rates. The log base applies to
// both logarithms of log log(.) and to log(P/s).

enum class LogBase { kNatural, kTwo };

enum class InrVariant {
  /// Single subset: effective candidate count K.
  kSingleSubset,
  /// Full feedback over T subsets: K * T.
  kFull,
  /// Partial feedback with users split evenly over T subsets: K / T.
  kPartial,
};

std::string_view to_string(InrVariant variant);
std::string_view to_string(LogBase base);

/// Random beamforming: M L(L(K)) + M L(P / M). Throws DomainError unless
/// L(K) > 1 (K > e for natural log), M >= 1 and P > 0.
double rbf_scaling(int antennas, double users, double total_power,
                   LogBase base = LogBase::kNatural);

struct ScalingPrediction {
  InrVariant variant = InrVariant::kSingleSubset;
  LogBase base = LogBase::kNatural;
  /// objective[s - 1] = s L(L(N C(M-1, s-1))) + s L(P / s), s = 1..M.
  std::vector<double> objective;
  /// Exact C(M-1, s-1) as decimal strings, s = 1..M.
  std::vector<std::string> binomials;
  int s_star = 1;
  double predicted = 0.0;
};

/// Flexible-scheduling objective for every s with exact binomial
/// coefficients; argmax ties go to the smaller s. Throws DomainError when the
/// effective user count (K, K T or K / T) does not exceed the log base.
ScalingPrediction inr_scaling(int antennas, double users, int subsets, double total_power,
                              InrVariant variant, LogBase base = LogBase::kNatural);

struct LimitReport {
  std::vector<double> users;
  std::vector<double> gaps;  // INR prediction minus RBF prediction
  std::vector<int> s_star;
  bool reached_full_multiplexing = false;
  /// Gaps are non-increasing from their maximum to the end of the grid.
  bool tail_nonincreasing = false;
};

/// Evaluates the single-subset INR prediction against RBF along an
/// increasing K grid.
LimitReport limit_consistency_check(int antennas, double total_power,
                                    std::span<const double> user_grid,
                                    LogBase base = LogBase::kNatural);

/// Exact binomial coefficient as a decimal string.
std::string binomial(int n, int k);

/// CSV rows M,K,T,P,variant,s,objective,is_argmax (no header).
void write_scaling_rows(std::ostream& out, int antennas, double users, int subsets,
                        double total_power, const ScalingPrediction& prediction);
inline constexpr std::string_view kScalingCsvHeader = "M,K,T,P,variant,s,objective,is_argmax";

}  // namespace lfsim
