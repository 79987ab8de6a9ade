#include "lfsim/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace lfsim {

std::vector<double> exact_sinr(const ScheduleDecision& decision, const CMatrix& h_true,
                               const Eigen::VectorXd& noise_power) {
  const int s = decision.streams();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(s));
  if (s == 0) {
    return out;
  }
  if (decision.precoders.rows() != h_true.rows() || decision.precoders.cols() != s) {
    throw ContractViolation("decision precoders do not match the channel");
  }
  for (int i = 0; i < s; ++i) {
    const int k = decision.users[static_cast<std::size_t>(i)];
    const auto h = h_true.col(k);
    double signal = 0.0;
    double interference = 0.0;
    for (int j = 0; j < s; ++j) {
      const double g = decision.powers[static_cast<std::size_t>(j)] *
                       std::norm(h.dot(decision.precoders.col(j)));
      if (j == i) {
        signal = g;
      } else {
        interference += g;
      }
    }
    out.push_back(signal / (noise_power(k) + interference));
  }
  return out;
}

double sum_rate(std::span<const double> sinrs) {
  double total = 0.0;
  for (double g : sinrs) {
    total += std::log2(1.0 + g);
  }
  return total;
}

double outage_sum_rate(std::span<const double> predicted, std::span<const double> realized) {
  if (predicted.size() != realized.size()) {
    throw ContractViolation("predicted and realized SINR lists differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (realized[i] >= predicted[i]) {
      total += std::log2(1.0 + predicted[i]);
    }
  }
  return total;
}

double overhead_factor(PilotFamily family, int streams, int max_streams,
                       const PilotGrouping* grouping) {
  if (streams < 1 || streams > max_streams) {
    throw ContractViolation(
        fmt::format("stream count {} outside [1, {}]", streams, max_streams));
  }
  if (family == PilotFamily::kNoInr) {
    return (11.0 - static_cast<double>((streams + 1) / 2)) / 14.0;
  }
  if (grouping != nullptr) {
    return (11.0 - static_cast<double>(grouping->symbols_used)) / 14.0;
  }
  return 10.0 / 14.0;
}

double adjusted_throughput(double sum_rate_raw, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw ContractViolation(fmt::format("overhead factor {} outside (0, 1]", kappa));
  }
  return kappa * sum_rate_raw;
}

}  // namespace lfsim
