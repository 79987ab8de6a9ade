#include "lfsim/analysis.hpp"

#include <cmath>
#include <ostream>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lfsim/types.hpp"

namespace lfsim {

namespace {

using boost::multiprecision::cpp_int;

double log_in(double x, LogBase base) {
  return base == LogBase::kNatural ? std::log(x) : std::log2(x);
}

double log_base_value(LogBase base) { return base == LogBase::kNatural ? std::exp(1.0) : 2.0; }

cpp_int exact_binomial(int n, int k) {
  if (k < 0 || k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  cpp_int c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

// Shared by both expressions so that s = M with a unit coefficient reproduces
// the RBF value bit for bit.
double scaling_term(int s, double candidates, double total_power, LogBase base) {
  const double sd = static_cast<double>(s);
  return sd * log_in(log_in(candidates, base), base) + sd * log_in(total_power / sd, base);
}

}  // namespace

std::string_view to_string(InrVariant variant) {
  switch (variant) {
    case InrVariant::kSingleSubset:
      return "T1";
    case InrVariant::kFull:
      return "full";
    case InrVariant::kPartial:
      return "partial";
  }
  return "?";
}

std::string_view to_string(LogBase base) { return base == LogBase::kNatural ? "e" : "2"; }

double rbf_scaling(int antennas, double users, double total_power, LogBase base) {
  if (antennas < 1 || !(total_power > 0.0)) {
    throw DomainError("RBF scaling needs M >= 1 and P > 0");
  }
  if (!(users > log_base_value(base))) {
    throw DomainError(fmt::format("log log K undefined or non-positive for K = {}", users));
  }
  return scaling_term(antennas, users, total_power, base);
}

ScalingPrediction inr_scaling(int antennas, double users, int subsets, double total_power,
                              InrVariant variant, LogBase base) {
  if (antennas < 1 || subsets < 1 || !(total_power > 0.0)) {
    throw DomainError("INR scaling needs M >= 1, T >= 1 and P > 0");
  }
  double effective = users;
  if (variant == InrVariant::kFull) {
    effective = users * subsets;
  } else if (variant == InrVariant::kPartial) {
    effective = users / subsets;
  }
  if (!(effective > log_base_value(base))) {
    throw DomainError(
        fmt::format("effective user count {} too small for log log", effective));
  }

  ScalingPrediction out;
  out.variant = variant;
  out.base = base;
  for (int s = 1; s <= antennas; ++s) {
    const cpp_int c = exact_binomial(antennas - 1, s - 1);
    out.binomials.push_back(c.str());
    const double candidates = effective * c.convert_to<double>();
    const double value = scaling_term(s, candidates, total_power, base);
    out.objective.push_back(value);
    if (s == 1 || value > out.predicted) {
      out.predicted = value;
      out.s_star = s;
    }
  }
  return out;
}

LimitReport limit_consistency_check(int antennas, double total_power,
                                    std::span<const double> user_grid, LogBase base) {
  LimitReport out;
  for (std::size_t i = 0; i < user_grid.size(); ++i) {
    if (i > 0 && !(user_grid[i] > user_grid[i - 1])) {
      throw ConfigError("K grid must be strictly increasing");
    }
    const auto inr = inr_scaling(antennas, user_grid[i], 1, total_power,
                                 InrVariant::kSingleSubset, base);
    out.users.push_back(user_grid[i]);
    out.gaps.push_back(inr.predicted - rbf_scaling(antennas, user_grid[i], total_power, base));
    out.s_star.push_back(inr.s_star);
  }
  if (out.gaps.empty()) {
    return out;
  }
  out.reached_full_multiplexing = out.s_star.back() == antennas;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < out.gaps.size(); ++i) {
    if (out.gaps[i] > out.gaps[peak]) {
      peak = i;
    }
  }
  out.tail_nonincreasing = true;
  for (std::size_t i = peak + 1; i < out.gaps.size(); ++i) {
    if (out.gaps[i] > out.gaps[i - 1]) {
      out.tail_nonincreasing = false;
    }
  }
  return out;
}

std::string binomial(int n, int k) { return exact_binomial(n, k).str(); }

void write_scaling_rows(std::ostream& out, int antennas, double users, int subsets,
                        double total_power, const ScalingPrediction& prediction) {
  for (std::size_t i = 0; i < prediction.objective.size(); ++i) {
    const int s = static_cast<int>(i) + 1;
    fmt::print(out, "{},{},{},{},{},{},{:.17g},{}\n", antennas, users, subsets, total_power,
               to_string(prediction.variant), s, prediction.objective[i],
               s == prediction.s_star ? 1 : 0);
  }
}

}  // namespace lfsim
