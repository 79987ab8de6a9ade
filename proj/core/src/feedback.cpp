#include "lfsim/feedback.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace lfsim {

bool OneBitInrReport::flagged(int within_m) const {
  if (within_m == beam.within_m) {
    return false;
  }
  const int slot = within_m < beam.within_m ? within_m : within_m - 1;
  if (slot < 0 || slot >= static_cast<int>(bits.size())) {
    throw ContractViolation(fmt::format("beam {} not covered by one-bit report", within_m));
  }
  return bits[static_cast<std::size_t>(slot)] != 0;
}

std::vector<double> beam_gains(const CVector& h, const Codebook& codebook) {
  if (h.size() != codebook.antennas()) {
    throw ContractViolation("channel length does not match codebook size");
  }
  std::vector<double> gains(static_cast<std::size_t>(codebook.size()));
  for (int l = 0; l < codebook.size(); ++l) {
    gains[static_cast<std::size_t>(l)] = std::norm(h.dot(codebook.vector(l)));
  }
  return gains;
}

SinrReport compute_sinr_report(const CVector& h, double noise_power, const Codebook& codebook,
                               double total_power) {
  if (!(total_power > 0.0)) {
    throw ConfigError("total power must be positive");
  }
  const std::vector<double> gains = beam_gains(h, codebook);
  const int antennas = codebook.antennas();
  const double noise_term = antennas / total_power * noise_power;

  SinrReport best{codebook.index(0), -1.0};
  // Flat order gives the smallest-flat-index tie break.
  for (int l = 0; l < codebook.size(); ++l) {
    const BeamIndex b = codebook.index(l);
    double interference = 0.0;
    for (int j = 0; j < antennas; ++j) {
      if (j != b.within_m) {
        interference += gains[static_cast<std::size_t>(codebook.index(b.subset_t, j).flat)];
      }
    }
    const double sinr = gains[static_cast<std::size_t>(l)] / (noise_term + interference);
    if (sinr > best.sinr) {
      best = {b, sinr};
    }
  }
  return best;
}

FullInrReport compute_full_inr(const CVector& h, double noise_power, const Codebook& codebook) {
  if (!(noise_power > 0.0)) {
    throw ConfigError("noise power must be positive");
  }
  FullInrReport out{beam_gains(h, codebook)};
  for (double& v : out.inrs) {
    v /= noise_power;
  }
  return out;
}

PartialInrReport compute_partial_inr(const CVector& h, double noise_power,
                                     const Codebook& codebook) {
  const FullInrReport full = compute_full_inr(h, noise_power, codebook);
  int best_t = 0;
  double best_peak = -1.0;
  for (int t = 0; t < codebook.subsets(); ++t) {
    double peak = 0.0;
    for (int m = 0; m < codebook.antennas(); ++m) {
      peak = std::max(peak, full.inrs[static_cast<std::size_t>(codebook.index(t, m).flat)]);
    }
    if (peak > best_peak) {
      best_peak = peak;
      best_t = t;
    }
  }
  PartialInrReport out{best_t, {}};
  out.inrs.reserve(static_cast<std::size_t>(codebook.antennas()));
  for (int m = 0; m < codebook.antennas(); ++m) {
    out.inrs.push_back(full.inrs[static_cast<std::size_t>(codebook.index(best_t, m).flat)]);
  }
  return out;
}

OneBitInrReport compute_one_bit_inr(const CVector& h, double noise_power,
                                    const Codebook& codebook, double gamma_threshold) {
  if (!(gamma_threshold > 0.0)) {
    throw ConfigError("one-bit threshold must be positive");
  }
  const FullInrReport full = compute_full_inr(h, noise_power, codebook);
  int best = 0;
  for (int l = 1; l < codebook.size(); ++l) {
    if (full.inrs[static_cast<std::size_t>(l)] > full.inrs[static_cast<std::size_t>(best)]) {
      best = l;
    }
  }
  OneBitInrReport out;
  out.beam = codebook.index(best);
  out.snr = full.inrs[static_cast<std::size_t>(best)];
  if (!(out.snr > 0.0)) {
    throw DegenerateInputError("one-bit INR report needs a non-zero SNR");
  }
  out.bits.reserve(static_cast<std::size_t>(codebook.antennas() - 1));
  for (int m = 0; m < codebook.antennas(); ++m) {
    if (m == out.beam.within_m) {
      continue;
    }
    const double inr =
        full.inrs[static_cast<std::size_t>(codebook.index(out.beam.subset_t, m).flat)];
    out.bits.push_back(inr / out.snr >= gamma_threshold ? 1 : 0);
  }
  return out;
}

double CqiQuantizer::quantize(double linear) const {
  if (!bits) {
    return linear;
  }
  if (*bits < 1 || *bits > 30) {
    throw ConfigError(fmt::format("CQI bits must lie in [1, 30], got {}", *bits));
  }
  if (!(hi_db > lo_db)) {
    throw ConfigError(fmt::format("CQI dB range [{}, {}] is empty", lo_db, hi_db));
  }
  if (!(linear > 0.0)) {
    return 0.0;
  }
  const double db = 10.0 * std::log10(linear);
  if (db < lo_db) {
    return 0.0;
  }
  const long levels = 1L << *bits;
  const double step = (hi_db - lo_db) / static_cast<double>(levels - 1);
  // ceil(x - 0.5) rounds to nearest with exact halves going down.
  long idx = static_cast<long>(std::ceil((db - lo_db) / step - 0.5));
  idx = std::clamp(idx, 0L, levels - 1);
  return std::pow(10.0, (lo_db + static_cast<double>(idx) * step) / 10.0);
}

FeedbackReport quantize_cqi(const FeedbackReport& report, const CqiQuantizer& quantizer) {
  if (quantizer.enabled()) {
    // Validate once even for reports with no values to touch.
    quantizer.quantize(1.0);
  }
  return std::visit(
      [&](auto r) -> FeedbackReport {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, SinrReport>) {
          r.sinr = quantizer.quantize(r.sinr);
        } else if constexpr (std::is_same_v<R, OneBitInrReport>) {
          r.snr = quantizer.quantize(r.snr);
        } else {
          for (double& v : r.inrs) {
            v = quantizer.quantize(v);
          }
        }
        return r;
      },
      report);
}

std::string_view report_tag(const FeedbackReport& report) {
  constexpr std::string_view tags[] = {"sinr", "full_inr", "partial_inr", "one_bit_inr"};
  return tags[report.index()];
}

void write_report_row(std::ostream& out, int user, const FeedbackReport& report) {
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, SinrReport>) {
          fmt::print(out, "{},{},{},{},{},{:.17g}\n", user, report_tag(report), r.beam.subset_t,
                     r.beam.within_m, r.beam.flat, r.sinr);
        } else if constexpr (std::is_same_v<R, FullInrReport>) {
          fmt::print(out, "{},{},-1,-1,-1,{:.17g}\n", user, report_tag(report),
                     fmt::join(r.inrs, ";"));
        } else if constexpr (std::is_same_v<R, PartialInrReport>) {
          fmt::print(out, "{},{},{},-1,-1,{:.17g}\n", user, report_tag(report), r.subset_t,
                     fmt::join(r.inrs, ";"));
        } else {
          std::string bits;
          for (auto b : r.bits) {
            bits.push_back(b ? '1' : '0');
          }
          fmt::print(out, "{},{},{},{},{},{:.17g};{}\n", user, report_tag(report),
                     r.beam.subset_t, r.beam.within_m, r.beam.flat, r.snr, bits);
        }
      },
      report);
}

}  // namespace lfsim
