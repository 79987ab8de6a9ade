#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "lfsim/codebook.hpp"
#include "lfsim/types.hpp"

namespace lfsim {

/// Best-beam index plus its SINR, computed assuming all M beams of the
/// subset are active at power P/M.
struct SinrReport {
  BeamIndex beam;
  double sinr = 0.0;
};

/// INR toward every codebook beam, indexed by flat beam index.
struct FullInrReport {
  std::vector<double> inrs;
};

/// INRs toward the M beams of the user's strongest subset.
struct PartialInrReport {
  int subset_t = 0;
  std::vector<double> inrs;
};

/// Strongest beam, its SNR, and one interference flag per other beam of the
/// same subset (in within-subset order, skipping the serving beam).
struct OneBitInrReport {
  BeamIndex beam;
  double snr = 0.0;
  std::vector<std::uint8_t> bits;

  /// Whether beam `within_m` (!= beam.within_m) was flagged as interfering.
  bool flagged(int within_m) const;
};

using FeedbackReport = std::variant<SinrReport, FullInrReport, PartialInrReport, OneBitInrReport>;

/// |h^H c_l|^2 for every codebook vector, by flat index.
std::vector<double> beam_gains(const CVector& h, const Codebook& codebook);

SinrReport compute_sinr_report(const CVector& h, double noise_power, const Codebook& codebook,
                               double total_power);
FullInrReport compute_full_inr(const CVector& h, double noise_power, const Codebook& codebook);
PartialInrReport compute_partial_inr(const CVector& h, double noise_power,
                                     const Codebook& codebook);

/// Throws DegenerateInputError when the selected beam's SNR is zero.
OneBitInrReport compute_one_bit_inr(const CVector& h, double noise_power,
                                    const Codebook& codebook, double gamma_threshold);

/// Uniform-in-dB CQI quantizer. `bits` unset means pass-through.
struct CqiQuantizer {
  std::optional<int> bits;
  double lo_db = -20.0;
  double hi_db = 25.0;

  bool enabled() const { return bits.has_value(); }
  /// Snaps one linear value to the grid; below the floor maps to 0.
  double quantize(double linear) const;
};

/// Quantizes every CQI value carried by the report (SINR, INRs or SNR).
/// Throws ConfigError on an empty dB range or bits < 1.
FeedbackReport quantize_cqi(const FeedbackReport& report, const CqiQuantizer& quantizer);

/// One debug CSV row: user,scheme,t,m,flat,values (values ';'-separated, bits as a 0/1 string).
void write_report_row(std::ostream& out, int user, const FeedbackReport& report);

std::string_view report_tag(const FeedbackReport& report);

}  // namespace lfsim
