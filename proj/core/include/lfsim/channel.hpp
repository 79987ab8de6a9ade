#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lfsim/types.hpp"

namespace lfsim {

/// Large-scale description of one user. Angles in radians.
struct UserGeometry {
  double azimuth_rad = 0.0;
  double spread_rad = 0.0;
  /// Received-SNR scale; the user's noise power is 1 / snr_linear.
  double snr_linear = 1.0;
};

/// Draws `count` users i.i.d. uniform over the azimuth and angular-spread
/// ranges (radians). When `snr_db` is given, each user's snr_linear is drawn
/// uniform in dB over it (log-uniform in linear scale); otherwise it is 1.
///
/// Throws ConfigError on an empty range, an azimuth range outside
/// [-pi/2, pi/2], or a non-positive spread.
std::vector<UserGeometry> drop_users(int count, Range azimuth_rad, Range spread_rad,
                                     std::uint64_t seed,
                                     std::optional<Range> snr_db = std::nullopt);

/// Transmit correlation matrix of an M-element ULA, kept together with its
/// Hermitian square root. Construction repairs small negative eigenvalues.
class CorrelationMatrix {
 public:
  static CorrelationMatrix identity(int antennas);

  /// Takes ownership of a Hermitian matrix, clips eigenvalues below zero and
  /// precomputes the square root. Eigenvalues below -kPsdTolerance are
  /// rejected with NumericalError.
  static CorrelationMatrix from_entries(CMatrix entries, double antenna_spacing);

  static constexpr double kPsdTolerance = 1e-10;

  const CMatrix& entries() const { return entries_; }
  const CMatrix& sqrt() const { return sqrt_; }
  double antenna_spacing() const { return antenna_spacing_; }
  double min_eigenvalue_before_repair() const { return min_eigenvalue_; }
  bool repaired() const { return repaired_; }
  int antennas() const { return static_cast<int>(entries_.rows()); }

 private:
  CorrelationMatrix() = default;

  CMatrix entries_;
  CMatrix sqrt_;
  double antenna_spacing_ = 0.5;
  double min_eigenvalue_ = 1.0;
  bool repaired_ = false;
};

/// One-ring model: entry (p, q) is the average of exp(j 2 pi D (p - q) sin(a + theta))
/// over a in [-Delta, Delta], integrated with 64-node Gauss-Legendre.
CorrelationMatrix one_ring_correlation(const UserGeometry& geometry, int antennas,
                                       double antenna_spacing);

/// One channel drop. Column k of each matrix is user k's channel vector.
struct ChannelRealization {
  CMatrix h_true;
  Eigen::VectorXd noise_power;
  /// Transmitter / feedback-side estimate; absent means perfect CSIT.
  std::optional<CMatrix> h_csit;
  double err_var = 0.0;

  int antennas() const { return static_cast<int>(h_true.rows()); }
  int users() const { return static_cast<int>(h_true.cols()); }
  const CMatrix& csit() const { return h_csit ? *h_csit : h_true; }
};

/// Noise power per user, 1 / snr_linear.
std::vector<double> noise_powers(std::span<const UserGeometry> users);

/// Column k = R_k^{1/2} g_k with g_k ~ CN(0, I). All matrices must share one size.
ChannelRealization gen_channel(std::span<const CorrelationMatrix> correlations,
                               std::span<const double> noise_power, std::uint64_t seed);

/// i.i.d. Rayleigh fading. Draws the same Gaussian sequence as gen_channel with
/// identity correlations, so both paths agree bit-for-bit.
ChannelRealization gen_channel_iid(int antennas, std::span<const double> noise_power,
                                   std::uint64_t seed);

/// h_csit = sqrt(1 - err_var) h + sqrt(err_var) n, n ~ CN(0, I).
/// err_var must lie in [0, 1); err_var == 0 copies h_true exactly.
ChannelRealization add_csit_noise(ChannelRealization realization, double err_var,
                                  std::uint64_t seed);

}  // namespace lfsim
