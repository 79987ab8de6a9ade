#include "lfsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "lfsim/rng.hpp"

namespace lfsim {

namespace {

constexpr double kAzimuthSlack = 1e-12;

double uniform_in(const Range& range, Engine& engine) {
  const double u = std::generate_canonical<double, 53>(engine);
  return range.lo + range.width() * u;
}

void check_range(const Range& range, const char* name) {
  if (range.empty() || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
    throw ConfigError(fmt::format("{} range [{}, {}] is empty", name, range.lo, range.hi));
  }
}

}  // namespace

std::vector<UserGeometry> drop_users(int count, Range azimuth_rad, Range spread_rad,
                                     std::uint64_t seed, std::optional<Range> snr_db) {
  if (count < 1) {
    throw ConfigError(fmt::format("user count must be >= 1, got {}", count));
  }
  check_range(azimuth_rad, "azimuth");
  check_range(spread_rad, "angular spread");
  if (azimuth_rad.lo < -kPi / 2 - kAzimuthSlack || azimuth_rad.hi > kPi / 2 + kAzimuthSlack) {
    throw ConfigError("azimuth range must lie within [-90, 90] degrees");
  }
  if (spread_rad.lo <= 0.0) {
    throw ConfigError("angular spread must be positive");
  }
  if (snr_db) {
    check_range(*snr_db, "snr");
  }

  Engine geometry_engine(derive_seed(seed, Stream::kGeometry));
  Engine snr_engine(derive_seed(seed, Stream::kSnrDraw));

  std::vector<UserGeometry> users(static_cast<std::size_t>(count));
  for (auto& user : users) {
    user.azimuth_rad = uniform_in(azimuth_rad, geometry_engine);
    user.spread_rad = uniform_in(spread_rad, geometry_engine);
    if (snr_db) {
      user.snr_linear = std::pow(10.0, uniform_in(*snr_db, snr_engine) / 10.0);
    }
  }
  return users;
}

CorrelationMatrix CorrelationMatrix::identity(int antennas) {
  if (antennas < 1) {
    throw ConfigError("antenna count must be >= 1");
  }
  CorrelationMatrix out;
  out.entries_ = CMatrix::Identity(antennas, antennas);
  out.sqrt_ = out.entries_;
  out.min_eigenvalue_ = 1.0;
  return out;
}

CorrelationMatrix CorrelationMatrix::from_entries(CMatrix entries, double antenna_spacing) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw ContractViolation("correlation matrix must be square and non-empty");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(entries);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of correlation matrix failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const CMatrix& vectors = eig.eigenvectors();

  CorrelationMatrix out;
  out.antenna_spacing_ = antenna_spacing;
  out.min_eigenvalue_ = lambda.minCoeff();
  if (out.min_eigenvalue_ < -kPsdTolerance) {
    throw NumericalError(
        fmt::format("correlation matrix not PSD: min eigenvalue {}", out.min_eigenvalue_));
  }

  // Add back only the clipped part so untouched entries keep their quadrature values.
  if (out.min_eigenvalue_ < 0.0) {
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (lambda(i) < 0.0) {
        entries -= lambda(i) * vectors.col(i) * vectors.col(i).adjoint();
      }
    }
    entries = (0.5 * (entries + entries.adjoint())).eval();
    out.repaired_ = true;
  }

  const Eigen::VectorXd root = lambda.cwiseMax(0.0).cwiseSqrt();
  out.sqrt_ = vectors * root.asDiagonal() * vectors.adjoint();
  out.entries_ = std::move(entries);
  return out;
}

CorrelationMatrix one_ring_correlation(const UserGeometry& geometry, int antennas,
                                       double antenna_spacing) {
  if (antennas < 1) {
    throw ConfigError("antenna count must be >= 1");
  }
  if (!(antenna_spacing > 0.0)) {
    throw ConfigError("antenna spacing must be positive");
  }
  if (!(geometry.spread_rad > 0.0)) {
    throw ConfigError("angular spread must be positive");
  }

  using Quadrature = boost::math::quadrature::gauss<double, 64>;
  const double delta = geometry.spread_rad;
  const double theta = geometry.azimuth_rad;

  // Toeplitz: entries depend on p - q only.
  std::vector<cplx> lag(static_cast<std::size_t>(antennas));
  lag[0] = 1.0;
  for (int d = 1; d < antennas; ++d) {
    const double phase_scale = 2.0 * kPi * antenna_spacing * d;
    const double re = Quadrature::integrate(
        [&](double a) { return std::cos(phase_scale * std::sin(a + theta)); }, -delta, delta);
    const double im = Quadrature::integrate(
        [&](double a) { return std::sin(phase_scale * std::sin(a + theta)); }, -delta, delta);
    lag[static_cast<std::size_t>(d)] = cplx(re, im) / (2.0 * delta);
  }

  CMatrix entries(antennas, antennas);
  for (int p = 0; p < antennas; ++p) {
    for (int q = 0; q < antennas; ++q) {
      entries(p, q) = p >= q ? lag[static_cast<std::size_t>(p - q)]
                             : std::conj(lag[static_cast<std::size_t>(q - p)]);
    }
  }
  return CorrelationMatrix::from_entries(std::move(entries), antenna_spacing);
}

std::vector<double> noise_powers(std::span<const UserGeometry> users) {
  std::vector<double> out;
  out.reserve(users.size());
  for (const auto& user : users) {
    out.push_back(1.0 / user.snr_linear);
  }
  return out;
}

namespace {

Eigen::VectorXd to_noise_vector(std::span<const double> noise_power) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(noise_power.size()));
  for (std::size_t k = 0; k < noise_power.size(); ++k) {
    if (!(noise_power[k] > 0.0)) {
      throw ConfigError("noise power must be positive");
    }
    out(static_cast<Eigen::Index>(k)) = noise_power[k];
  }
  return out;
}

}  // namespace

ChannelRealization gen_channel(std::span<const CorrelationMatrix> correlations,
                               std::span<const double> noise_power, std::uint64_t seed) {
  if (correlations.empty() || correlations.size() != noise_power.size()) {
    throw ContractViolation("need one correlation matrix and one noise power per user");
  }
  const int antennas = correlations.front().antennas();
  for (const auto& r : correlations) {
    if (r.antennas() != antennas) {
      throw ContractViolation("correlation matrices differ in size");
    }
  }

  Engine engine(derive_seed(seed, Stream::kFading));
  const auto users = static_cast<Eigen::Index>(correlations.size());
  CMatrix g = complex_gaussian_matrix(antennas, users, engine);

  ChannelRealization out;
  out.h_true.resize(antennas, users);
  for (Eigen::Index k = 0; k < users; ++k) {
    out.h_true.col(k) = correlations[static_cast<std::size_t>(k)].sqrt() * g.col(k);
  }
  out.noise_power = to_noise_vector(noise_power);
  return out;
}

ChannelRealization gen_channel_iid(int antennas, std::span<const double> noise_power,
                                   std::uint64_t seed) {
  if (antennas < 1 || noise_power.empty()) {
    throw ContractViolation("need at least one antenna and one user");
  }
  Engine engine(derive_seed(seed, Stream::kFading));
  ChannelRealization out;
  out.h_true =
      complex_gaussian_matrix(antennas, static_cast<Eigen::Index>(noise_power.size()), engine);
  out.noise_power = to_noise_vector(noise_power);
  return out;
}

ChannelRealization add_csit_noise(ChannelRealization realization, double err_var,
                                  std::uint64_t seed) {
  if (!(err_var >= 0.0 && err_var < 1.0)) {
    throw ConfigError(fmt::format("CSIT error variance must lie in [0, 1), got {}", err_var));
  }
  realization.err_var = err_var;
  if (err_var == 0.0) {
    realization.h_csit = realization.h_true;
    return realization;
  }
  Engine engine(derive_seed(seed, Stream::kCsitNoise));
  const CMatrix n =
      complex_gaussian_matrix(realization.h_true.rows(), realization.h_true.cols(), engine);
  realization.h_csit = std::sqrt(1.0 - err_var) * realization.h_true + std::sqrt(err_var) * n;
  return realization;
}

}  // namespace lfsim
