#pragma once

#include <cstdint>
#include <random>

#include "lfsim/types.hpp"

namespace lfsim {

// Stream identifiers for substreams derived from a drop seed. Each stochastic
// stage draws from its own stream so adding or removing a scheme never shifts
// the random numbers seen by another stage.
enum class Stream : std::uint64_t {
  kGeometry = 1,
  kFading = 2,
  kCsitNoise = 3,
  kRandomBeams = 4,
  kSnrDraw = 5,
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic substream seed for (seed, id). Order of arguments matters.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id);
std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

using Engine = std::mt19937_64;

/// Standard circular complex Gaussian, E|z|^2 = 1.
class ComplexGaussian {
 public:
  cplx operator()(Engine& engine) {
    return {normal_(engine) * kScale, normal_(engine) * kScale};
  }

 private:
  static constexpr double kScale = 0.70710678118654752440;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// rows x cols matrix of i.i.d. CN(0, 1) entries, filled column-major.
CMatrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Engine& engine);

}  // namespace lfsim
