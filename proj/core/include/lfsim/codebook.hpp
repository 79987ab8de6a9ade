#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lfsim/types.hpp"

namespace lfsim {

/// Codebook beam address. flat = within_m * T + subset_t, all 0-based.
struct BeamIndex {
  int subset_t = 0;
  int within_m = 0;
  int flat = 0;

  static BeamIndex from_flat(int flat, int subsets);
  static BeamIndex from_pair(int subset_t, int within_m, int subsets);

  friend bool operator==(const BeamIndex&, const BeamIndex&) = default;
};

/// Truncated-DFT codebook: M*T unit-norm vectors split into T unitary subsets.
class Codebook {
 public:
  Codebook(int antennas, int subsets);

  int antennas() const { return antennas_; }
  int subsets() const { return subsets_; }
  int size() const { return antennas_ * subsets_; }

  /// All vectors as columns, ordered by flat index.
  const CMatrix& vectors() const { return vectors_; }
  auto vector(int flat) const { return vectors_.col(flat); }
  auto vector(int subset_t, int within_m) const {
    return vectors_.col(within_m * subsets_ + subset_t);
  }

  BeamIndex index(int flat) const { return BeamIndex::from_flat(flat, subsets_); }
  BeamIndex index(int subset_t, int within_m) const {
    return BeamIndex::from_pair(subset_t, within_m, subsets_);
  }

  /// Subset t as an M x M unitary matrix, columns ordered by within-subset index.
  /// Throws ContractViolation when t is out of range.
  CMatrix subset(int subset_t) const;

  /// CSV dump with columns flat_l,t,m,antenna,real,imag.
  void write_csv(std::ostream& out) const;

 private:
  int antennas_;
  int subsets_;
  CMatrix vectors_;
};

/// Builds the codebook; entry m of vector l is exp(-j 2 pi l m / (M T)) / sqrt(M).
Codebook build_dft_codebook(int antennas, int subsets);

/// Haar-distributed M x M unitary matrix (QR of a complex Gaussian matrix with
/// the phases of R's diagonal moved into Q). Columns are the beams.
CMatrix build_random_unitary(int antennas, std::uint64_t seed);

}  // namespace lfsim
