#include "lfsim/codebook.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lfsim/rng.hpp"

namespace lfsim {

BeamIndex BeamIndex::from_flat(int flat, int subsets) {
  if (subsets < 1 || flat < 0) {
    throw ContractViolation(fmt::format("invalid flat beam index {}", flat));
  }
  return {flat % subsets, flat / subsets, flat};
}

BeamIndex BeamIndex::from_pair(int subset_t, int within_m, int subsets) {
  if (subset_t < 0 || subset_t >= subsets || within_m < 0) {
    throw ContractViolation(fmt::format("invalid beam ({}, {})", subset_t, within_m));
  }
  return {subset_t, within_m, within_m * subsets + subset_t};
}

Codebook::Codebook(int antennas, int subsets) : antennas_(antennas), subsets_(subsets) {
  if (antennas < 1 || subsets < 1) {
    throw ConfigError(fmt::format("codebook needs M >= 1 and T >= 1, got M={} T={}", antennas,
                                  subsets));
  }
  const int size = antennas * subsets;
  const double norm = 1.0 / std::sqrt(static_cast<double>(antennas));
  vectors_.resize(antennas, size);
  for (int l = 0; l < size; ++l) {
    for (int m = 0; m < antennas; ++m) {
      // Reduce l*m modulo MT first so the phase argument stays small.
      const int k = (l * m) % size;
      const double phase = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(size);
      vectors_(m, l) = std::polar(norm, phase);
    }
  }
}

CMatrix Codebook::subset(int subset_t) const {
  if (subset_t < 0 || subset_t >= subsets_) {
    throw ContractViolation(
        fmt::format("subset index {} out of range [0, {})", subset_t, subsets_));
  }
  CMatrix out(antennas_, antennas_);
  for (int m = 0; m < antennas_; ++m) {
    out.col(m) = vector(subset_t, m);
  }
  return out;
}

void Codebook::write_csv(std::ostream& out) const {
  out << "flat_l,t,m,antenna,real,imag\n";
  for (int l = 0; l < size(); ++l) {
    const BeamIndex b = index(l);
    for (int a = 0; a < antennas_; ++a) {
      fmt::print(out, "{},{},{},{},{:.17g},{:.17g}\n", l, b.subset_t, b.within_m, a,
                 vectors_(a, l).real(), vectors_(a, l).imag());
    }
  }
}

Codebook build_dft_codebook(int antennas, int subsets) { return Codebook(antennas, subsets); }

CMatrix build_random_unitary(int antennas, std::uint64_t seed) {
  if (antennas < 1) {
    throw ConfigError("antenna count must be >= 1");
  }
  Engine engine(derive_seed(seed, Stream::kRandomBeams));
  const CMatrix g = complex_gaussian_matrix(antennas, antennas, engine);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(antennas, antennas);
  const CMatrix& r = qr.matrixQR();
  for (int i = 0; i < antennas; ++i) {
    const cplx d = r(i, i);
    const double mag = std::abs(d);
    q.col(i) *= mag > 0.0 ? d / mag : cplx(1.0);
  }
  return q;
}

}  // namespace lfsim
