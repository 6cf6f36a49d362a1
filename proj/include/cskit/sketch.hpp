#pragma once

#include <cstdint>
#include <memory>

#include "cskit/common.hpp"

namespace cskit {

/// The m x d matrix of random frequencies (one frequency per row) together with
/// the bandwidth it was drawn for. Copies share the underlying storage.
class FrequencyMatrix {
 public:
  FrequencyMatrix(RowMatrix omegas, double sigma, std::uint64_t seed);

  const RowMatrix& omegas() const { return *omegas_; }
  long m() const { return omegas_->rows(); }
  long d() const { return omegas_->cols(); }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  /// Content hash of (omegas, sigma); sketches may only be merged when ids agree.
  std::uint64_t id() const { return id_; }

 private:
  std::shared_ptr<const RowMatrix> omegas_;
  double sigma_;
  std::uint64_t seed_;
  std::uint64_t id_;
};

/// Mean feature vector of a dataset plus the number of points it summarizes.
struct Sketch {
  ComplexVector values;
  std::uint64_t count = 0;
  std::uint64_t freq_id = 0;

  /// The merge identity: all-zero values, count 0.
  static Sketch empty(long m, std::uint64_t freq_id);
};

/// Draws i.i.d. N(0, 1) entries from a counter-based stream, then divides by sigma.
FrequencyMatrix sample_frequencies(long d, long m, double sigma, std::uint64_t seed);

/// Random Fourier features: entry j is exp(i <omega_j, x>) / sqrt(m).
ComplexVector feature_map(const Vector& x, const FrequencyMatrix& freqs);

/// Mean of the feature map over the rows of `data`. Rows are summed pairwise in
/// chunks of `kSketchChunk`, then chunk sums are combined pairwise.
Sketch sketch_dataset(const Dataset& data, const FrequencyMatrix& freqs);

inline constexpr long kSketchChunk = 1024;

/// Count-weighted average of two sketches built with the same frequencies.
Sketch merge_sketches(const Sketch& a, const Sketch& b);

/// Sketch of a point mass; identical to feature_map.
inline ComplexVector sketch_dirac(const Vector& c, const FrequencyMatrix& freqs) {
  return feature_map(c, freqs);
}

/// Sketch of N(c, cov): the characteristic function at each frequency, scaled by 1/sqrt(m).
ComplexVector sketch_gaussian(const Vector& c, const Matrix& cov, const FrequencyMatrix& freqs);

/// Validates symmetry (1e-10) and positive semidefiniteness (eigenvalues >= -1e-10)
/// and returns the matrix with negative eigenvalues clamped to zero.
Matrix checked_psd(const Matrix& cov, const char* what);

}  // namespace cskit
