#pragma once

#include <cstdint>
#include <vector>

#include "cskit/common.hpp"

namespace cskit {

/// Gaussian mixture sum_i w_i N(mean_i, cov_i).
struct GmmSpec {
  Vector weights;
  RowMatrix means;
  std::vector<Matrix> covariances;

  long k() const { return weights.size(); }
  long d() const { return means.cols(); }
  /// Weights on the simplex (sum within 1e-12), covariances symmetric PSD.
  void validate() const;
};

struct GeneratedData {
  Dataset data;
  /// Component index of each row; diagnostics only.
  std::vector<int> labels;
};

/// n i.i.d. draws; row i uses its own counter-based substream (seed, i).
GeneratedData gen_gmm(const GmmSpec& spec, long n, std::uint64_t seed);

struct SeparationOptions {
  double mean_half_width = 0.7;
  double separation = 6.0;
  /// sigma_X = base_std / sqrt(d)
  double base_std = 0.12;
  long max_attempts = 100000;
};

/// Equal-weight isotropic mixture whose means lie in [-0.7, 0.7]^d with pairwise
/// distance at least 6 sigma_X, found by rejection sampling.
GmmSpec make_separated_spec(int k, int d, std::uint64_t seed, const SeparationOptions& opts = {});

/// Smallest pairwise distance between means (infinity for k = 1).
double min_mean_distance(const GmmSpec& spec);

}  // namespace cskit
