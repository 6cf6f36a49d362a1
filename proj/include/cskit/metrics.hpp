#pragma once

#include <cstdint>
#include <vector>

#include "cskit/common.hpp"

namespace cskit {

/// k x d matrix of cluster centers, one per row.
using Centroids = RowMatrix;

/// (1/N) sum_n min_i |x_n - c_i|^2. Per-point terms are summed in sorted order,
/// which makes the value exactly invariant under row permutations.
double mse(const Centroids& centroids, const Dataset& data);

/// mse(centroids) / mse(reference). Throws when the reference has zero error.
double rse(const Centroids& centroids, const Dataset& data, const Centroids& lloyd_reference);

/// Index of the nearest centroid (ties: lowest index).
long nearest_centroid(const Centroids& centroids, const double* x);

struct LloydOptions {
  int k = 1;
  int n_init = 5;
  std::uint64_t seed = 0;
  int max_iters = 300;
};

struct LloydResult {
  Centroids centroids;
  double mse = 0.0;
  int best_replica = 0;
  /// MSE after every update step, per replica.
  std::vector<std::vector<double>> history;
};

/// Best of n_init k-means++-seeded Lloyd runs.
LloydResult lloyd(const Dataset& data, const LloydOptions& opts);

}  // namespace cskit
