#include "cskit/datagen.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "cskit/rng.hpp"
#include "cskit/sketch.hpp"

namespace cskit {

void GmmSpec::validate() const {
  const long k = weights.size();
  if (k < 1) throw ConfigError("GMM needs at least one component");
  if (means.rows() != k) throw ConfigError("GMM means must have one row per component");
  if (means.cols() < 1) throw ConfigError("GMM dimension must be >= 1");
  if (static_cast<long>(covariances.size()) != k) throw ConfigError("GMM needs one covariance per component");
  if (!weights.allFinite() || (weights.array() < 0).any()) throw ConfigError("GMM weights must be finite and >= 0");
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw ConfigError("GMM weights must sum to 1");
  if (!means.allFinite()) throw ConfigError("GMM means must be finite");
  for (const auto& c : covariances) {
    if (c.rows() != d() || c.cols() != d()) throw ConfigError("GMM covariance has the wrong shape");
    checked_psd(c, "GMM");
  }
}

GeneratedData gen_gmm(const GmmSpec& spec, long n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw ConfigError("gen_gmm: n must be >= 1");
  const long k = spec.k(), d = spec.d();

  // Symmetric square roots V sqrt(L) so degenerate covariances are allowed.
  std::vector<Matrix> roots;
  for (const auto& c : spec.covariances) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
    roots.push_back(eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  Vector cumulative(k);
  double acc = 0.0;
  for (long i = 0; i < k; ++i) cumulative[i] = (acc += spec.weights[i]);

  GeneratedData out;
  RowMatrix pts(n, d);
  out.labels.resize(static_cast<std::size_t>(n));
  Vector z(d);
  for (long row = 0; row < n; ++row) {
    CounterRng rng(seed, {stream::kGmmRows, static_cast<std::uint64_t>(row)});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double pick = u(rng) * acc;
    long label = k - 1;
    for (long i = 0; i < k; ++i) {
      if (pick < cumulative[i]) {
        label = i;
        break;
      }
    }
    for (long j = 0; j < d; ++j) z[j] = normal(rng);
    pts.row(row) = (spec.means.row(label).transpose() + roots[static_cast<std::size_t>(label)] * z).transpose();
    out.labels[static_cast<std::size_t>(row)] = static_cast<int>(label);
  }
  out.data = Dataset(std::move(pts));
  return out;
}

double min_mean_distance(const GmmSpec& spec) {
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < spec.means.rows(); ++i)
    for (long j = i + 1; j < spec.means.rows(); ++j)
      best = std::min(best, (spec.means.row(i) - spec.means.row(j)).norm());
  return best;
}

GmmSpec make_separated_spec(int k, int d, std::uint64_t seed, const SeparationOptions& opts) {
  if (k < 1) throw ConfigError("make_separated_spec: k must be >= 1");
  if (d < 1) throw ConfigError("make_separated_spec: d must be >= 1");
  const double std_x = opts.base_std / std::sqrt(static_cast<double>(d));
  const double min_dist = opts.separation * std_x;

  CounterRng rng(seed, {stream::kGmmSpec});
  std::uniform_real_distribution<double> u(-opts.mean_half_width, opts.mean_half_width);
  RowMatrix means(k, d);
  long placed = 0;
  long attempts = 0;
  while (placed < k) {
    if (attempts++ >= opts.max_attempts)
      throw ConfigError("make_separated_spec: could not place " + std::to_string(k) +
                        " separated means; use a smaller k or a larger box");
    Vector cand(d);
    for (long j = 0; j < d; ++j) cand[j] = u(rng);
    bool ok = true;
    for (long i = 0; i < placed && ok; ++i) ok = (means.row(i).transpose() - cand).norm() >= min_dist;
    if (ok) means.row(placed++) = cand.transpose();
  }

  GmmSpec spec;
  spec.weights = Vector::Constant(k, 1.0 / k);
  spec.means = std::move(means);
  spec.covariances.assign(static_cast<std::size_t>(k), std_x * std_x * Matrix::Identity(d, d));
  // 1/k in floating point may miss the exact simplex by an ulp or two.
  spec.weights[k - 1] = 1.0 - spec.weights.head(k - 1).sum();
  return spec;
}

}  // namespace cskit
