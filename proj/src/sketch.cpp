#include "cskit/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "cskit/rng.hpp"
#include "kernels.hpp"

namespace cskit {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t content_hash(const RowMatrix& omegas, double sigma) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(omegas.rows()),
                                 static_cast<std::uint64_t>(omegas.cols())};
  h = fnv1a(dims, sizeof(dims), h);
  h = fnv1a(omegas.data(), sizeof(double) * static_cast<std::size_t>(omegas.size()), h);
  return fnv1a(&sigma, sizeof(sigma), h);
}

// Adds the features of one point into re/im accumulators.
void accumulate_features(const RowMatrix& omegas, const double* x, double inv_sqrt_m,
                         double* re, double* im) {
  const long m = omegas.rows();
  const long d = omegas.cols();
  double t[detail::kBlock];
  for (long j0 = 0; j0 < m; j0 += detail::kBlock) {
    const long n = std::min(detail::kBlock, m - j0);
    detail::phases(omegas.data(), d, x, j0, n, t);
    detail::sincos_block(t, im + j0, re + j0, n);
    for (long i = 0; i < n; ++i) {
      re[j0 + i] *= inv_sqrt_m;
      im[j0 + i] *= inv_sqrt_m;
    }
  }
}

// Pairwise summation of a stream of length-m vectors using a binary-counter
// stack: level-l entries hold the sum of 2^l consecutive inputs.
class PairwiseAccumulator {
 public:
  explicit PairwiseAccumulator(long m) : m_(m) {}

  // A scratch buffer of length m, recycled from earlier merges when possible.
  std::vector<double> take() {
    if (spare_.empty()) return std::vector<double>(static_cast<std::size_t>(m_));
    std::vector<double> v = std::move(spare_.back());
    spare_.pop_back();
    return v;
  }

  void push(std::vector<double> v) {
    int level = 0;
    while (!stack_.empty() && stack_.back().level == level) {
      auto& top = stack_.back().sum;
      for (long j = 0; j < m_; ++j) top[j] += v[j];
      spare_.push_back(std::move(v));
      v = std::move(top);
      stack_.pop_back();
      ++level;
    }
    stack_.push_back({level, std::move(v)});
  }

  std::vector<double> total() {
    if (stack_.empty()) return std::vector<double>(static_cast<std::size_t>(m_), 0.0);
    std::vector<double> acc = std::move(stack_.back().sum);
    stack_.pop_back();
    while (!stack_.empty()) {
      auto& next = stack_.back().sum;
      for (long j = 0; j < m_; ++j) next[j] += acc[j];
      acc = std::move(next);
      stack_.pop_back();
    }
    return acc;
  }

 private:
  struct Entry {
    int level;
    std::vector<double> sum;
  };
  long m_;
  std::vector<Entry> stack_;
  std::vector<std::vector<double>> spare_;
};

}  // namespace

FrequencyMatrix::FrequencyMatrix(RowMatrix omegas, double sigma, std::uint64_t seed)
    : sigma_(sigma), seed_(seed) {
  if (omegas.rows() < 1 || omegas.cols() < 1) throw ConfigError("frequency matrix needs m >= 1 and d >= 1");
  if (!std::isfinite(sigma) || sigma <= 0) throw ConfigError("bandwidth sigma must be finite and > 0");
  if (!omegas.allFinite()) throw ConfigError("frequency matrix contains non-finite values");
  id_ = content_hash(omegas, sigma);
  omegas_ = std::make_shared<const RowMatrix>(std::move(omegas));
}

Sketch Sketch::empty(long m, std::uint64_t freq_id) {
  return Sketch{ComplexVector::Zero(m), 0, freq_id};
}

FrequencyMatrix sample_frequencies(long d, long m, double sigma, std::uint64_t seed) {
  if (d < 1) throw ConfigError("dimension d must be >= 1");
  if (m < 1) throw ConfigError("sketch size m must be >= 1");
  if (!std::isfinite(sigma) || sigma <= 0) throw ConfigError("bandwidth sigma must be finite and > 0");
  CounterRng rng(seed, {stream::kFrequencies});
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix omegas(m, d);
  for (long j = 0; j < m; ++j)
    for (long k = 0; k < d; ++k) omegas(j, k) = normal(rng) / sigma;
  return FrequencyMatrix(std::move(omegas), sigma, seed);
}

ComplexVector feature_map(const Vector& x, const FrequencyMatrix& freqs) {
  if (x.size() != freqs.d()) throw DimensionError("feature_map", freqs.d(), x.size());
  const long m = freqs.m();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> re(static_cast<std::size_t>(m)), im(static_cast<std::size_t>(m));
  accumulate_features(freqs.omegas(), x.data(), inv_sqrt_m, re.data(), im.data());
  ComplexVector out(m);
  for (long j = 0; j < m; ++j) out[j] = {re[static_cast<std::size_t>(j)], im[static_cast<std::size_t>(j)]};
  return out;
}

Sketch sketch_dataset(const Dataset& data, const FrequencyMatrix& freqs) {
  if (data.empty()) throw EmptyDatasetError();
  if (data.dim() != freqs.d()) throw DimensionError("sketch_dataset", freqs.d(), data.dim());
  const long m = freqs.m();
  const long n = data.size();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const auto& pts = data.points();

  // Real and imaginary parts stacked in one buffer of length 2m.
  PairwiseAccumulator chunks(2 * m);
  for (long start = 0; start < n; start += kSketchChunk) {
    const long stop = std::min(n, start + kSketchChunk);
    PairwiseAccumulator rows(2 * m);
    for (long i = start; i < stop; ++i) {
      std::vector<double> buf = rows.take();
      accumulate_features(freqs.omegas(), pts.data() + i * data.dim(), inv_sqrt_m, buf.data(),
                          buf.data() + m);
      rows.push(std::move(buf));
    }
    chunks.push(rows.total());
  }
  std::vector<double> sum = chunks.total();

  Sketch s;
  s.values.resize(m);
  const double dn = static_cast<double>(n);
  for (long j = 0; j < m; ++j) s.values[j] = {sum[j] / dn, sum[m + j] / dn};
  s.count = static_cast<std::uint64_t>(n);
  s.freq_id = freqs.id();
  return s;
}

Sketch merge_sketches(const Sketch& a, const Sketch& b) {
  if (a.freq_id != b.freq_id) throw ConfigError("cannot merge sketches built with different frequencies");
  if (a.values.size() != b.values.size()) throw ConfigError("cannot merge sketches of different sizes");
  if (a.count == 0 && b.count == 0) throw ConfigError("cannot merge two empty sketches");
  if (b.count == 0) return a;
  if (a.count == 0) return b;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  Sketch out;
  out.count = a.count + b.count;
  out.freq_id = a.freq_id;
  out.values = (na * a.values + nb * b.values) / (na + nb);
  return out;
}

Matrix checked_psd(const Matrix& cov, const char* what) {
  const long d = cov.rows();
  if (cov.cols() != d) throw ConfigError(std::string(what) + ": covariance must be square");
  if (!cov.allFinite()) throw ConfigError(std::string(what) + ": covariance has non-finite entries");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError(std::string(what) + ": covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector& lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-10) throw ConfigError(std::string(what) + ": covariance is not positive semidefinite");
  if (lambda.minCoeff() >= 0) return cov;
  return eig.eigenvectors() * lambda.cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
}

ComplexVector sketch_gaussian(const Vector& c, const Matrix& cov, const FrequencyMatrix& freqs) {
  const long d = freqs.d();
  if (c.size() != d) throw DimensionError("sketch_gaussian", d, c.size());
  if (cov.rows() != d) throw DimensionError("sketch_gaussian covariance", d, cov.rows());
  const Matrix sigma = checked_psd(cov, "sketch_gaussian");
  const long m = freqs.m();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const auto& om = freqs.omegas();
  std::vector<double> re(static_cast<std::size_t>(m)), im(static_cast<std::size_t>(m));
  accumulate_features(om, c.data(), inv_sqrt_m, re.data(), im.data());
  ComplexVector out(m);
  for (long j = 0; j < m; ++j) {
    const auto w = om.row(j).transpose();
    const double scale = std::exp(-0.5 * std::max(0.0, w.dot(sigma * w)));
    out[j] = {re[static_cast<std::size_t>(j)] * scale, im[static_cast<std::size_t>(j)] * scale};
  }
  return out;
}

}  // namespace cskit
