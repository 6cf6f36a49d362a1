#include "cskit/metrics.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "cskit/rng.hpp"

namespace cskit {

namespace {

double squared_distance(const double* a, const double* b, long d) {
  double s = 0.0;
  for (long k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

double nearest_squared_distance(const Centroids& c, const double* x) {
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < c.rows(); ++i) best = std::min(best, squared_distance(c.data() + i * c.cols(), x, c.cols()));
  return best;
}

double sorted_mean(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc / static_cast<double>(terms.size());
}

}  // namespace

long nearest_centroid(const Centroids& centroids, const double* x) {
  long best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (long i = 0; i < centroids.rows(); ++i) {
    const double dist = squared_distance(centroids.data() + i * centroids.cols(), x, centroids.cols());
    if (dist < best_d) {
      best_d = dist;
      best = i;
    }
  }
  return best;
}

double mse(const Centroids& centroids, const Dataset& data) {
  if (data.empty()) throw EmptyDatasetError();
  if (centroids.rows() < 1) throw ConfigError("mse needs at least one centroid");
  if (centroids.cols() != data.dim()) throw DimensionError("mse centroids", data.dim(), centroids.cols());
  std::vector<double> terms(static_cast<std::size_t>(data.size()));
  for (long n = 0; n < data.size(); ++n)
    terms[static_cast<std::size_t>(n)] = nearest_squared_distance(centroids, data.points().data() + n * data.dim());
  return sorted_mean(terms);
}

double rse(const Centroids& centroids, const Dataset& data, const Centroids& lloyd_reference) {
  const double ref = mse(lloyd_reference, data);
  if (!(ref > 0)) throw Error("rse: reference centroids have zero MSE (degenerate dataset)");
  return mse(centroids, data) / ref;
}

namespace {

// k-means++: first center uniform, then proportional to squared distance.
Centroids kmeanspp_seed(const Dataset& data, int k, CounterRng& rng) {
  const long n = data.size(), d = data.dim();
  const auto& pts = data.points();
  Centroids c(k, d);
  std::uniform_int_distribution<long> pick(0, n - 1);
  c.row(0) = pts.row(pick(rng));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = squared_distance(pts.data() + i * d, c.data(), d);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : dist) total += v;
    long chosen = 0;
    if (total > 0) {
      double target = u(rng) * total;
      chosen = n - 1;
      for (long i = 0; i < n; ++i) {
        target -= dist[static_cast<std::size_t>(i)];
        if (target < 0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    c.row(j) = pts.row(chosen);
    for (long i = 0; i < n; ++i)
      dist[static_cast<std::size_t>(i)] = std::min(dist[static_cast<std::size_t>(i)],
                                                   squared_distance(pts.data() + i * d, c.data() + j * d, d));
  }
  return c;
}

}  // namespace

LloydResult lloyd(const Dataset& data, const LloydOptions& opts) {
  if (opts.k < 1) throw ConfigError("lloyd: k must be >= 1");
  if (opts.n_init < 1) throw ConfigError("lloyd: n_init must be >= 1");
  if (opts.max_iters < 1) throw ConfigError("lloyd: max_iters must be >= 1");
  if (data.size() < opts.k) throw ConfigError("lloyd: need at least k data points");
  const long n = data.size(), d = data.dim();
  const int k = opts.k;
  const auto& pts = data.points();

  LloydResult best;
  best.mse = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < opts.n_init; ++rep) {
    CounterRng rng(opts.seed, {stream::kLloyd, static_cast<std::uint64_t>(rep)});
    Centroids c = kmeanspp_seed(data, k, rng);
    std::vector<long> assign(static_cast<std::size_t>(n), -1);
    std::vector<double> history;

    for (int it = 0; it < opts.max_iters; ++it) {
      bool changed = false;
      for (long i = 0; i < n; ++i) {
        const long a = nearest_centroid(c, pts.data() + i * d);
        if (a != assign[static_cast<std::size_t>(i)]) {
          assign[static_cast<std::size_t>(i)] = a;
          changed = true;
        }
      }
      if (!changed && it > 0) break;

      Centroids sums = Centroids::Zero(k, d);
      std::vector<long> counts(static_cast<std::size_t>(k), 0);
      for (long i = 0; i < n; ++i) {
        const long a = assign[static_cast<std::size_t>(i)];
        sums.row(a) += pts.row(i);
        ++counts[static_cast<std::size_t>(a)];
      }
      for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) {
          c.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
        }
      }
      // Empty clusters restart at the point farthest from its centroid.
      for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) continue;
        long far = 0;
        double far_d = -1.0;
        for (long i = 0; i < n; ++i) {
          const double dist = nearest_squared_distance(c, pts.data() + i * d);
          if (dist > far_d) {
            far_d = dist;
            far = i;
          }
        }
        c.row(j) = pts.row(far);
        assign[static_cast<std::size_t>(far)] = j;
      }
      history.push_back(mse(c, data));
    }

    const double err = history.empty() ? mse(c, data) : history.back();
    best.history.push_back(std::move(history));
    if (err < best.mse) {
      best.mse = err;
      best.centroids = c;
      best.best_replica = rep;
    }
  }
  return best;
}

}  // namespace cskit
