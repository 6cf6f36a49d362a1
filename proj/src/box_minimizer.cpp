#include "cskit/box_minimizer.hpp"

#include <cmath>
#include <deque>

namespace cskit {

namespace {

struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;
};

Vector two_loop(const std::deque<CurvaturePair>& hist, const Vector& q_in) {
  Vector q = q_in;
  std::vector<double> alpha(hist.size());
  for (std::size_t k = hist.size(); k-- > 0;) {
    alpha[k] = hist[k].rho * hist[k].s.dot(q);
    q -= alpha[k] * hist[k].y;
  }
  const auto& last = hist.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const double beta = hist[k].rho * hist[k].y.dot(q);
    q += (alpha[k] - beta) * hist[k].s;
  }
  return q;
}

}  // namespace

BoxMinimizerResult minimize_box(const Objective& f, const Vector& x0, const Vector& lower,
                                const Vector& upper, const BoxMinimizerOptions& opts) {
  const long n = x0.size();
  if (lower.size() != n || upper.size() != n) throw DimensionError("minimize_box bounds", n, lower.size());
  auto project = [&](const Vector& v) { return v.cwiseMax(lower).cwiseMin(upper); };

  BoxMinimizerResult res;
  res.x = project(x0);
  Vector g(n);
  double fx = f(res.x, g);
  res.initial_value = fx;
  std::deque<CurvaturePair> hist;

  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vector pg = res.x - project(res.x - g);
    if (pg.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    Vector q = g;
    for (long i = 0; i < n; ++i) {
      const bool at_lower = res.x[i] <= lower[i] && g[i] > 0;
      const bool at_upper = res.x[i] >= upper[i] && g[i] < 0;
      if (at_lower || at_upper) q[i] = 0.0;
    }
    const Vector free_mask = (q.array() != 0.0).cast<double>();

    bool accepted = false;
    Vector xn, gn(n);
    double fn = fx;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Vector dir;
      if (attempt == 0 && !hist.empty()) {
        dir = -two_loop(hist, q).cwiseProduct(free_mask);
        if (!dir.allFinite() || dir.dot(g) >= 0) continue;
      } else {
        hist.clear();
        dir = -q;
      }
      double t = 1.0;
      if (hist.empty()) t = std::min(1.0, 1.0 / dir.lpNorm<Eigen::Infinity>());
      for (int bt = 0; bt < opts.max_backtracks; ++bt, t *= 0.5) {
        xn = project(res.x + t * dir);
        const Vector dx = xn - res.x;
        if (dx.lpNorm<Eigen::Infinity>() == 0.0) break;
        fn = f(xn, gn);
        const double slope = std::min(0.0, g.dot(dx));
        if (std::isfinite(fn) && fn <= fx + 1e-4 * slope && fn <= fx) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;

    res.iterations = it + 1;
    const Vector s = xn - res.x;
    const Vector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      hist.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(hist.size()) > opts.memory) hist.pop_front();
    }
    const double decrease = fx - fn;
    res.x = xn;
    g = gn;
    fx = fn;
    if (decrease <= opts.relative_decrease * std::abs(fx)) {
      res.converged = true;
      break;
    }
  }
  res.value = fx;
  return res;
}

}  // namespace cskit
