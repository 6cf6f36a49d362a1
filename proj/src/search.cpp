#include "cskit/search.hpp"

#include <cmath>
#include <random>

#include "cskit/rng.hpp"

namespace cskit {

SearchConfig resolve_search(const SearchConfig& cfg, double sigma, const Box& box) {
  const double default_tol = 1e-6 * box.diameter();
  return std::visit(
      [&](auto s) -> SearchConfig {
        using T = decltype(s);
        if constexpr (std::is_same_v<T, MeanShiftSearch>) {
          if (!s.eta) s.eta = 0.5 * sigma * sigma;
          if (!s.tol) s.tol = default_tol;
        } else if constexpr (std::is_same_v<T, GradientAscentSearch>) {
          if (!s.step) s.step = sigma * sigma;
          if (!s.tol) s.tol = default_tol;
        }
        return s;
      },
      cfg);
}

void validate_search(const SearchConfig& cfg) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GridSearch>) {
          if (s.points_per_axis < 2) throw ConfigError("grid search needs points_per_axis >= 2");
        } else if constexpr (std::is_same_v<T, MeanShiftSearch>) {
          if (s.restarts < 1) throw ConfigError("mean shift needs restarts L >= 1");
          if (s.max_iters < 1) throw ConfigError("mean shift needs max_iters >= 1");
          if (s.eta && !(*s.eta > 0)) throw ConfigError("mean shift step eta must be > 0");
          if (s.tol && !(*s.tol > 0)) throw ConfigError("mean shift tolerance must be > 0");
        } else {
          if (s.max_iters < 1) throw ConfigError("gradient ascent needs max_iters >= 1");
          if (s.step && !(*s.step > 0)) throw ConfigError("gradient ascent step must be > 0");
          if (s.tol && !(*s.tol > 0)) throw ConfigError("gradient ascent tolerance must be > 0");
        }
      },
      cfg);
}

SearchResult grid_search(const CorrelationFn& f, const Box& box, const GridSearch& cfg) {
  validate_search(cfg);
  const long d = box.dim();
  if (d != f.dim()) throw DimensionError("grid search box", f.dim(), d);
  const int p = cfg.points_per_axis;
  if (std::pow(static_cast<double>(p), static_cast<double>(d)) > cfg.max_nodes)
    throw ConfigError("grid of " + std::to_string(p) + "^" + std::to_string(d) +
                      " nodes exceeds the node cap; use mean shift search instead");

  const Vector step = (box.upper() - box.lower()) / static_cast<double>(p - 1);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vector x = box.lower();
  SearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  long visited = 0;
  while (true) {
    for (long k = 0; k < d; ++k) x[k] = box.lower()[k] + static_cast<double>(idx[static_cast<std::size_t>(k)]) * step[k];
    const double v = f.value(x);
    ++visited;
    if (v > best.value) {
      best.value = v;
      best.point = x;
    }
    // Odometer increment, last axis fastest.
    long k = d - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == p) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  best.iterations = visited;
  return best;
}

Vector get_local_maximum_grid(const CorrelationFn& f, const Box& box, const GridSearch& cfg) {
  return grid_search(f, box, cfg).point;
}

Trajectory ascend(const CorrelationFn& f, const Box& box, Vector start, double step, int max_iters,
                  double tol, bool reweight) {
  Trajectory tr;
  tr.point = box.clamp(start);
  const double floor = 1e-10 * f.residual_norm();
  Vector grad;
  for (int it = 0; it < max_iters; ++it) {
    const double v = f.value_and_gradient(tr.point, grad);
    tr.value = v;
    if (reweight && !(std::abs(v) >= floor && std::abs(v) > 0)) {
      tr.stop = TrajectoryStop::VanishingValue;
      return tr;
    }
    const Vector move = (reweight ? step / std::abs(v) : step) * grad;
    if (move.norm() <= tol) {
      tr.stop = TrajectoryStop::Converged;
      return tr;
    }
    Vector next = box.clamp(tr.point + move);
    tr.iterations = it + 1;
    const double moved = (next - tr.point).norm();
    tr.point = std::move(next);
    if (moved <= tol) {
      tr.value = f.value(tr.point);
      tr.stop = TrajectoryStop::Converged;
      return tr;
    }
  }
  tr.value = f.value(tr.point);
  tr.stop = TrajectoryStop::MaxIterations;
  return tr;
}

Vector restart_point(const Box& box, std::uint64_t seed, int iteration, int restart) {
  CounterRng rng(seed, {stream::kRestarts, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(restart)});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(box.dim());
  for (long k = 0; k < box.dim(); ++k)
    x[k] = box.lower()[k] + u(rng) * (box.upper()[k] - box.lower()[k]);
  return x;
}

SearchResult get_local_maximum_meanshift(const CorrelationFn& f, const Box& box, const MeanShiftSearch& cfg_in,
                                         std::uint64_t seed, int iteration) {
  const auto resolved = std::get<MeanShiftSearch>(resolve_search(cfg_in, f.freqs().sigma(), box));
  validate_search(resolved);
  if (box.dim() != f.dim()) throw DimensionError("mean shift box", f.dim(), box.dim());
  SearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < resolved.restarts; ++j) {
    Trajectory tr = ascend(f, box, restart_point(box, seed, iteration, j), *resolved.eta, resolved.max_iters,
                           *resolved.tol, true);
    best.iterations += tr.iterations;
    if (tr.value > best.value || best.point.size() == 0) {
      best.value = tr.value;
      best.point = std::move(tr.point);
      best.winner = j;
    }
  }
  return best;
}

SearchResult gradient_ascent_search(const CorrelationFn& f, const Box& box, const GradientAscentSearch& cfg_in,
                                    std::uint64_t seed, int iteration) {
  const auto resolved = std::get<GradientAscentSearch>(resolve_search(cfg_in, f.freqs().sigma(), box));
  validate_search(resolved);
  if (box.dim() != f.dim()) throw DimensionError("gradient ascent box", f.dim(), box.dim());
  Trajectory tr = ascend(f, box, restart_point(box, seed, iteration, 0), *resolved.step, resolved.max_iters,
                         *resolved.tol, false);
  SearchResult out;
  out.point = std::move(tr.point);
  out.value = tr.value;
  out.iterations = tr.iterations;
  return out;
}

SearchResult find_local_maximum(const CorrelationFn& f, const Box& box, const SearchConfig& cfg,
                                std::uint64_t seed, int iteration) {
  return std::visit(
      [&](const auto& s) -> SearchResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GridSearch>) {
          return grid_search(f, box, s);
        } else if constexpr (std::is_same_v<T, MeanShiftSearch>) {
          return get_local_maximum_meanshift(f, box, s, seed, iteration);
        } else {
          return gradient_ascent_search(f, box, s, seed, iteration);
        }
      },
      cfg);
}

}  // namespace cskit
