#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "cskit/common.hpp"
#include "cskit/correlation.hpp"

namespace cskit {

/// Exhaustive scan of a regular grid with `points_per_axis` nodes per axis.
struct GridSearch {
  int points_per_axis = 101;
  double max_nodes = 1e7;
};

/// Reweighted ascent c <- Proj(c + eta / |f(c)| * grad f(c)) from `restarts`
/// uniform random starts; the terminal point with the largest f wins.
/// Unset eta defaults to sigma^2 / 2, unset tol to 1e-6 * diam(box).
struct MeanShiftSearch {
  std::optional<double> eta;
  int restarts = 100;
  int max_iters = 300;
  std::optional<double> tol;
};

/// Plain projected gradient ascent c <- Proj(c + step * grad f(c)) from a single
/// uniform random start. Unset step defaults to sigma^2.
struct GradientAscentSearch {
  std::optional<double> step;
  int max_iters = 300;
  std::optional<double> tol;
};

using SearchConfig = std::variant<GridSearch, MeanShiftSearch, GradientAscentSearch>;

struct SearchResult {
  Vector point;
  double value = 0.0;
  /// Index of the winning restart (0 for single-start and grid searches).
  int winner = 0;
  /// Total ascent iterations across restarts (grid: nodes visited).
  long iterations = 0;
};

enum class TrajectoryStop { Converged, MaxIterations, VanishingValue };

struct Trajectory {
  Vector point;
  double value = 0.0;
  int iterations = 0;
  TrajectoryStop stop = TrajectoryStop::MaxIterations;
};

/// Fills unset optional fields from the bandwidth and the box.
SearchConfig resolve_search(const SearchConfig& cfg, double sigma, const Box& box);
void validate_search(const SearchConfig& cfg);

Vector get_local_maximum_grid(const CorrelationFn& f, const Box& box, const GridSearch& cfg);
SearchResult grid_search(const CorrelationFn& f, const Box& box, const GridSearch& cfg);

/// One ascent trajectory. With `reweight` the step is divided by |f(c)|.
/// Stops when the proposed step is shorter than tol, when the projected move is
/// shorter than tol, when |f| drops below 1e-10 * |r|, or after max_iters.
Trajectory ascend(const CorrelationFn& f, const Box& box, Vector start, double step, int max_iters,
                  double tol, bool reweight);

/// Uniform start for restart `restart` of decoder iteration `iteration`,
/// drawn from the substream (seed, iteration, restart).
Vector restart_point(const Box& box, std::uint64_t seed, int iteration, int restart);

SearchResult get_local_maximum_meanshift(const CorrelationFn& f, const Box& box, const MeanShiftSearch& cfg,
                                         std::uint64_t seed, int iteration = 0);
SearchResult gradient_ascent_search(const CorrelationFn& f, const Box& box, const GradientAscentSearch& cfg,
                                    std::uint64_t seed, int iteration = 0);

/// Dispatches on the configured strategy (config must already be resolved).
SearchResult find_local_maximum(const CorrelationFn& f, const Box& box, const SearchConfig& cfg,
                                std::uint64_t seed, int iteration);

}  // namespace cskit
