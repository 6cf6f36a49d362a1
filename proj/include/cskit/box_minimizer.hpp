#pragma once

#include <functional>

#include "cskit/common.hpp"

namespace cskit {

struct BoxMinimizerOptions {
  int max_iterations = 200;
  int memory = 10;
  /// Stop when the infinity norm of the projected gradient falls below this.
  double gradient_tolerance = 1e-8;
  /// Stop when the relative decrease of the objective falls below this.
  double relative_decrease = 1e-15;
  int max_backtracks = 50;
};

struct BoxMinimizerResult {
  Vector x;
  double value = 0.0;
  double initial_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Objective: returns f(x) and writes the gradient into the second argument.
using Objective = std::function<double(const Vector&, Vector&)>;

/// Projected limited-memory BFGS for min f(x) s.t. lower <= x <= upper.
/// Bounds may be +/-infinity. Variables sitting on an active bound are frozen
/// for the quasi-Newton direction; steps follow the projected path with an
/// Armijo backtracking search, so the objective never increases.
BoxMinimizerResult minimize_box(const Objective& f, const Vector& x0, const Vector& lower,
                                const Vector& upper, const BoxMinimizerOptions& opts = {});

}  // namespace cskit
