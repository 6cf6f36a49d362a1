#pragma once

#include "cskit/common.hpp"
#include "cskit/sketch.hpp"

namespace cskit {

/// Value, gradient and Hessian of a scalar field at one point. Decoder
/// subroutines that only need local information (covariance estimation)
/// consume this, so analytic fields can stand in for a sketch in tests.
struct LocalExpansion {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// x -> Re <r, A delta_x> for a residual r, evaluated in closed form from the
/// frequencies. With r the sketch of a dataset this is a random-feature
/// approximation of the Gaussian kernel density estimate at bandwidth sigma.
class CorrelationFn {
 public:
  CorrelationFn(const ComplexVector& residual, FrequencyMatrix freqs);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Symmetrized (H + H^T) / 2.
  Matrix hessian(const Vector& x) const;

  /// Single pass over the frequencies for value and gradient.
  double value_and_gradient(const Vector& x, Vector& grad) const;
  LocalExpansion expand(const Vector& x) const;

  const FrequencyMatrix& freqs() const { return freqs_; }
  long dim() const { return freqs_.d(); }
  /// Euclidean norm of the residual.
  double residual_norm() const { return residual_norm_; }

 private:
  void check_dim(const Vector& x) const;

  FrequencyMatrix freqs_;
  // Residual pre-scaled by 1/sqrt(m), split into parts.
  Vector re_;
  Vector im_;
  double residual_norm_;
};

/// (1/N) sum_i exp(-|x - x_i|^2 / (2 sigma^2)).
double kde_oracle(const Vector& x, const Dataset& data, double sigma);

}  // namespace cskit
