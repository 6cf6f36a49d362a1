#pragma once

#include <vector>

#include "cskit/common.hpp"

namespace cskit {

struct NnlsResult {
  Vector x;
  /// Gradient of 0.5 * |A x - b|^2 at the solution, i.e. A^T (A x - b).
  Vector gradient;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Lawson-Hanson active-set solver for min_{x >= 0} |A x - b|.
NnlsResult nnls(const Matrix& a, const Vector& b, int max_iterations = 0);

/// min_{alpha >= 0} |z - sum_i alpha_i atoms_i| over complex vectors, solved as
/// the real problem obtained by stacking real and imaginary parts.
NnlsResult nnls_weights(const ComplexVector& z, const std::vector<ComplexVector>& atoms);

/// Stacks [Re; Im] of each atom as the columns of a real 2m x n matrix.
Matrix stack_atoms(const std::vector<ComplexVector>& atoms);
Vector stack_complex(const ComplexVector& z);

}  // namespace cskit
