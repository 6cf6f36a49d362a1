#pragma once

// Inner loops shared by the sketching and correlation code. Every path that
// evaluates a feature goes through these so results agree bit for bit.

namespace cskit::detail {

inline constexpr long kBlock = 256;

inline double phase(const double* omega, const double* x, long d) {
  double t = 0.0;
  for (long k = 0; k < d; ++k) t += omega[k] * x[k];
  return t;
}

// t[i] = <omega_{j0+i}, x> for i < n.
inline void phases(const double* omegas, long d, const double* x, long j0, long n, double* t) {
  for (long i = 0; i < n; ++i) t[i] = phase(omegas + (j0 + i) * d, x, d);
}

// s = sin(t), c = cos(t); absolute error near 1e-16.
void sincos_block(const double* t, double* s, double* c, long n);

}  // namespace cskit::detail
