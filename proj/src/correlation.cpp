#include "cskit/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"

namespace cskit {

// With r_j = a_j + i b_j and theta_j = <omega_j, x>:
//   f(x)     =  (1/sqrt m) sum_j  a_j cos theta_j + b_j sin theta_j
//   grad f   =  (1/sqrt m) sum_j (b_j cos theta_j - a_j sin theta_j) omega_j
//   Hess f   = -(1/sqrt m) sum_j (a_j cos theta_j + b_j sin theta_j) omega_j omega_j^T

CorrelationFn::CorrelationFn(const ComplexVector& residual, FrequencyMatrix freqs)
    : freqs_(std::move(freqs)) {
  if (residual.size() != freqs_.m()) throw DimensionError("CorrelationFn residual", freqs_.m(), residual.size());
  const double s = 1.0 / std::sqrt(static_cast<double>(freqs_.m()));
  re_ = residual.real() * s;
  im_ = residual.imag() * s;
  residual_norm_ = residual.norm();
}

void CorrelationFn::check_dim(const Vector& x) const {
  if (x.size() != freqs_.d()) throw DimensionError("correlation function", freqs_.d(), x.size());
}

double CorrelationFn::value(const Vector& x) const {
  check_dim(x);
  const long m = freqs_.m(), d = freqs_.d();
  const double* om = freqs_.omegas().data();
  double t[detail::kBlock], sn[detail::kBlock], cs[detail::kBlock];
  double f = 0.0;
  for (long j0 = 0; j0 < m; j0 += detail::kBlock) {
    const long n = std::min(detail::kBlock, m - j0);
    detail::phases(om, d, x.data(), j0, n, t);
    detail::sincos_block(t, sn, cs, n);
    for (long i = 0; i < n; ++i) f += re_[j0 + i] * cs[i] + im_[j0 + i] * sn[i];
  }
  return f;
}

double CorrelationFn::value_and_gradient(const Vector& x, Vector& grad) const {
  check_dim(x);
  const long m = freqs_.m(), d = freqs_.d();
  const double* om = freqs_.omegas().data();
  grad.setZero(d);
  double t[detail::kBlock], sn[detail::kBlock], cs[detail::kBlock];
  double f = 0.0;
  for (long j0 = 0; j0 < m; j0 += detail::kBlock) {
    const long n = std::min(detail::kBlock, m - j0);
    detail::phases(om, d, x.data(), j0, n, t);
    detail::sincos_block(t, sn, cs, n);
    for (long i = 0; i < n; ++i) {
      const long j = j0 + i;
      f += re_[j] * cs[i] + im_[j] * sn[i];
      const double g = im_[j] * cs[i] - re_[j] * sn[i];
      const double* w = om + j * d;
      for (long k = 0; k < d; ++k) grad[k] += g * w[k];
    }
  }
  return f;
}

Vector CorrelationFn::gradient(const Vector& x) const {
  Vector g;
  value_and_gradient(x, g);
  return g;
}

LocalExpansion CorrelationFn::expand(const Vector& x) const {
  check_dim(x);
  const long m = freqs_.m(), d = freqs_.d();
  const auto& om = freqs_.omegas();
  LocalExpansion out;
  out.gradient.setZero(d);
  out.hessian.setZero(d, d);
  double t[detail::kBlock], sn[detail::kBlock], cs[detail::kBlock];
  for (long j0 = 0; j0 < m; j0 += detail::kBlock) {
    const long n = std::min(detail::kBlock, m - j0);
    detail::phases(om.data(), d, x.data(), j0, n, t);
    detail::sincos_block(t, sn, cs, n);
    for (long i = 0; i < n; ++i) {
      const long j = j0 + i;
      const double* w = om.data() + j * d;
      const double v = re_[j] * cs[i] + im_[j] * sn[i];
      out.value += v;
      const double g = im_[j] * cs[i] - re_[j] * sn[i];
      for (long k = 0; k < d; ++k) out.gradient[k] += g * w[k];
      out.hessian.noalias() -= v * (om.row(j).transpose() * om.row(j));
    }
  }
  out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  return out;
}

Matrix CorrelationFn::hessian(const Vector& x) const { return expand(x).hessian; }

double kde_oracle(const Vector& x, const Dataset& data, double sigma) {
  if (data.empty()) throw EmptyDatasetError();
  if (x.size() != data.dim()) throw DimensionError("kde_oracle", data.dim(), x.size());
  if (!(sigma > 0)) throw ConfigError("kde_oracle: sigma must be > 0");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double acc = 0.0;
  for (long i = 0; i < data.size(); ++i)
    acc += std::exp(-(data.row(i).transpose() - x).squaredNorm() * inv);
  return acc / static_cast<double>(data.size());
}

}  // namespace cskit
