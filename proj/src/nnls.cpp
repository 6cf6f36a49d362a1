#include "cskit/nnls.hpp"

#include <cmath>
#include <limits>

namespace cskit {

namespace {

// Unconstrained least squares restricted to the columns flagged in `passive`;
// entries outside the passive set are zero.
Vector solve_passive(const Matrix& a, const Vector& b, const std::vector<bool>& passive) {
  const long n = a.cols();
  std::vector<long> idx;
  for (long i = 0; i < n; ++i)
    if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
  Vector s = Vector::Zero(n);
  if (idx.empty()) return s;
  Matrix sub(a.rows(), static_cast<long>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<long>(c)) = a.col(idx[c]);
  const Vector sol = sub.colPivHouseholderQr().solve(b);
  for (std::size_t c = 0; c < idx.size(); ++c) s[idx[c]] = sol[static_cast<long>(c)];
  return s;
}

}  // namespace

NnlsResult nnls(const Matrix& a, const Vector& b, int max_iterations) {
  const long n = a.cols();
  if (b.size() != a.rows()) throw DimensionError("nnls right-hand side", a.rows(), b.size());
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);

  const double scale = std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff());
  const double tol = 64 * std::numeric_limits<double>::epsilon() * scale * static_cast<double>(std::max<long>(n, 1));

  NnlsResult res;
  res.x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  std::vector<bool> rejected(static_cast<std::size_t>(n), false);
  Vector w = a.transpose() * (b - a * res.x);

  int iter = 0;
  while (iter < max_iterations) {
    long j = -1;
    double best = tol;
    for (long i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (!passive[ui] && !rejected[ui] && w[i] > best) {
        best = w[i];
        j = i;
      }
    }
    if (j < 0) break;
    ++iter;
    passive[static_cast<std::size_t>(j)] = true;

    Vector s = solve_passive(a, b, passive);
    if (s[j] <= 0) {
      // Numerically dependent column: its multiplier cannot become positive.
      passive[static_cast<std::size_t>(j)] = false;
      rejected[static_cast<std::size_t>(j)] = true;
      continue;
    }
    int inner = 0;
    while (inner++ < max_iterations) {
      double alpha = std::numeric_limits<double>::infinity();
      for (long i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && s[i] <= 0) {
          alpha = std::min(alpha, res.x[i] / (res.x[i] - s[i]));
        }
      }
      if (!std::isfinite(alpha)) break;
      res.x += alpha * (s - res.x);
      for (long i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (passive[ui] && res.x[i] <= tol * 1e-3) {
          passive[ui] = false;
          res.x[i] = 0.0;
        }
      }
      s = solve_passive(a, b, passive);
    }
    for (long i = 0; i < n; ++i) res.x[i] = passive[static_cast<std::size_t>(i)] ? s[i] : 0.0;
    w = a.transpose() * (b - a * res.x);
    std::fill(rejected.begin(), rejected.end(), false);
  }

  const Vector r = a * res.x - b;
  res.gradient = a.transpose() * r;
  res.residual_norm = r.norm();
  res.iterations = iter;
  return res;
}

Matrix stack_atoms(const std::vector<ComplexVector>& atoms) {
  if (atoms.empty()) return Matrix(0, 0);
  const long m = atoms.front().size();
  Matrix out(2 * m, static_cast<long>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != m) throw DimensionError("nnls atom", m, atoms[i].size());
    out.col(static_cast<long>(i)) << atoms[i].real(), atoms[i].imag();
  }
  return out;
}

Vector stack_complex(const ComplexVector& z) {
  Vector out(2 * z.size());
  out << z.real(), z.imag();
  return out;
}

NnlsResult nnls_weights(const ComplexVector& z, const std::vector<ComplexVector>& atoms) {
  if (atoms.empty()) throw ConfigError("nnls_weights needs at least one atom");
  if (atoms.front().size() != z.size()) throw DimensionError("nnls_weights", z.size(), atoms.front().size());
  return nnls(stack_atoms(atoms), stack_complex(z));
}

}  // namespace cskit
