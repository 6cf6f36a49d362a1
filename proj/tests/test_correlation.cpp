#include <doctest.h>

#include <cmath>
#include <random>

#include "cskit/correlation.hpp"
#include "helpers.hpp"

using namespace cskit;

namespace {

Vector central_gradient(const CorrelationFn& f, const Vector& x, double h) {
  Vector g(x.size());
  for (long k = 0; k < x.size(); ++k) {
    Vector p = x, q = x;
    p[k] += h;
    q[k] -= h;
    g[k] = (f.value(p) - f.value(q)) / (2 * h);
  }
  return g;
}

Matrix central_jacobian(const CorrelationFn& f, const Vector& x, double h) {
  Matrix j(x.size(), x.size());
  for (long k = 0; k < x.size(); ++k) {
    Vector p = x, q = x;
    p[k] += h;
    q[k] -= h;
    j.col(k) = (f.gradient(p) - f.gradient(q)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("correlation value") {
  const auto freqs = sample_frequencies(3, 200, 0.6, 4);
  std::mt19937_64 gen(8);

  SUBCASE("own atom correlates to one") {
    for (int t = 0; t < 10; ++t) {
      const Vector x = test::random_vector(3, gen);
      CHECK(std::abs(CorrelationFn(feature_map(x, freqs), freqs).value(x) - 1.0) < 1e-12);
    }
  }
  SUBCASE("dataset sketch matches the cosine double sum") {
    const Dataset data = test::random_dataset(50, 3, 5);
    const CorrelationFn f(sketch_dataset(data, freqs).values, freqs);
    for (int t = 0; t < 5; ++t) {
      const Vector x = test::random_vector(3, gen);
      double acc = 0.0;
      for (long i = 0; i < data.size(); ++i)
        for (long j = 0; j < freqs.m(); ++j)
          acc += std::cos(freqs.omegas().row(j).dot(data.points().row(i).transpose() - x));
      CHECK(std::abs(f.value(x) - acc / (200.0 * 50.0)) < 1e-10);
    }
  }
  SUBCASE("bounded by the residual norm") {
    for (int t = 0; t < 100; ++t) {
      const ComplexVector r = 3.0 * test::random_complex(200, gen);
      const CorrelationFn f(r, freqs);
      CHECK(std::abs(f.value(test::random_vector(3, gen, 5.0))) <= r.norm() + 1e-12);
      CHECK(f.residual_norm() == doctest::Approx(3.0));
    }
  }
  SUBCASE("value_and_gradient agrees with the separate calls") {
    const CorrelationFn f(test::random_complex(200, gen), freqs);
    const Vector x = test::random_vector(3, gen);
    Vector g;
    const double v = f.value_and_gradient(x, g);
    CHECK(v == doctest::Approx(f.value(x)).epsilon(1e-14));
    CHECK((g - f.gradient(x)).norm() < 1e-14);
    const LocalExpansion e = f.expand(x);
    CHECK(e.value == doctest::Approx(v).epsilon(1e-14));
    CHECK((e.hessian - f.hessian(x)).norm() < 1e-14);
  }
  SUBCASE("dimension errors") {
    CHECK_THROWS_AS(CorrelationFn(ComplexVector::Zero(5), freqs), DimensionError);
    const CorrelationFn f(ComplexVector::Zero(200), freqs);
    CHECK_THROWS_AS(f.value(Vector::Zero(2)), DimensionError);
    CHECK_THROWS_AS(f.gradient(Vector::Zero(4)), DimensionError);
    CHECK_THROWS_AS(f.hessian(Vector::Zero(1)), DimensionError);
  }
}

TEST_CASE("correlation derivatives match finite differences") {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 100; ++t) {
    const long d = 1 + t % 6;
    const auto freqs = sample_frequencies(d, 64, 0.5 + 0.01 * t, 1000 + t);
    const CorrelationFn f(test::random_complex(64, gen), freqs);
    const Vector x = test::random_vector(d, gen);

    const Vector g = f.gradient(x);
    const Vector g_fd = central_gradient(f, x, 1e-5);
    CHECK((g - g_fd).norm() <= 1e-5 * g_fd.norm());

    const Matrix h = f.hessian(x);
    const Matrix h_fd = central_jacobian(f, x, 1e-4);
    CHECK((h - h_fd).cwiseAbs().maxCoeff() <= 1e-4 * h_fd.cwiseAbs().maxCoeff());
    CHECK(h == h.transpose());
  }
}

TEST_CASE("correlation at the center of its own atom") {
  const auto freqs = sample_frequencies(2, 300, 0.2, 3);
  const Vector c = test::vec({0.25, -0.4});
  const CorrelationFn f(sketch_dirac(c, freqs), freqs);
  CHECK(f.gradient(c).norm() < 1e-12);

  Matrix expected = Matrix::Zero(2, 2);
  for (long j = 0; j < freqs.m(); ++j) expected -= freqs.omegas().row(j).transpose() * freqs.omegas().row(j);
  expected /= 300.0;
  const Matrix h = f.hessian(c);
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-10 * expected.cwiseAbs().maxCoeff());
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().maxCoeff() <= 1e-10);
}

TEST_CASE("kde_oracle") {
  const Vector x = test::vec({0.1, 0.2});
  CHECK(kde_oracle(x, Dataset(test::row_matrix({{0.1, 0.2}})), 0.3) == 1.0);
  CHECK(kde_oracle(x, Dataset(test::row_matrix({{0.1, 0.2}, {0.1, 0.2}})), 0.3) == 1.0);
  CHECK(kde_oracle(x, Dataset(test::row_matrix({{0.1, 0.2}, {0.2, 0.2}})), 0.3) < 1.0);

  // Minimum distance 10 sigma.
  const Dataset far(test::row_matrix({{1.1, 0.2}, {0.1, -0.8}}));
  CHECK(kde_oracle(x, far, 0.1) <= std::exp(-50.0) * (1 + 1e-12));
  CHECK(kde_oracle(x, far, 0.1) > 0.0);

  CHECK_THROWS_AS(kde_oracle(x, Dataset(RowMatrix(0, 2)), 0.1), EmptyDatasetError);
  CHECK_THROWS_AS(kde_oracle(x, far, 0.0), ConfigError);
}
