#include <doctest.h>

#include <limits>
#include <vector>

#include "cskit/box_minimizer.hpp"
#include "helpers.hpp"

using namespace cskit;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double rosenbrock(const Vector& x, Vector& g) {
  const double a = 1 - x[0], b = x[1] - x[0] * x[0];
  g.resize(2);
  g[0] = -2 * a - 400 * x[0] * b;
  g[1] = 200 * b;
  return a * a + 100 * b * b;
}

}  // namespace

TEST_CASE("minimize_box unconstrained Rosenbrock") {
  BoxMinimizerOptions opts;
  opts.max_iterations = 500;
  const auto r = minimize_box(rosenbrock, test::vec({-1.2, 1.0}), Vector::Constant(2, -kInf),
                              Vector::Constant(2, kInf), opts);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.value <= r.initial_value);
}

TEST_CASE("minimize_box active bounds") {
  // min (x - 2)^2 + (y + 3)^2 on [0, 1] x [-1, 1] -> (1, -1)
  auto f = [](const Vector& x, Vector& g) {
    g = 2 * (x - test::vec({2.0, -3.0}));
    return (x - test::vec({2.0, -3.0})).squaredNorm();
  };
  const auto r = minimize_box(f, test::vec({0.5, 0.5}), test::vec({0, -1}), test::vec({1, 1}));
  CHECK(r.converged);
  CHECK(r.x[0] == 1.0);
  CHECK(r.x[1] == -1.0);
}

TEST_CASE("minimize_box stays feasible and never increases the objective") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    const Vector center = test::random_vector(4, gen, 2.0);
    std::vector<double> values;
    auto f = [&](const Vector& x, Vector& g) {
      // Rotated, badly scaled quartic bowl.
      const Vector y = x - center;
      const Vector w = test::vec({1, 10, 100, 0.1});
      const double q = (w.array() * y.array().square()).sum();
      g = 2 * w.cwiseProduct(y) * (1 + q);
      const double v = q + 0.5 * q * q;
      values.push_back(v);
      return v;
    };
    const Vector lo = Vector::Constant(4, -1), hi = Vector::Constant(4, 1);
    const auto r = minimize_box(f, test::random_vector(4, gen), lo, hi);
    CHECK((r.x.array() >= -1).all());
    CHECK((r.x.array() <= 1).all());
    CHECK(r.value <= r.initial_value);
    // The optimum is the clamp of the unconstrained minimizer (separable).
    CHECK((r.x - center.cwiseMax(lo).cwiseMin(hi)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("minimize_box at a minimum returns immediately") {
  auto f = [](const Vector& x, Vector& g) {
    g = 2 * x;
    return x.squaredNorm();
  };
  const auto r = minimize_box(f, Vector::Zero(3), Vector::Constant(3, -1), Vector::Constant(3, 1));
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.x.isZero());
  CHECK_THROWS_AS(minimize_box(f, Vector::Zero(3), Vector::Constant(2, -1), Vector::Constant(3, 1)), DimensionError);
}
