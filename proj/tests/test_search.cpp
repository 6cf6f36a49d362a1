#include <doctest.h>

#include <random>

#include "cskit/datagen.hpp"
#include "cskit/search.hpp"
#include "helpers.hpp"

using namespace cskit;

namespace {

Vector grid_node(const Box& box, int p, std::initializer_list<int> idx) {
  const Vector step = (box.upper() - box.lower()) / static_cast<double>(p - 1);
  Vector x(box.dim());
  long k = 0;
  for (int i : idx) {
    x[k] = box.lower()[k] + static_cast<double>(i) * step[k];
    ++k;
  }
  return x;
}

}  // namespace

TEST_CASE("grid search") {
  const Box box = Box::cube(2, -1.0, 1.0);
  const auto freqs = sample_frequencies(2, 500, 0.1, 2);

  SUBCASE("single atom on a node") {
    const Vector c = grid_node(box, 101, {60, 35});
    const CorrelationFn f(sketch_dirac(c, freqs), freqs);
    CHECK(get_local_maximum_grid(f, box, GridSearch{101}) == c);
  }
  SUBCASE("flat correlation returns the first node") {
    const CorrelationFn f(ComplexVector::Zero(500), freqs);
    const SearchResult r = grid_search(f, box, GridSearch{11});
    CHECK(r.point == box.lower());
    CHECK(r.iterations == 121);
  }
  SUBCASE("matches a brute-force scan on a clustered sketch") {
    const Dataset data = gen_gmm(make_separated_spec(3, 2, 4), 2000, 4).data;
    const CorrelationFn f(sketch_dataset(data, freqs).values, freqs);
    double best = -1e300;
    Vector arg;
    for (int i = 0; i < 101; ++i)
      for (int j = 0; j < 101; ++j) {
        const Vector x = grid_node(box, 101, {i, j});
        const double v = f.value(x);
        if (v > best) {
          best = v;
          arg = x;
        }
      }
    const SearchResult r = grid_search(f, box, GridSearch{101});
    CHECK(r.point == arg);
    CHECK(r.value == best);
  }
  SUBCASE("node cap") {
    const auto f6 = sample_frequencies(6, 10, 0.1, 1);
    const CorrelationFn f(ComplexVector::Zero(10), f6);
    CHECK_THROWS_AS(grid_search(f, Box::cube(6, -1, 1), GridSearch{101}), ConfigError);
    CHECK_THROWS_AS(grid_search(CorrelationFn(ComplexVector::Zero(500), freqs), box, GridSearch{1}), ConfigError);
  }
}

TEST_CASE("ascent trajectories") {
  const Box box = Box::cube(2, -1.0, 1.0);
  const auto freqs = sample_frequencies(2, 400, 0.2, 6);

  SUBCASE("stationary start stays put") {
    const Vector c = test::vec({0.3, -0.1});
    const CorrelationFn f(sketch_dirac(c, freqs), freqs);
    const Trajectory t = ascend(f, box, c, 0.02, 300, 1e-6, true);
    CHECK(t.point == c);
    CHECK(t.iterations == 0);
    CHECK(t.stop == TrajectoryStop::Converged);
  }
  SUBCASE("steps leaving the box are clamped") {
    const Vector c = test::vec({0.95, 0.0});
    const CorrelationFn f(sketch_dirac(c, freqs), freqs);
    const Vector start = test::vec({0.9, 0.05});
    Vector g;
    const double v = f.value_and_gradient(start, g);
    const double eta = 5.0;
    const Trajectory t = ascend(f, box, start, eta, 1, 1e-12, true);
    CHECK(t.point == box.clamp(start + eta / std::abs(v) * g));
    CHECK(box.contains(t.point));
  }
  SUBCASE("vanishing value halts") {
    const CorrelationFn f(ComplexVector::Zero(400), freqs);
    const Trajectory t = ascend(f, box, test::vec({0.1, 0.1}), 0.02, 300, 1e-6, true);
    CHECK(t.stop == TrajectoryStop::VanishingValue);
    CHECK(t.point == test::vec({0.1, 0.1}));
  }
}

TEST_CASE("mean shift finds the heavier of two atoms") {
  const auto freqs = sample_frequencies(1, 2000, 0.1, 8);
  const Box box = Box::cube(1, -1.0, 1.0);
  const ComplexVector r = 0.6 * sketch_dirac(test::vec({0.5}), freqs) + 0.4 * sketch_dirac(test::vec({-0.5}), freqs);
  const CorrelationFn f(r, freqs);

  double best = -1e300, arg = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -1.0 + 2.0 * i / 9999.0;
    const double v = f.value(test::vec({x}));
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  MeanShiftSearch cfg;
  cfg.restarts = 50;
  const SearchResult res = get_local_maximum_meanshift(f, box, cfg, 3);
  CHECK(std::abs(res.point[0] - arg) <= 0.02);
  CHECK(std::abs(arg - 0.5) <= 0.02);

  const SearchResult again = get_local_maximum_meanshift(f, box, cfg, 3);
  CHECK(again.point == res.point);
  CHECK(again.winner == res.winner);
}

TEST_CASE("mean shift interior fixed points satisfy the stopping condition") {
  const Dataset data = gen_gmm(make_separated_spec(3, 2, 9), 3000, 9).data;
  const Box box = Box::cube(2, -1.0, 1.0);
  for (double sigma : {0.05, 0.1, 0.3}) {
    const auto freqs = sample_frequencies(2, 300, sigma, 10);
    const CorrelationFn f(sketch_dataset(data, freqs).values, freqs);
    const double eta = 0.5 * sigma * sigma, tol = 1e-6 * box.diameter();
    int checked = 0;
    for (int j = 0; j < 40; ++j) {
      const Trajectory t = ascend(f, box, restart_point(box, 1, 0, j), eta, 300, tol, true);
      const bool interior = ((t.point - box.lower()).array() > 0).all() && ((box.upper() - t.point).array() > 0).all();
      if (t.stop != TrajectoryStop::Converged || !interior) continue;
      CHECK(f.gradient(t.point).norm() <= tol * std::abs(f.value(t.point)) / eta + 1e-9);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("restart points") {
  const Box box(test::vec({-1.0, 2.0}), test::vec({0.0, 5.0}));
  for (int j = 0; j < 100; ++j) CHECK(box.contains(restart_point(box, 4, 2, j)));
  CHECK(restart_point(box, 4, 2, 7) == restart_point(box, 4, 2, 7));
  CHECK(restart_point(box, 4, 2, 7) != restart_point(box, 4, 3, 7));
}

TEST_CASE("search configuration") {
  const Box box = Box::cube(2, -1.0, 1.0);
  const auto ms = std::get<MeanShiftSearch>(resolve_search(MeanShiftSearch{}, 0.2, box));
  CHECK(*ms.eta == doctest::Approx(0.02));
  CHECK(*ms.tol == doctest::Approx(1e-6 * std::sqrt(8.0)));
  const auto ga = std::get<GradientAscentSearch>(resolve_search(GradientAscentSearch{}, 0.2, box));
  CHECK(*ga.step == doctest::Approx(0.04));

  MeanShiftSearch bad;
  bad.restarts = 0;
  CHECK_THROWS_AS(validate_search(bad), ConfigError);
  bad.restarts = 1;
  bad.eta = -1.0;
  CHECK_THROWS_AS(validate_search(bad), ConfigError);
  bad.eta = 1.0;
  bad.tol = 0.0;
  CHECK_THROWS_AS(validate_search(bad), ConfigError);
  CHECK_THROWS_AS(Box(test::vec({0.0}), test::vec({0.0})), ConfigError);
}
