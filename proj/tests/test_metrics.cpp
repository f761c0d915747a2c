#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dds/metrics.hpp"
#include "dds/random.hpp"

using Catch::Approx;

TEST_CASE("r_squared identity and mean predictor", "[metrics]") {
  const std::vector<double> y{1, 2, 3, 4, 5};
  CHECK(dds::r_squared(y, y) == 1.0);

  const std::vector<double> mean_pred(y.size(), 3.0);
  CHECK(dds::r_squared(y, mean_pred) == 0.0);
}

TEST_CASE("r_squared direct-evaluation example", "[metrics]") {
  const std::vector<double> y{1, 2, 3};
  const std::vector<double> pred{1, 2, 4};
  // SS_res = 1, SS_tot = 2
  CHECK(dds::r_squared(y, pred) == 0.5);
}

TEST_CASE("r_squared error paths", "[metrics]") {
  const std::vector<double> y{1, 2, 3};
  CHECK_THROWS_AS(dds::r_squared(y, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(dds::r_squared(std::vector<double>{1}, std::vector<double>{1}),
                  std::invalid_argument);
  const std::vector<double> constant{2, 2, 2};
  CHECK_THROWS_AS(dds::r_squared(constant, y), std::domain_error);
}

TEST_CASE("r_squared reorder invariance", "[metrics]") {
  dds::Rng rng(11);
  std::vector<double> y, pred;
  for (int i = 0; i < 40; ++i) {
    y.push_back(rng.uniform(0, 30));
    pred.push_back(rng.uniform(0, 30));
  }
  const double before = dds::r_squared(y, pred);
  std::vector<int> order(y.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  dds::shuffle(order, rng);
  std::vector<double> y2, pred2;
  for (int i : order) {
    y2.push_back(y[static_cast<std::size_t>(i)]);
    pred2.push_back(pred[static_cast<std::size_t>(i)]);
  }
  CHECK(std::abs(dds::r_squared(y2, pred2) - before) < 1e-12);
}

TEST_CASE("pearson_r endpoints and frozen example", "[metrics]") {
  const std::vector<double> a{0, 1, 2, 5};
  std::vector<double> b = a;
  CHECK(dds::pearson_r(a, b) == Approx(1.0).margin(1e-12));
  for (double& v : b) v = -v;
  CHECK(dds::pearson_r(a, b) == Approx(-1.0).margin(1e-12));

  const std::vector<double> u{0, 1, 2};
  const std::vector<double> w{0, 2, 3};
  const double expected = 9.0 / (2.0 * std::sqrt(21.0));  // = 0.98198...
  CHECK(dds::pearson_r(u, w) == Approx(expected).margin(1e-12));
  CHECK(std::abs(dds::pearson_r(u, w) - 0.982) < 0.001);
}

TEST_CASE("pearson_r affine invariance and errors", "[metrics]") {
  dds::Rng rng(3);
  std::vector<double> a, b;
  for (int i = 0; i < 25; ++i) {
    a.push_back(rng.uniform(-5, 5));
    b.push_back(rng.uniform(-5, 5));
  }
  const double r = dds::pearson_r(a, b);
  std::vector<double> a2;
  for (double v : a) a2.push_back(3.5 * v + 11.0);
  CHECK(std::abs(dds::pearson_r(a2, b) - r) <= 1e-12);

  const std::vector<double> constant{1, 1, 1};
  CHECK_THROWS_AS(dds::pearson_r(constant, constant), std::domain_error);
}

TEST_CASE("summarize singleton and small sets", "[metrics]") {
  const auto s1 = dds::summarize(std::vector<double>{5});
  CHECK(s1.n == 1);
  CHECK(s1.mean == 5.0);
  CHECK(s1.std_dev == 0.0);
  CHECK(s1.min == 5.0);
  CHECK(s1.q1 == 5.0);
  CHECK(s1.median == 5.0);
  CHECK(s1.q3 == 5.0);
  CHECK(s1.max == 5.0);

  const auto s2 = dds::summarize(std::vector<double>{1, 2, 3, 4});
  CHECK(s2.median == 2.5);

  // interpolation at (n-1)*q for n = 8
  const auto s3 = dds::summarize(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(s3.q1 == 2.75);
  CHECK(s3.q3 == 6.25);
}

TEST_CASE("summarize permutation invariance and ordering", "[metrics]") {
  dds::Rng rng(17);
  std::vector<double> v;
  for (int i = 0; i < 33; ++i) v.push_back(rng.uniform(0, 100));
  const auto a = dds::summarize(v);
  dds::shuffle(v, rng);
  const auto b = dds::summarize(v);
  CHECK(a.mean == b.mean);
  CHECK(a.q1 == b.q1);
  CHECK(a.median == b.median);
  CHECK(a.q3 == b.q3);
  CHECK(a.min <= a.q1);
  CHECK(a.q1 <= a.median);
  CHECK(a.median <= a.q3);
  CHECK(a.q3 <= a.max);

  CHECK_THROWS_AS(dds::summarize(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("timed reports non-negative durations and passes results through", "[metrics]") {
  const double secs = dds::timed([] {});
  CHECK(secs >= 0.0);

  auto [value, t] = dds::timed([] { return 42; });
  CHECK(value == 42);
  CHECK(t >= 0.0);

  // timing must not perturb the result
  auto op = [] {
    double acc = 0;
    for (int i = 1; i <= 1000; ++i) acc += 1.0 / i;
    return acc;
  };
  auto [r1, t1] = dds::timed(op);
  auto [r2, t2] = dds::timed(op);
  CHECK(r1 == r2);
}
