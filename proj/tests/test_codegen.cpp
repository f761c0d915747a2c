#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "dds/codegen.hpp"
#include "dds/synthetic.hpp"
#include "support/testutil.hpp"

using testutil::make_dataset;
using testutil::make_record;

namespace {

dds::RandomForest train_small_forest(std::size_t rows, int n_trees, std::uint64_t seed) {
  dds::ForestConfig cfg;
  cfg.n_trees = n_trees;
  cfg.seed = seed;
  return dds::train_forest(dds::make_benchmark_dataset(rows, seed), cfg);
}

}  // namespace

TEST_CASE("stump export is a constant return", "[codegen]") {
  const auto ds = make_dataset({make_record(2, {{3, 0.0}}), make_record(4, {{3, 1.0}})});
  dds::ForestConfig cfg;
  cfg.max_depth = 0;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  const auto forest = dds::train_forest(ds, cfg);
  const std::string src = dds::export_code(forest);
  CHECK(src.find("return 3;") != std::string::npos);
  CHECK(dds::eval_code(src, testutil::base_features()) == 3.0);
}

TEST_CASE("two-leaf tree exports one conditional with two returns", "[codegen]") {
  const auto ds = make_dataset({make_record(0, {{3, 0.0}}), make_record(10, {{3, 1.0}})});
  dds::ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.feature_subset = dds::kFeatureCount;
  const auto forest = dds::train_forest(ds, cfg);
  const std::string src = dds::export_code(forest);

  std::size_t ifs = 0, returns = 0, pos = 0;
  while ((pos = src.find("if (", pos)) != std::string::npos) {
    ++ifs;
    pos += 4;
  }
  pos = 0;
  while ((pos = src.find("return ", pos)) != std::string::npos) {
    ++returns;
    pos += 7;
  }
  CHECK(ifs == 1);
  CHECK(returns == 3);  // two leaves plus the averaging wrapper
  CHECK(src.find("sinr <= 0.5") != std::string::npos);

  auto x = testutil::base_features();
  x.sinr = 0.2;
  CHECK(dds::eval_code(src, x) == 0.0);
  x.sinr = 0.9;
  CHECK(dds::eval_code(src, x) == 10.0);
}

TEST_CASE("hand-written single-function text evaluates by routing", "[codegen]") {
  const std::string src =
      "double f(double p, double q, double r, double s, double c, double a, double t,\n"
      "         double fr, double id, double v) {\n"
      "  if (s <= 2) { return 1; } else { return 3; }\n"
      "}\n";
  auto x = testutil::base_features();
  x.sinr = 1.0;  // parameter position 3 binds to sinr
  CHECK(dds::eval_code(src, x) == 1.0);
  x.sinr = 5.0;
  CHECK(dds::eval_code(src, x) == 3.0);
}

TEST_CASE("export round-trips bit-equal on random inputs", "[codegen]") {
  const auto forest = train_small_forest(80, 10, 7);
  const dds::CompiledCode compiled(dds::export_code(forest));
  dds::Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    const auto x = dds::random_feature_vector(rng);
    CHECK(compiled.eval(x) == dds::predict(forest, x));
  }
}

TEST_CASE("foreign input is rejected with a position", "[codegen]") {
  CHECK_THROWS_AS(dds::eval_code("hello world", testutil::base_features()), dds::CodeError);
  CHECK_THROWS_WITH(dds::eval_code("double f(double a) { return }", testutil::base_features()),
                    Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_AS(dds::eval_code("", testutil::base_features()), dds::CodeError);
  // truncated export
  const auto forest = train_small_forest(30, 2, 3);
  std::string src = dds::export_code(forest);
  src.resize(src.size() / 2);
  CHECK_THROWS_AS(dds::eval_code(src, testutil::base_features()), dds::CodeError);
}

TEST_CASE("a tampered threshold is detectable by re-evaluation", "[codegen]") {
  const auto forest = train_small_forest(60, 3, 17);
  std::string src = dds::export_code(forest);
  const std::size_t pos = src.find(" <= ");
  REQUIRE(pos != std::string::npos);
  const std::size_t end = src.find(')', pos);
  src.replace(pos, end - pos, " <= -1e9");  // force that branch right

  const dds::CompiledCode tampered(src);
  dds::Rng rng(5);
  bool mismatch = false;
  for (int i = 0; i < 200 && !mismatch; ++i) {
    const auto x = dds::random_feature_vector(rng);
    mismatch = tampered.eval(x) != dds::predict(forest, x);
  }
  CHECK(mismatch);
}

TEST_CASE("entry function must take the ten features", "[codegen]") {
  CHECK_THROWS_AS(
      dds::eval_code("double f(double a, double b) { return 1; }", testutil::base_features()),
      dds::CodeError);
}
