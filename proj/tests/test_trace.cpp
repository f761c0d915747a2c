#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "dds/synthetic.hpp"
#include "dds/trace.hpp"
#include "support/testutil.hpp"

using testutil::make_record;
using testutil::TempDir;

TEST_CASE("feature vector indexing matches named fields", "[trace]") {
  dds::FeatureVector x;
  for (int i = 0; i < dds::kFeatureCount; ++i) x[i] = i * 1.5;
  CHECK(x.payload == 0.0);
  CHECK(x.rsrp == 1.5);
  CHECK(x.rsrq == 3.0);
  CHECK(x.sinr == 4.5);
  CHECK(x.cqi == 6.0);
  CHECK(x.asu == 7.5);
  CHECK(x.ta == 9.0);
  CHECK(x.freq == 10.5);
  CHECK(x.cellid == 12.0);
  CHECK(x.velocity == 13.5);
}

TEST_CASE("load_dataset reads well-formed rows in order", "[trace]") {
  TempDir tmp;
  dds::write_text_file(tmp.str("d.csv"),
                       "payload,rsrp,rsrq,sinr,cqi,asu,ta,freq,cellid,velocity,datarate\n"
                       "# comment line\n"
                       "1000,-90,-9,12,10,50,3,2100,7,30,15.5\n"
                       "\n"
                       "2000,-105,-14,2,4,20,8,1800,9,80,3.25\n"
                       "500,-80,-7,22,14,70,1,2600,7,10,24\n");
  const dds::Dataset ds = dds::load_dataset(tmp.str("d.csv"));
  REQUIRE(ds.size() == 3);
  CHECK(ds.records[0].datarate == 15.5);
  CHECK(ds.records[1].features.sinr == 2.0);
  CHECK(ds.records[2].features.freq == 2600.0);
  CHECK(ds.label_min == 3.25);
  CHECK(ds.label_max == 24.0);
}

TEST_CASE("load_dataset names row and column on bad cells", "[trace]") {
  TempDir tmp;
  SECTION("missing value") {
    dds::write_text_file(tmp.str("d.csv"),
                         std::string(dds::kDatasetHeader) + "\n1000,-90,-9,,10,50,3,2100,7,30,15\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("d.csv")),
                      Catch::Matchers::ContainsSubstring("missing value, row 1, column sinr"));
  }
  SECTION("non-numeric value") {
    dds::write_text_file(tmp.str("d.csv"),
                         std::string(dds::kDatasetHeader) +
                             "\n1000,-90,-9,12,10,50,3,2100,7,30,15\n"
                             "1000,-90,-9,12,abc,50,3,2100,7,30,15\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("d.csv")),
                      Catch::Matchers::ContainsSubstring("row 2, column cqi"));
  }
  SECTION("wrong column count") {
    dds::write_text_file(tmp.str("d.csv"),
                         std::string(dds::kDatasetHeader) + "\n1000,-90,-9,12,10\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("d.csv")),
                      Catch::Matchers::ContainsSubstring("wrong column count, row 1"));
  }
  SECTION("range violations") {
    dds::write_text_file(tmp.str("d.csv"),
                         std::string(dds::kDatasetHeader) + "\n0,-90,-9,12,10,50,3,2100,7,30,15\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("d.csv")),
                      Catch::Matchers::ContainsSubstring("column payload"));
    dds::write_text_file(tmp.str("e.csv"),
                         std::string(dds::kDatasetHeader) + "\n10,-90,-9,12,31,50,3,2100,7,30,15\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("e.csv")),
                      Catch::Matchers::ContainsSubstring("column cqi"));
    dds::write_text_file(tmp.str("f.csv"),
                         std::string(dds::kDatasetHeader) + "\n10,-90,-9,12,10,50,3,2100,7,30,nan\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("f.csv")),
                      Catch::Matchers::ContainsSubstring("column datarate"));
  }
  SECTION("bad header") {
    dds::write_text_file(tmp.str("d.csv"), "a,b,c\n1,2,3\n");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("d.csv")),
                      Catch::Matchers::ContainsSubstring("unexpected header"));
  }
  SECTION("empty file") {
    dds::write_text_file(tmp.str("d.csv"), "");
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("d.csv")),
                      Catch::Matchers::ContainsSubstring("empty file"));
  }
  SECTION("missing file") {
    CHECK_THROWS_WITH(dds::load_dataset(tmp.str("nope.csv")),
                      Catch::Matchers::ContainsSubstring("nope.csv"));
  }
}

TEST_CASE("dataset with 2342 rows loads completely", "[trace]") {
  TempDir tmp;
  dds::save_dataset(tmp.str("big.csv"), dds::make_benchmark_dataset(2342, 5));
  CHECK(dds::load_dataset(tmp.str("big.csv")).size() == 2342);
}

TEST_CASE("dataset CSV round trip is bit-exact", "[trace]") {
  TempDir tmp;
  const dds::Dataset ds = dds::make_benchmark_dataset(60, 9);
  dds::save_dataset(tmp.str("d.csv"), ds);
  const dds::Dataset back = dds::load_dataset(tmp.str("d.csv"));
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (int f = 0; f < dds::kFeatureCount; ++f)
      CHECK(back.records[i].features[f] == ds.records[i].features[f]);
    CHECK(back.records[i].datarate == ds.records[i].datarate);
  }
  CHECK(back.label_min == ds.label_min);
  CHECK(back.label_max == ds.label_max);
}

TEST_CASE("load_trace enforces strictly increasing timestamps", "[trace]") {
  TempDir tmp;
  const std::string row = ",1000,-90,-9,12,10,50,3,2100,7,30\n";
  dds::write_text_file(tmp.str("t.csv"),
                       std::string(dds::kTraceHeader) + "\n0" + row + "1" + row + "2" + row);
  CHECK(dds::load_trace(tmp.str("t.csv")).ticks.size() == 3);

  dds::write_text_file(tmp.str("bad.csv"),
                       std::string(dds::kTraceHeader) + "\n0" + row + "1" + row + "1" + row);
  CHECK_THROWS_WITH(dds::load_trace(tmp.str("bad.csv")),
                    Catch::Matchers::ContainsSubstring("row 3"));
}

TEST_CASE("a 600 s trace at 1 Hz has 600 ticks", "[trace]") {
  TempDir tmp;
  dds::save_trace(tmp.str("t.csv"), dds::make_oscillating_trace(600, 2));
  CHECK(dds::load_trace(tmp.str("t.csv")).ticks.size() == 600);
}

TEST_CASE("split_folds partitions deterministically", "[trace]") {
  dds::Dataset ds;
  for (int i = 0; i < 10; ++i) ds.add(make_record(i, {{3, double(i)}}));

  SECTION("k = 10 gives singleton test folds") {
    const auto folds = dds::split_folds(ds, 10, 1);
    REQUIRE(folds.size() == 10);
    for (const auto& [train, test] : folds) {
      CHECK(test.size() == 1);
      CHECK(train.size() == 9);
    }
  }
  SECTION("k = 3 gives sizes {4,3,3}") {
    const auto folds = dds::split_folds(ds, 3, 1);
    REQUIRE(folds.size() == 3);
    std::multiset<std::size_t> sizes;
    for (const auto& f : folds) sizes.insert(f.second.size());
    CHECK(sizes == std::multiset<std::size_t>{3, 3, 4});
  }
  SECTION("same seed yields identical partitions") {
    const auto a = dds::split_folds(ds, 3, 7);
    const auto b = dds::split_folds(ds, 3, 7);
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].second.size() == b[i].second.size());
      for (std::size_t j = 0; j < a[i].second.size(); ++j)
        CHECK(a[i].second.records[j].datarate == b[i].second.records[j].datarate);
    }
  }
  SECTION("argument errors") {
    CHECK_THROWS_AS(dds::split_folds(ds, 11, 1), std::invalid_argument);
    CHECK_THROWS_AS(dds::split_folds(ds, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("split_folds covers the dataset with disjoint test folds", "[trace]") {
  dds::Rng rng(23);
  for (int round = 0; round < 5; ++round) {
    const int n = 10 + static_cast<int>(rng.below(31));
    const int k = 2 + static_cast<int>(rng.below(6));
    dds::Dataset ds;
    for (int i = 0; i < n; ++i) ds.add(make_record(i, {{3, rng.uniform(-5, 30)}}));
    const auto folds = dds::split_folds(ds, k, rng.raw());

    std::multiset<double> seen;
    std::size_t max_size = 0, min_size = ds.size();
    for (const auto& [train, test] : folds) {
      CHECK(train.size() + test.size() == ds.size());
      for (const auto& rec : test.records) seen.insert(rec.datarate);
      max_size = std::max(max_size, test.size());
      min_size = std::min(min_size, test.size());
      // recomputed label ranges
      if (!test.empty()) {
        double lo = test.records[0].datarate, hi = lo;
        for (const auto& rec : test.records) {
          lo = std::min(lo, rec.datarate);
          hi = std::max(hi, rec.datarate);
        }
        CHECK(test.label_min == lo);
        CHECK(test.label_max == hi);
      }
    }
    CHECK(max_size - min_size <= 1);
    std::multiset<double> expected;
    for (const auto& rec : ds.records) expected.insert(rec.datarate);
    CHECK(seen == expected);
  }
}

TEST_CASE("dataset add rejects invalid records", "[trace]") {
  dds::Dataset ds;
  CHECK_THROWS_AS(ds.add(make_record(-1)), std::invalid_argument);
  CHECK_THROWS_AS(ds.add(make_record(5, {{0, 0.0}})), std::invalid_argument);
  CHECK_THROWS_AS(ds.add(make_record(5, {{4, 31.0}})), std::invalid_argument);
  CHECK_THROWS_AS(ds.add(make_record(5, {{9, -2.0}})), std::invalid_argument);
  CHECK(ds.empty());
  ds.add(make_record(5));
  CHECK(ds.size() == 1);
}
