#pragma once

// Shared test helpers: scratch directories and compact record builders.

#include <atomic>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>

#include <unistd.h>

#include "dds/trace.hpp"

namespace testutil {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dds_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Valid baseline feature vector; tests override individual fields.
inline dds::FeatureVector base_features() {
  dds::FeatureVector x;
  x.payload = 100;
  x.rsrp = -100;
  x.rsrq = -10;
  x.sinr = 10;
  x.cqi = 8;
  x.asu = 40;
  x.ta = 2;
  x.freq = 2100;
  x.cellid = 1001;
  x.velocity = 50;
  return x;
}

inline dds::TransmissionRecord make_record(
    double label, std::initializer_list<std::pair<int, double>> overrides = {}) {
  dds::TransmissionRecord rec;
  rec.features = base_features();
  for (const auto& [index, value] : overrides) rec.features[index] = value;
  rec.datarate = label;
  return rec;
}

inline dds::Dataset make_dataset(std::initializer_list<dds::TransmissionRecord> records) {
  dds::Dataset ds;
  for (const auto& r : records) ds.add(r);
  return ds;
}

// Small random dataset for split-search oracle checks: 2..max_rows rows,
// 2..10 varying features (the rest stay at the base values), continuous
// labels. Features are occasionally snapped to a coarse grid so duplicate
// values and cross-feature ties get exercised.
inline dds::Dataset random_small_dataset(dds::Rng& rng, int max_rows = 12) {
  const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_rows - 1)));
  const int n_varying = 2 + static_cast<int>(rng.below(9));
  const auto varying = dds::sample_without_replacement(dds::kFeatureCount, n_varying, rng);
  const bool snap = rng.uniform01() < 0.3;

  dds::Dataset ds;
  for (int i = 0; i < n; ++i) {
    dds::TransmissionRecord rec;
    rec.features = base_features();
    for (int f : varying) {
      double v = rng.uniform(0.0, 10.0);
      if (snap) v = std::floor(v);
      if (f == 0) v += 1.0;  // payload must stay positive
      rec.features[f] = v;
    }
    rec.datarate = rng.uniform(0.0, 20.0);
    ds.add(rec);
  }
  return ds;
}

}  // namespace testutil
