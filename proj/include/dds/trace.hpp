#pragma once

// Measurement ingestion: labeled transmission datasets, time-ordered replay
// traces, and deterministic cross-validation fold splitting.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dds/csv.hpp"
#include "dds/random.hpp"

namespace dds {

inline constexpr int kFeatureCount = 10;

// The ten measured link/context indicators, in canonical column order.
struct FeatureVector {
  double payload = 0;   // bytes
  double rsrp = 0;      // dBm
  double rsrq = 0;      // dB
  double sinr = 0;      // dB
  double cqi = 0;       // channel quality index
  double asu = 0;       // arbitrary strength unit
  double ta = 0;        // timing advance
  double freq = 0;      // carrier frequency, MHz
  double cellid = 0;    // opaque numeric cell identifier
  double velocity = 0;  // km/h

  double operator[](int i) const { return this->*field(i); }
  double& operator[](int i) { return this->*field(i); }

  static constexpr std::array<const char*, kFeatureCount> names() {
    return {"payload", "rsrp", "rsrq", "sinr", "cqi",
            "asu",     "ta",   "freq", "cellid", "velocity"};
  }

 private:
  static constexpr double FeatureVector::* field(int i) {
    constexpr double FeatureVector::* fields[kFeatureCount] = {
        &FeatureVector::payload, &FeatureVector::rsrp,   &FeatureVector::rsrq,
        &FeatureVector::sinr,    &FeatureVector::cqi,    &FeatureVector::asu,
        &FeatureVector::ta,      &FeatureVector::freq,   &FeatureVector::cellid,
        &FeatureVector::velocity};
    return fields[static_cast<std::size_t>(i)];
  }
};

struct TransmissionRecord {
  FeatureVector features;
  double datarate = 0;  // measured label, MBit/s
};

// First violated field invariant as (column, reason), or nullopt when valid.
inline std::optional<std::pair<const char*, const char*>> invalid_field(
    const TransmissionRecord& r) {
  const auto names = FeatureVector::names();
  for (int i = 0; i < kFeatureCount; ++i)
    if (!std::isfinite(r.features[i])) return {{names[static_cast<std::size_t>(i)], "not finite"}};
  if (!(r.features.payload > 0)) return {{"payload", "must be > 0"}};
  if (r.features.cqi < 0 || r.features.cqi > 30) return {{"cqi", "outside [0, 30]"}};
  if (r.features.velocity < 0) return {{"velocity", "must be >= 0"}};
  if (!std::isfinite(r.datarate)) return {{"datarate", "not finite"}};
  if (r.datarate < 0) return {{"datarate", "must be >= 0"}};
  return std::nullopt;
}

// Labeled training corpus. label_min/label_max always track the records.
struct Dataset {
  std::vector<TransmissionRecord> records;
  double label_min = std::numeric_limits<double>::infinity();
  double label_max = -std::numeric_limits<double>::infinity();

  void add(const TransmissionRecord& r) {
    if (auto bad = invalid_field(r))
      throw std::invalid_argument(std::string("invalid record: column ") + bad->first + " " +
                                  bad->second);
    records.push_back(r);
    if (r.datarate < label_min) label_min = r.datarate;
    if (r.datarate > label_max) label_max = r.datarate;
  }

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

// Time-ordered feature replay; timestamps strictly increasing.
struct Trace {
  std::vector<std::pair<double, FeatureVector>> ticks;  // (seconds, features)
};

inline constexpr const char* kDatasetHeader =
    "payload,rsrp,rsrq,sinr,cqi,asu,ta,freq,cellid,velocity,datarate";
inline constexpr const char* kTraceHeader =
    "t,payload,rsrp,rsrq,sinr,cqi,asu,ta,freq,cellid,velocity";

namespace detail {

inline double parse_cell(const std::string& path, const std::vector<std::string>& cells,
                         std::size_t row, std::size_t col, const char* col_name) {
  const std::string& cell = cells[col];
  if (trim(cell).empty())
    throw CsvError(path + ": missing value, row " + std::to_string(row) + ", column " + col_name);
  double v = 0;
  if (!parse_double(cell, v))
    throw CsvError(path + ": non-numeric value '" + cell + "', row " + std::to_string(row) +
                   ", column " + col_name);
  return v;
}

}  // namespace detail

inline Dataset load_dataset(const std::string& path) {
  const auto rows = read_csv(path, kDatasetHeader);
  const auto names = FeatureVector::names();
  Dataset ds;
  ds.records.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t row = r + 1;
    TransmissionRecord rec;
    for (int f = 0; f < kFeatureCount; ++f) {
      const auto col = static_cast<std::size_t>(f);
      rec.features[f] = detail::parse_cell(path, rows[r], row, col, names[col]);
    }
    rec.datarate = detail::parse_cell(path, rows[r], row, kFeatureCount, "datarate");
    if (auto bad = invalid_field(rec))
      throw CsvError(path + ": invalid value, row " + std::to_string(row) + ", column " +
                     bad->first + " (" + bad->second + ")");
    ds.add(rec);
  }
  return ds;
}

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::string out = std::string(kDatasetHeader) + "\n";
  for (const auto& rec : ds.records) {
    for (int f = 0; f < kFeatureCount; ++f) {
      out += format_double(rec.features[f]);
      out += ',';
    }
    out += format_double(rec.datarate);
    out += '\n';
  }
  write_text_file(path, out);
}

inline Trace load_trace(const std::string& path) {
  const auto rows = read_csv(path, kTraceHeader);
  const auto names = FeatureVector::names();
  Trace trace;
  trace.ticks.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t row = r + 1;
    const double t = detail::parse_cell(path, rows[r], row, 0, "t");
    if (!trace.ticks.empty() && !(t > trace.ticks.back().first))
      throw CsvError(path + ": timestamps not strictly increasing, row " + std::to_string(row));
    FeatureVector x;
    for (int f = 0; f < kFeatureCount; ++f)
      x[f] = detail::parse_cell(path, rows[r], row, static_cast<std::size_t>(f) + 1,
                                names[static_cast<std::size_t>(f)]);
    trace.ticks.emplace_back(t, x);
  }
  return trace;
}

inline void save_trace(const std::string& path, const Trace& trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& [t, x] : trace.ticks) {
    out += format_double(t);
    for (int f = 0; f < kFeatureCount; ++f) {
      out += ',';
      out += format_double(x[f]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

// Deterministic k-fold partition: indices shuffled with the seed, then dealt
// round-robin. Test folds are disjoint, cover the dataset, and differ in
// size by at most one.
inline std::vector<std::pair<Dataset, Dataset>> split_folds(const Dataset& d, int k,
                                                            std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("split_folds: k must be >= 2");
  if (static_cast<std::size_t>(k) > d.size())
    throw std::invalid_argument("split_folds: k (" + std::to_string(k) +
                                ") exceeds record count (" + std::to_string(d.size()) + ")");

  std::vector<int> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  shuffle(order, rng);

  std::vector<std::vector<int>> test_idx(static_cast<std::size_t>(k));
  for (std::size_t j = 0; j < order.size(); ++j)
    test_idx[j % static_cast<std::size_t>(k)].push_back(order[j]);

  std::vector<std::pair<Dataset, Dataset>> folds;
  folds.reserve(static_cast<std::size_t>(k));
  std::vector<char> in_test(d.size());
  for (auto& idx : test_idx) {
    std::sort(idx.begin(), idx.end());
    std::fill(in_test.begin(), in_test.end(), 0);
    for (int i : idx) in_test[static_cast<std::size_t>(i)] = 1;
    Dataset train, test;
    for (std::size_t i = 0; i < d.size(); ++i)
      (in_test[i] ? test : train).add(d.records[i]);
    folds.emplace_back(std::move(train), std::move(test));
  }
  return folds;
}

}  // namespace dds
