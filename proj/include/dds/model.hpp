#pragma once

// The combined data-driven simulation model: forest predictor, GP error
// model, and the measured label range that samples are shaped to.

#include <filesystem>
#include <sstream>
#include <optional>
#include <string>

#include "dds/forest.hpp"
#include "dds/gpr.hpp"

namespace dds {

struct DdsModel {
  RandomForest forest;
  ErrorModel error_model;
  double label_min = 0;
  double label_max = 0;
};

struct BuildOptions {
  std::size_t gpr_max_points = 2000;  // O(n^3) solve; subsample above this
  bool oob_predictions = false;       // fit the error model on out-of-bag predictions
};

// Clamp to the measured value range; sampling the error distribution can
// produce impossible values (negative data rates) outside it.
inline double shape_to_range(double v, const DdsModel& m) {
  if (v < m.label_min) return m.label_min;
  if (v > m.label_max) return m.label_max;
  return v;
}

// Deterministic prediction path: forest output shaped to the label range.
inline double dds_predict_mean(const DdsModel& m, const FeatureVector& x) {
  return shape_to_range(predict(m.forest, x), m);
}

// Stochastic prediction path: sample the error distribution around the
// forest output, then shape. Always lands in [label_min, label_max].
inline double dds_predict(const DdsModel& m, const FeatureVector& x, Rng& rng) {
  return shape_to_range(sample_posterior(m.error_model, predict(m.forest, x), rng), m);
}

namespace detail {

// Per-record predictions used to fit the error model. Out-of-bag mode
// averages only trees whose bootstrap resample missed the record, falling
// back to the full ensemble when every tree saw it.
inline std::vector<double> training_predictions(const RandomForest& f, const Dataset& d,
                                                bool out_of_bag) {
  std::vector<double> preds(d.size());
  if (!out_of_bag || !f.config.bootstrap) {
    for (std::size_t i = 0; i < d.size(); ++i) preds[i] = predict(f, d.records[i].features);
    return preds;
  }
  std::vector<std::vector<char>> in_bag(f.trees.size(), std::vector<char>(d.size(), 0));
  for (std::size_t t = 0; t < f.trees.size(); ++t)
    for (int i : bootstrap_indices(f.trees[t].rng_seed, d.size()))
      in_bag[t][static_cast<std::size_t>(i)] = 1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double acc = 0;
    std::size_t used = 0;
    for (std::size_t t = 0; t < f.trees.size(); ++t)
      if (!in_bag[t][i]) {
        acc += f.trees[t].predict(d.records[i].features);
        ++used;
      }
    preds[i] = used ? acc / static_cast<double>(used) : predict(f, d.records[i].features);
  }
  return preds;
}

}  // namespace detail

// Trains the forest, predicts every training record, fits the error model on
// the (predicted, measured) pairs, and keeps the label range for shaping.
inline DdsModel build_dds(const Dataset& d, const ForestConfig& fcfg,
                          std::optional<Kernel> kernel = std::nullopt,
                          const BuildOptions& opt = {}) {
  if (d.empty()) throw std::invalid_argument("build_dds: empty dataset");

  DdsModel m;
  m.forest = train_forest(d, fcfg);
  m.label_min = d.label_min;
  m.label_max = d.label_max;

  std::vector<double> preds = detail::training_predictions(m.forest, d, opt.oob_predictions);
  std::vector<double> meas(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) meas[i] = d.records[i].datarate;

  if (opt.gpr_max_points > 0 && preds.size() > opt.gpr_max_points) {
    Rng rng(derive_seed(fcfg.seed, seed_stream::gpr_subsample));
    const auto keep = sample_without_replacement(static_cast<int>(preds.size()),
                                                 static_cast<int>(opt.gpr_max_points), rng);
    std::vector<double> p2, y2;
    p2.reserve(keep.size());
    y2.reserve(keep.size());
    for (int i : keep) {
      p2.push_back(preds[static_cast<std::size_t>(i)]);
      y2.push_back(meas[static_cast<std::size_t>(i)]);
    }
    preds = std::move(p2);
    meas = std::move(y2);
  }

  const Kernel k = kernel ? *kernel : default_hyperparameters(preds, meas);
  m.error_model = fit_error_model(preds, meas, k);
  return m;
}

// --- persistence ------------------------------------------------------
//
// A model bundle is a directory holding forest.txt, gpr.txt and range.txt
// (`RANGE <min> <max>`).

inline void save_dds_model(const std::filesystem::path& dir, const DdsModel& m) {
  std::filesystem::create_directories(dir);
  save_forest((dir / "forest.txt").string(), m.forest);
  save_error_model((dir / "gpr.txt").string(), m.error_model);
  write_text_file((dir / "range.txt").string(),
                  "RANGE " + format_double(m.label_min) + " " + format_double(m.label_max) + "\n");
}

inline DdsModel load_dds_model(const std::filesystem::path& dir) {
  DdsModel m;
  m.forest = load_forest((dir / "forest.txt").string());
  m.error_model = load_error_model((dir / "gpr.txt").string());

  const std::string range_path = (dir / "range.txt").string();
  std::istringstream rs(read_text_file(range_path));
  std::string tag, lo_text, hi_text;
  if (!(rs >> tag >> lo_text >> hi_text) || tag != "RANGE" ||
      !parse_double(lo_text, m.label_min) || !parse_double(hi_text, m.label_max) ||
      !(m.label_min <= m.label_max))
    throw std::runtime_error(range_path + ": malformed range record");
  return m;
}

}  // namespace dds
