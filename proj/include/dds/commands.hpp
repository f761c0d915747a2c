#pragma once

// Command entry points behind the CLI: train, validate, simulate, export.
// Reports go to a caller-supplied stream; every artifact written to disk is
// a deterministic function of (inputs, config, seed). Wall-clock timings are
// printed but never written into output files.

#include <algorithm>
#include <array>
#include <limits>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dds/cat.hpp"
#include "dds/codegen.hpp"
#include "dds/config.hpp"
#include "dds/metrics.hpp"
#include "dds/model.hpp"
#include "dds/synthetic.hpp"
#include "dds/trace.hpp"

namespace dds {

struct TrainReport {
  std::size_t records = 0;
  double cv_r2 = 0;  // NaN when the dataset is too small for 10-fold CV
  std::size_t leaf_count = 0;
  std::array<double, kFeatureCount> importance{};
  double train_seconds = 0;
};

struct ValidateReport {
  SummaryStats measured, rf, gpr_raw, dds;
  std::size_t gpr_raw_out_of_range = 0;
  std::size_t dds_out_of_range = 0;
  double quantile_r = 0;
};

struct SimulateReport {
  std::vector<RunResult> runs;
  std::vector<ComparisonRow> rows;
  std::vector<double> run_seconds;
  std::vector<std::string> event_files;
  std::string summary_file;
};

struct ExportReport {
  std::size_t functions = 0;
  std::size_t verified = 0;
  std::size_t bytes = 0;
};

namespace detail {

inline void print_stats(std::ostream& os, const std::string& label, const SummaryStats& s) {
  os << "column." << label << ": n=" << s.n << " mean=" << format_double(s.mean)
     << " std=" << format_double(s.std_dev) << " min=" << format_double(s.min)
     << " q1=" << format_double(s.q1) << " median=" << format_double(s.median)
     << " q3=" << format_double(s.q3) << " max=" << format_double(s.max) << "\n";
}

}  // namespace detail

// Trains on a dataset, reports 10-fold CV R^2, feature importances, leaf
// count and training time, and writes the model bundle to out_dir.
inline TrainReport cmd_train(const std::string& dataset_path, const RunConfig& cfg,
                             const std::string& out_dir, std::ostream& report) {
  const Dataset ds = load_dataset(dataset_path);
  if (ds.empty()) throw std::runtime_error(dataset_path + ": no records");

  TrainReport tr;
  tr.records = ds.size();

  ForestConfig fcfg = cfg.forest;
  fcfg.seed = derive_seed(cfg.seed, seed_stream::forest);

  // pooled out-of-fold R^2 over a deterministic 10-fold split
  tr.cv_r2 = std::numeric_limits<double>::quiet_NaN();
  if (ds.size() >= 10) {
    const std::uint64_t cv_seed = derive_seed(cfg.seed, seed_stream::folds);
    const auto folds = split_folds(ds, 10, cv_seed);
    std::vector<double> measured, predicted;
    measured.reserve(ds.size());
    predicted.reserve(ds.size());
    for (std::size_t i = 0; i < folds.size(); ++i) {
      ForestConfig fold_cfg = fcfg;
      fold_cfg.seed = derive_seed(cv_seed, i + 1);
      const RandomForest fold_forest = train_forest(folds[i].first, fold_cfg);
      for (const auto& rec : folds[i].second.records) {
        measured.push_back(rec.datarate);
        predicted.push_back(predict(fold_forest, rec.features));
      }
    }
    tr.cv_r2 = r_squared(measured, predicted);
  }

  auto [model, seconds] =
      timed([&] { return build_dds(ds, fcfg, cfg.kernel, cfg.build); });
  tr.train_seconds = seconds;
  tr.leaf_count = leaf_count(model.forest);
  tr.importance = feature_importance(model.forest);
  save_dds_model(out_dir, model);

  report << "records=" << tr.records << "\n";
  report << "cv_r2=" << format_double(tr.cv_r2) << "\n";
  report << "leaf_count=" << tr.leaf_count << "\n";
  const auto names = FeatureVector::names();
  for (int f = 0; f < kFeatureCount; ++f)
    report << "importance." << names[static_cast<std::size_t>(f)] << "="
           << format_double(tr.importance[static_cast<std::size_t>(f)]) << "\n";
  report << "train_seconds=" << format_double(tr.train_seconds) << "\n";
  report << "model_dir=" << out_dir << "\n";
  return tr;
}

// Resamples every record of a dataset through the model and writes the
// four-way distribution comparison (measured / forest-only / raw error-model
// sample / shaped sample) plus the sorted-quantile correlation.
inline ValidateReport cmd_validate(const std::string& model_dir, const std::string& dataset_path,
                                   const RunConfig& cfg, const std::string& out_csv,
                                   std::ostream& report) {
  const DdsModel model = load_dds_model(model_dir);
  const Dataset ds = load_dataset(dataset_path);
  if (ds.empty()) throw std::runtime_error(dataset_path + ": no records");

  Rng rng(derive_seed(cfg.seed, seed_stream::validate));
  const int repeats = cfg.validate_repeats;
  const std::size_t total = ds.size() * static_cast<std::size_t>(repeats);

  std::vector<double> measured, rf, gpr_raw, shaped;
  measured.reserve(total);
  rf.reserve(total);
  gpr_raw.reserve(total);
  shaped.reserve(total);

  ValidateReport vr;
  for (const auto& rec : ds.records) {
    const double pred = predict(model.forest, rec.features);
    const Posterior post = posterior(model.error_model, pred);
    const double sigma = std::sqrt(post.variance);
    for (int r = 0; r < repeats; ++r) {
      const double raw = post.mean + sigma * rng.normal01();
      const double dds_sample = shape_to_range(post.mean + sigma * rng.normal01(), model);
      measured.push_back(rec.datarate);
      rf.push_back(pred);
      gpr_raw.push_back(raw);
      shaped.push_back(dds_sample);
      if (raw < model.label_min || raw > model.label_max) ++vr.gpr_raw_out_of_range;
      if (dds_sample < model.label_min || dds_sample > model.label_max) ++vr.dds_out_of_range;
    }
  }

  std::string csv = "measured,rf,gpr_raw,dds\n";
  for (std::size_t i = 0; i < measured.size(); ++i)
    csv += format_double(measured[i]) + "," + format_double(rf[i]) + "," +
           format_double(gpr_raw[i]) + "," + format_double(shaped[i]) + "\n";
  write_text_file(out_csv, csv);

  vr.measured = summarize(measured);
  vr.rf = summarize(rf);
  vr.gpr_raw = summarize(gpr_raw);
  vr.dds = summarize(shaped);

  std::vector<double> sorted_measured = measured, sorted_dds = shaped;
  std::sort(sorted_measured.begin(), sorted_measured.end());
  std::sort(sorted_dds.begin(), sorted_dds.end());
  vr.quantile_r = pearson_r(sorted_measured, sorted_dds);

  detail::print_stats(report, "measured", vr.measured);
  detail::print_stats(report, "rf", vr.rf);
  detail::print_stats(report, "gpr_raw", vr.gpr_raw);
  detail::print_stats(report, "dds", vr.dds);
  report << "out_of_range.gpr_raw=" << vr.gpr_raw_out_of_range << "\n";
  report << "out_of_range.dds=" << vr.dds_out_of_range << "\n";
  report << "repeats=" << repeats << "\n";
  report << "quantile_r=" << format_double(vr.quantile_r) << "\n";
  report << "report_csv=" << out_csv << "\n";
  return vr;
}

// Replays the trace under every configured scheme, writing one events CSV
// per run and a summary CSV with uplift against the periodic baseline (or
// the first run when periodic is not among the schemes).
inline SimulateReport cmd_simulate(const std::string& model_dir, const std::string& trace_path,
                                   const RunConfig& cfg, const std::string& out_prefix,
                                   std::ostream& report) {
  const DdsModel model = load_dds_model(model_dir);
  const Trace trace = load_trace(trace_path);
  if (trace.ticks.empty()) throw std::runtime_error(trace_path + ": no ticks");
  if (cfg.schemes.empty()) throw std::invalid_argument("simulate: no schemes configured");

  SimulateReport sr;
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
    CatConfig run_cfg = cfg.cat;
    run_cfg.metric = cfg.schemes[i];
    run_cfg.seed = derive_seed(cfg.seed, seed_stream::simulation + i);
    auto [run, seconds] = timed([&] { return run_scheme(trace, run_cfg, model); });
    sr.run_seconds.push_back(seconds);
    sr.runs.push_back(std::move(run));
  }

  std::string baseline = sr.runs.front().label;
  for (const auto& r : sr.runs)
    if (r.label == metric_name(Metric::periodic)) baseline = r.label;

  for (const auto& r : sr.runs) {
    if (r.events.empty())
      throw std::runtime_error("simulate: no events in run '" + r.label + "'");
    const std::string path = out_prefix + "_" + r.label + "_events.csv";
    write_events_csv(path, r);
    sr.event_files.push_back(path);
  }

  const double baseline_mean = [&] {
    for (const auto& r : sr.runs)
      if (r.label == baseline) return r.summary.mean;
    return sr.runs.front().summary.mean;
  }();
  for (const auto& r : sr.runs) sr.rows.push_back(detail::make_comparison_row(r, baseline_mean));
  sr.summary_file = out_prefix + "_summary.csv";
  write_summary_csv(sr.summary_file, sr.rows);

  for (std::size_t i = 0; i < sr.runs.size(); ++i) {
    report << "run." << sr.runs[i].label << ": events=" << sr.runs[i].events.size()
           << " mean_rate=" << format_double(sr.rows[i].mean_rate)
           << " uplift_pct=" << format_double(sr.rows[i].uplift_pct)
           << " run_seconds=" << format_double(sr.run_seconds[i]) << "\n";
    report << "events_csv=" << sr.event_files[i] << "\n";
  }
  report << "baseline=" << baseline << "\n";
  report << "summary_csv=" << sr.summary_file << "\n";
  return sr;
}

// Exports the forest as nested-conditional source text and verifies the text
// against the in-memory model on 1000 random inputs before writing it.
inline ExportReport cmd_export(const std::string& model_dir, const RunConfig& cfg,
                               const std::string& out_path, std::ostream& report) {
  const DdsModel model = load_dds_model(model_dir);
  const std::string src = export_code(model.forest);

  constexpr std::size_t kChecks = 1000;
  const CompiledCode compiled(src);
  Rng rng(derive_seed(cfg.seed, seed_stream::export_check));
  for (std::size_t i = 0; i < kChecks; ++i) {
    const FeatureVector x = random_feature_vector(rng);
    const double in_memory = predict(model.forest, x);
    const double exported = compiled.eval(x);
    if (in_memory != exported)
      throw std::logic_error("export: round-trip mismatch at check " + std::to_string(i + 1));
  }

  write_text_file(out_path, src);
  ExportReport er;
  er.functions = model.forest.trees.size() + 1;
  er.verified = kChecks;
  er.bytes = src.size();
  report << "functions=" << er.functions << "\n";
  report << "verified=" << er.verified << "\n";
  report << "bytes=" << er.bytes << "\n";
  report << "export_file=" << out_path << "\n";
  return er;
}

}  // namespace dds
