#pragma once

// Opportunistic transmission replay: the probabilistic channel-aware
// transmission process (CAT / ML-CAT) and a fixed-interval periodic baseline,
// run tick by tick over a measured trace against a DdsModel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dds/csv.hpp"
#include "dds/metrics.hpp"
#include "dds/model.hpp"

namespace dds {

enum class Metric { sinr, rf_prediction, periodic };

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::sinr: return "sinr";
    case Metric::rf_prediction: return "rf_prediction";
    case Metric::periodic: return "periodic";
  }
  return "?";
}

inline std::optional<Metric> metric_from_name(std::string_view s) {
  if (s == "sinr") return Metric::sinr;
  if (s == "rf_prediction") return Metric::rf_prediction;
  if (s == "periodic") return Metric::periodic;
  return std::nullopt;
}

struct CatConfig {
  double t_min = 10.0;   // s; guarantees a minimum payload size
  double t_max = 120.0;  // s; upper bound for the buffering delay
  double alpha = 6.0;    // exponent emphasizing high metric values
  double phi_min = 0.0;  // metric normalization bounds
  double phi_max = 30.0;
  Metric metric = Metric::sinr;
  std::uint64_t source_rate = 50000;  // bytes/s
  double tick = 1.0;                  // s, evaluation interval
  double periodic_interval = 10.0;    // s, baseline transmit interval
  std::uint64_t seed = 0;
};

inline void validate(const CatConfig& cfg) {
  if (!(cfg.t_min >= 0) || !(cfg.t_min < cfg.t_max))
    throw std::invalid_argument("cat config: need 0 <= t_min < t_max");
  if (!(cfg.alpha > 0)) throw std::invalid_argument("cat config: alpha must be > 0");
  if (!(cfg.phi_min < cfg.phi_max))
    throw std::invalid_argument("cat config: need phi_min < phi_max");
  if (cfg.source_rate == 0) throw std::invalid_argument("cat config: source_rate must be > 0");
  if (!(cfg.tick > 0)) throw std::invalid_argument("cat config: tick must be > 0");
  if (!(cfg.periodic_interval > 0))
    throw std::invalid_argument("cat config: periodic_interval must be > 0");
}

struct BufferState {
  std::uint64_t bytes = 0;
  double last_tx_time = 0;
};

struct TransmissionEvent {
  double time = 0;            // s
  std::uint64_t payload = 0;  // bytes
  double datarate = 0;        // MBit/s, sampled outcome
  double buffer_delay = 0;    // s, age of the oldest buffered byte
  double metric = 0;          // metric value at the decision tick
};

struct RunResult {
  std::string label;
  std::vector<TransmissionEvent> events;
  SummaryStats summary;           // of event data rates; n = 0 when no events
  std::uint64_t total_sent = 0;   // bytes
  std::uint64_t final_buffer = 0; // bytes left at trace end
};

// Transmission probability: 0 below t_min, 1 above t_max, otherwise the
// normalized metric raised to alpha. Phi outside [phi_min, phi_max] is
// clamped before normalization; dt exactly at the bounds takes the power
// branch.
inline double transmission_probability(double phi, double dt, const CatConfig& cfg) {
  if (dt < cfg.t_min) return 0.0;
  if (dt > cfg.t_max) return 1.0;
  const double clamped = std::clamp(phi, cfg.phi_min, cfg.phi_max);
  const double base = (clamped - cfg.phi_min) / (cfg.phi_max - cfg.phi_min);
  return std::pow(base, cfg.alpha);
}

// Metric at a tick. The data-rate prediction metric evaluates the
// deterministic model on the current features with the payload replaced by
// the bytes waiting in the buffer.
inline double metric_value(Metric metric, const FeatureVector& x, const BufferState& buffer,
                           const DdsModel* model) {
  switch (metric) {
    case Metric::sinr:
      return x.sinr;
    case Metric::rf_prediction: {
      if (!model)
        throw std::invalid_argument("metric_value: rf_prediction metric requires a model");
      FeatureVector q = x;
      q.payload = static_cast<double>(buffer.bytes);
      return dds_predict_mean(*model, q);
    }
    case Metric::periodic:
      return 0.0;
  }
  return 0.0;
}

// Replays the trace tick by tick: fill the buffer, evaluate the metric,
// decide, and on transmission emit the whole buffer with a sampled data
// rate. last_tx_time starts one tick before the trace so the first interval
// is counted; all byte arithmetic is exact integers.
inline RunResult run_scheme(const Trace& trace, const CatConfig& cfg, const DdsModel& model) {
  validate(cfg);
  if (trace.ticks.empty()) throw std::invalid_argument("run_scheme: empty trace");
  const auto tick_bytes =
      static_cast<std::uint64_t>(std::llround(static_cast<double>(cfg.source_rate) * cfg.tick));
  if (tick_bytes == 0) throw std::invalid_argument("run_scheme: source_rate * tick below one byte");

  Rng rng(cfg.seed);
  BufferState buffer;
  buffer.last_tx_time = trace.ticks.front().first - cfg.tick;

  RunResult out;
  out.label = metric_name(cfg.metric);
  for (const auto& [now, x] : trace.ticks) {
    buffer.bytes += tick_bytes;
    const double dt = now - buffer.last_tx_time;
    const double phi = metric_value(cfg.metric, x, buffer, &model);

    bool transmit;
    if (cfg.metric == Metric::periodic) {
      transmit = dt >= cfg.periodic_interval;
    } else {
      transmit = rng.uniform01() < transmission_probability(phi, dt, cfg);
    }
    if (!transmit) continue;

    FeatureVector q = x;
    q.payload = static_cast<double>(buffer.bytes);
    TransmissionEvent ev;
    ev.time = now;
    ev.payload = buffer.bytes;
    ev.datarate = dds_predict(model, q, rng);
    ev.buffer_delay = dt;
    ev.metric = phi;
    out.events.push_back(ev);
    out.total_sent += buffer.bytes;
    buffer.bytes = 0;
    buffer.last_tx_time = now;
  }
  out.final_buffer = buffer.bytes;
  if (!out.events.empty()) {
    std::vector<double> rates;
    rates.reserve(out.events.size());
    for (const auto& ev : out.events) rates.push_back(ev.datarate);
    out.summary = summarize(rates);
  }
  return out;
}

struct ComparisonRow {
  std::string label;
  std::size_t n_events = 0;
  double mean_rate = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double mean_delay = 0;
  double uplift_pct = 0;  // of mean data rate vs. the baseline run
};

namespace detail {

inline ComparisonRow make_comparison_row(const RunResult& run, double baseline_mean) {
  ComparisonRow row;
  row.label = run.label;
  row.n_events = run.events.size();
  row.mean_rate = run.summary.mean;
  row.q1 = run.summary.q1;
  row.median = run.summary.median;
  row.q3 = run.summary.q3;
  double delay = 0;
  for (const auto& ev : run.events) delay += ev.buffer_delay;
  row.mean_delay = delay / static_cast<double>(run.events.size());
  row.uplift_pct = (run.summary.mean / baseline_mean - 1.0) * 100.0;
  return row;
}

}  // namespace detail

inline std::vector<ComparisonRow> compare_runs(std::span<const RunResult> runs,
                                               std::string_view baseline) {
  if (runs.size() < 2) throw std::invalid_argument("compare_runs: need at least two runs");
  const RunResult* base = nullptr;
  for (const auto& r : runs)
    if (r.label == baseline) base = &r;
  if (!base)
    throw std::invalid_argument("compare_runs: baseline label missing: " + std::string(baseline));
  for (const auto& r : runs)
    if (r.events.empty())
      throw std::invalid_argument("compare_runs: no events in run '" + r.label + "'");

  std::vector<ComparisonRow> rows;
  rows.reserve(runs.size());
  for (const auto& r : runs) rows.push_back(detail::make_comparison_row(r, base->summary.mean));
  return rows;
}

// --- run output CSVs ----------------------------------------------------

inline constexpr const char* kEventsHeader = "time,payload,datarate,buffer_delay,metric";
inline constexpr const char* kSummaryHeader =
    "label,n_events,mean_rate,q1,median,q3,mean_delay,uplift_pct";

inline void write_events_csv(const std::string& path, const RunResult& run) {
  std::string out = std::string(kEventsHeader) + "\n";
  for (const auto& ev : run.events) {
    out += format_double(ev.time) + "," + format_u64(ev.payload) + "," +
           format_double(ev.datarate) + "," + format_double(ev.buffer_delay) + "," +
           format_double(ev.metric) + "\n";
  }
  write_text_file(path, out);
}

inline void write_summary_csv(const std::string& path, std::span<const ComparisonRow> rows) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& r : rows) {
    out += r.label + "," + std::to_string(r.n_events) + "," + format_double(r.mean_rate) + "," +
           format_double(r.q1) + "," + format_double(r.median) + "," + format_double(r.q3) + "," +
           format_double(r.mean_delay) + "," + format_double(r.uplift_pct) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace dds
