#pragma once

// Synthetic benchmark data: a smooth data-rate surface over SINR, RSRP and
// payload size with heteroscedastic gaussian noise, plus an oscillating
// channel trace for scheme replay. Used by the desk-scale validation
// workflow and the test suite; real studies load measured CSVs instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "dds/random.hpp"
#include "dds/trace.hpp"

namespace dds {

// Ground-truth conditional mean data rate, MBit/s.
inline double benchmark_mean_rate(double sinr, double rsrp, double payload) {
  const double s = 1.0 / (1.0 + std::exp(-0.28 * (sinr - 9.0)));
  const double r = 1.0 / (1.0 + std::exp(-0.15 * (rsrp + 95.0)));
  const double p = 1.0 - std::exp(-payload / 3.0e5);
  return 28.0 * s * (0.55 + 0.45 * r) * (0.7 + 0.3 * p);
}

// Noise grows with the conditional mean.
inline double benchmark_noise_sigma(double mean_rate) { return 0.4 + 0.09 * mean_rate; }

namespace detail {

inline FeatureVector derived_features(double sinr, double rsrp, double payload, Rng& rng) {
  FeatureVector x;
  x.payload = payload;
  x.rsrp = rsrp;
  x.rsrq = std::clamp(-19.0 + 0.3 * sinr + rng.normal01(), -25.0, -3.0);
  x.sinr = sinr;
  x.cqi = std::clamp(std::round(1.0 + 0.6 * (sinr + 5.0) + 1.2 * rng.normal01()), 0.0, 30.0);
  x.asu = std::clamp(std::round(rsrp + 140.0), 0.0, 97.0);
  x.ta = std::floor(rng.uniform(0.0, 64.0));
  x.freq = rng.uniform01() < 0.5 ? 1800.0 : 2600.0;
  x.cellid = 1001.0 + std::floor(rng.uniform(0.0, 8.0));
  x.velocity = rng.uniform(0.0, 120.0);
  return x;
}

}  // namespace detail

inline Dataset make_benchmark_dataset(std::size_t n_samples, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.records.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double sinr = rng.uniform(-5.0, 30.0);
    const double rsrp = rng.uniform(-115.0, -75.0);
    const double payload = std::exp(rng.uniform(std::log(5.0e4), std::log(1.0e6)));
    TransmissionRecord rec;
    rec.features = detail::derived_features(sinr, rsrp, payload, rng);
    const double mean = benchmark_mean_rate(sinr, rsrp, payload);
    rec.datarate = std::max(0.0, mean + benchmark_noise_sigma(mean) * rng.normal01());
    ds.add(rec);
  }
  return ds;
}

// 1 Hz trace whose channel quality oscillates slowly (period 90 s) with
// mild measurement noise; payload column is a placeholder, replay replaces
// it by the buffer level.
inline Trace make_oscillating_trace(std::size_t n_ticks, std::uint64_t seed) {
  Rng rng(seed);
  Trace trace;
  trace.ticks.reserve(n_ticks);
  for (std::size_t i = 0; i < n_ticks; ++i) {
    const double t = static_cast<double>(i);
    const double phase = 2.0 * std::numbers::pi * t / 90.0;
    const double sinr = std::clamp(12.5 + 15.0 * std::sin(phase) + 1.5 * rng.normal01(), -5.0, 30.0);
    const double rsrp =
        std::clamp(-95.0 + 14.0 * std::sin(phase + 0.7) + 2.0 * rng.normal01(), -115.0, -75.0);
    FeatureVector x = detail::derived_features(sinr, rsrp, 50000.0, rng);
    x.velocity = 60.0 + 20.0 * std::sin(2.0 * std::numbers::pi * t / 300.0);
    trace.ticks.emplace_back(t, x);
  }
  return trace;
}

// Random feature vector over plausible indicator ranges; used for export
// verification and property tests.
inline FeatureVector random_feature_vector(Rng& rng) {
  FeatureVector x;
  x.payload = rng.uniform(1.0, 1.0e6);
  x.rsrp = rng.uniform(-140.0, -40.0);
  x.rsrq = rng.uniform(-25.0, 0.0);
  x.sinr = rng.uniform(-10.0, 40.0);
  x.cqi = std::floor(rng.uniform(0.0, 31.0));
  x.asu = std::floor(rng.uniform(0.0, 98.0));
  x.ta = std::floor(rng.uniform(0.0, 1283.0));
  x.freq = rng.uniform(700.0, 3800.0);
  x.cellid = std::floor(rng.uniform(0.0, 1.0e7));
  x.velocity = rng.uniform(0.0, 250.0);
  return x;
}

}  // namespace dds
