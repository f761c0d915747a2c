#pragma once

// Validation statistics: coefficient of determination, Pearson correlation,
// distribution summaries, wall-clock timing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace dds {

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0;
  double std_dev = 0;  // sample standard deviation, n-1 denominator
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
};

// 1 - SS_res / SS_tot; may be negative for models worse than the mean
// predictor.
inline double r_squared(std::span<const double> measured, std::span<const double> predicted) {
  if (measured.size() != predicted.size())
    throw std::invalid_argument("r_squared: length mismatch");
  if (measured.size() < 2) throw std::invalid_argument("r_squared: need at least two values");
  double mean = 0;
  for (double y : measured) mean += y;
  mean /= static_cast<double>(measured.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double r = predicted[i] - measured[i];
    const double t = mean - measured[i];
    ss_res += r * r;
    ss_tot += t * t;
  }
  if (ss_tot == 0) throw std::domain_error("r_squared: undefined for constant measurements");
  return 1.0 - ss_res / ss_tot;
}

inline double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson_r: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("pearson_r: need at least two values");
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0 || sbb == 0) throw std::domain_error("pearson_r: undefined for zero variance");
  return sab / std::sqrt(saa * sbb);
}

// Linear interpolation between order statistics at position (n-1)*q.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 < sorted.size()) return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  return sorted[lo];
}

inline SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());

  SummaryStats out;
  out.n = s.size();
  double sum = 0;
  for (double v : s) sum += v;
  out.mean = sum / static_cast<double>(s.size());
  double ss = 0;
  for (double v : s) ss += (v - out.mean) * (v - out.mean);
  out.std_dev = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
  out.min = s.front();
  out.q1 = quantile_sorted(s, 0.25);
  out.median = quantile_sorted(s, 0.5);
  out.q3 = quantile_sorted(s, 0.75);
  out.max = s.back();
  return out;
}

// Runs op and reports wall-clock seconds on a monotonic clock. Returns
// (result, seconds), or just seconds for void operations.
template <class F>
auto timed(F&& op) {
  using R = std::invoke_result_t<F&>;
  const auto t0 = std::chrono::steady_clock::now();
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(op)();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    R result = std::forward<F>(op)();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::pair<R, double>(std::move(result), seconds);
  }
}

}  // namespace dds
