#pragma once

// One-dimensional Gaussian-process regression over (predicted, measured)
// value pairs. Squared-exponential covariance plus white observation noise,
// constant prior mean at the target average, Cholesky-factored solve state.
// The predictive variance includes the observation noise: the sampler must
// reproduce measurement scatter, not only latent-function uncertainty.

#include <cmath>
#include <limits>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dds/csv.hpp"
#include "dds/random.hpp"

namespace dds {

struct Kernel {
  double signal_variance = 1.0;  // (MBit/s)^2
  double length_scale = 1.0;     // MBit/s
  double noise_variance = 1e-6;  // (MBit/s)^2
};

inline void validate(const Kernel& k) {
  if (!(k.signal_variance > 0) || !std::isfinite(k.signal_variance))
    throw std::invalid_argument("kernel: signal_variance must be > 0");
  if (!(k.length_scale > 0) || !std::isfinite(k.length_scale))
    throw std::invalid_argument("kernel: length_scale must be > 0");
  if (!(k.noise_variance > 0) || !std::isfinite(k.noise_variance))
    throw std::invalid_argument("kernel: noise_variance must be > 0");
}

inline double se_covariance(const Kernel& k, double a, double b) {
  const double d = a - b;
  return k.signal_variance * std::exp(-(d * d) / (2.0 * k.length_scale * k.length_scale));
}

namespace detail {

// In-place lower Cholesky of a row-major symmetric matrix; false when a
// pivot is not strictly positive.
inline bool cholesky_factor(std::vector<double>& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ri = a.data() + i * n;
    for (std::size_t j = 0; j < i; ++j) {
      const double* rj = a.data() + j * n;
      double s = ri[j];
      for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
      ri[j] = s / rj[j];
    }
    double s = ri[i];
    for (std::size_t k = 0; k < i; ++k) s -= ri[k] * ri[k];
    if (!(s > 0) || !std::isfinite(s)) return false;
    ri[i] = std::sqrt(s);
  }
  return true;
}

inline void forward_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    const double* ri = l.data() + i * n;
    for (std::size_t k = 0; k < i; ++k) s -= ri[k] * b[k];
    b[i] = s / ri[i];
  }
}

inline void backward_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b) {
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
    b[i] = s / l[i * n + i];
  }
}

}  // namespace detail

class ErrorModel {
 public:
  ErrorModel() = default;

  const std::vector<double>& inputs() const { return inputs_; }
  const std::vector<double>& targets() const { return targets_; }
  const Kernel& kernel() const { return kernel_; }
  double prior_mean() const { return prior_mean_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return inputs_.size(); }
  bool fitted() const { return !inputs_.empty(); }

 private:
  friend ErrorModel fit_error_model(std::span<const double>, std::span<const double>,
                                    const Kernel&, std::optional<double>);
  friend struct PosteriorAccess;

  std::vector<double> inputs_;   // predicted values
  std::vector<double> targets_;  // measured values
  Kernel kernel_;
  double prior_mean_ = 0;
  double jitter_ = 0;                // diagonal jitter actually used
  std::vector<double> cholesky_;     // lower factor of K + (noise + jitter) I
  std::vector<double> alpha_;        // (K + (noise + jitter) I)^{-1} (targets - prior_mean)
};

struct PosteriorAccess {
  static const std::vector<double>& cholesky(const ErrorModel& m) { return m.cholesky_; }
  static const std::vector<double>& alpha(const ErrorModel& m) { return m.alpha_; }
};

// Fits the model: builds K + noise_variance I (+ jitter 1e-9 signal_variance,
// escalated x10 up to three times on factorization failure) and stores its
// Cholesky factor for reuse.
inline ErrorModel fit_error_model(std::span<const double> predictions,
                                  std::span<const double> measurements, const Kernel& kernel,
                                  std::optional<double> prior_mean = std::nullopt) {
  if (predictions.size() != measurements.size())
    throw std::invalid_argument("fit_error_model: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("fit_error_model: empty input");
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (!std::isfinite(predictions[i]) || !std::isfinite(measurements[i]))
      throw std::invalid_argument("fit_error_model: non-finite input");
  validate(kernel);

  ErrorModel m;
  m.inputs_.assign(predictions.begin(), predictions.end());
  m.targets_.assign(measurements.begin(), measurements.end());
  m.kernel_ = kernel;
  if (prior_mean) {
    m.prior_mean_ = *prior_mean;
  } else {
    double sum = 0;
    for (double y : m.targets_) sum += y;
    m.prior_mean_ = sum / static_cast<double>(m.targets_.size());
  }

  const std::size_t n = m.inputs_.size();
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = se_covariance(kernel, m.inputs_[i], m.inputs_[j]);
      gram[i * n + j] = v;
      gram[j * n + i] = v;
    }

  double jitter = 1e-9 * kernel.signal_variance;
  for (int attempt = 0;; ++attempt) {
    m.cholesky_ = gram;
    for (std::size_t i = 0; i < n; ++i) m.cholesky_[i * n + i] += kernel.noise_variance + jitter;
    if (detail::cholesky_factor(m.cholesky_, n)) break;
    if (attempt >= 3)
      throw std::runtime_error("fit_error_model: factorization failed after jitter escalation");
    jitter *= 10;
  }
  m.jitter_ = jitter;

  m.alpha_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.alpha_[i] = m.targets_[i] - m.prior_mean_;
  detail::forward_solve(m.cholesky_, n, m.alpha_);
  detail::backward_solve(m.cholesky_, n, m.alpha_);
  return m;
}

struct Posterior {
  double mean = 0;
  double variance = 0;  // predictive, observation noise included
};

inline Posterior posterior(const ErrorModel& m, double y_pred) {
  if (!m.fitted()) throw std::logic_error("posterior: model not fitted");
  const std::size_t n = m.size();
  std::vector<double> kstar(n);
  for (std::size_t i = 0; i < n; ++i) kstar[i] = se_covariance(m.kernel(), y_pred, m.inputs()[i]);

  double mean = m.prior_mean();
  for (std::size_t i = 0; i < n; ++i) mean += kstar[i] * PosteriorAccess::alpha(m)[i];

  detail::forward_solve(PosteriorAccess::cholesky(m), n, kstar);
  double quad = 0;
  for (double z : kstar) quad += z * z;
  double variance = m.kernel().signal_variance + m.kernel().noise_variance - quad;
  if (!(variance > 0)) variance = std::numeric_limits<double>::min();
  return {mean, variance};
}

// mean +/- z * sqrt(variance)
inline std::pair<double, double> confidence_interval(const ErrorModel& m, double y_pred,
                                                     double z) {
  if (!(z >= 0)) throw std::invalid_argument("confidence_interval: z must be >= 0");
  const Posterior p = posterior(m, y_pred);
  const double half = z * std::sqrt(p.variance);
  return {p.mean - half, p.mean + half};
}

// One draw from N(posterior mean, predictive variance).
inline double sample_posterior(const ErrorModel& m, double y_pred, Rng& rng) {
  const Posterior p = posterior(m, y_pred);
  return p.mean + std::sqrt(p.variance) * rng.normal01();
}

// Heuristic hyperparameters; the pipeline stays deterministic and fast,
// no marginal-likelihood optimization.
inline Kernel default_hyperparameters(std::span<const double> predictions,
                                      std::span<const double> measurements) {
  if (predictions.size() != measurements.size())
    throw std::invalid_argument("default_hyperparameters: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("default_hyperparameters: empty input");

  double mean_y = 0;
  for (double y : measurements) mean_y += y;
  mean_y /= static_cast<double>(measurements.size());
  double var_y = 0;
  for (double y : measurements) var_y += (y - mean_y) * (y - mean_y);
  var_y /= static_cast<double>(measurements.size());

  double lo = predictions[0], hi = predictions[0];
  for (double p : predictions) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  double mse = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = measurements[i] - predictions[i];
    mse += e * e;
  }
  mse /= static_cast<double>(predictions.size());

  Kernel k;
  k.signal_variance = std::max(var_y, 1e-6);
  k.length_scale = std::max((hi - lo) / 10.0, 1e-3);
  k.noise_variance = std::max(mse, 1e-6);
  return k;
}

// --- persistence ------------------------------------------------------
//
//   GPR <n> <signal_variance> <length_scale> <noise_variance> <prior_mean>
// followed by n lines `<input> <target>`. The factorization is refit on load.

inline std::string serialize_error_model(const ErrorModel& m) {
  std::string out = "GPR " + std::to_string(m.size()) + " " +
                    format_double(m.kernel().signal_variance) + " " +
                    format_double(m.kernel().length_scale) + " " +
                    format_double(m.kernel().noise_variance) + " " +
                    format_double(m.prior_mean()) + "\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    out += format_double(m.inputs()[i]) + " " + format_double(m.targets()[i]) + "\n";
  return out;
}

inline void save_error_model(const std::string& path, const ErrorModel& m) {
  write_text_file(path, serialize_error_model(m));
}

inline ErrorModel load_error_model(std::istream& in, const std::string& ctx) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(ctx + ": empty model file");
  std::istringstream hs(line);
  std::string tag, sv_text, ls_text, nv_text, m0_text;
  std::size_t n = 0;
  if (!(hs >> tag >> n >> sv_text >> ls_text >> nv_text >> m0_text) || tag != "GPR" || n == 0)
    throw std::runtime_error(ctx + ": malformed header '" + line + "'");
  Kernel k;
  double m0 = 0;
  if (!parse_double(sv_text, k.signal_variance) || !parse_double(ls_text, k.length_scale) ||
      !parse_double(nv_text, k.noise_variance) || !parse_double(m0_text, m0))
    throw std::runtime_error(ctx + ": malformed header numbers");
  std::vector<double> inputs(n), targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error(ctx + ": truncated pair list");
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a >> b) || !parse_double(a, inputs[i]) || !parse_double(b, targets[i]))
      throw std::runtime_error(ctx + ": malformed pair, line " + std::to_string(i + 2));
  }
  return fit_error_model(inputs, targets, k, m0);
}

inline ErrorModel load_error_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return load_error_model(in, path);
}

}  // namespace dds
