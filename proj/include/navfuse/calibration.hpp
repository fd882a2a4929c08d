// Temperature scaling for confidence calibration: fit a single temperature
// T > 0 minimizing negative log-likelihood on held-out (logits, label) pairs,
// then rescale softmax inputs by 1/T at inference time.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace navfuse {

struct CalibrationSample {
  std::vector<double> logits;
  int true_label = 0;
};

struct CalibrationModel {
  double temperature = 1.0;  // > 0
  bool fitted = false;
  double fit_nll_before = 0.0;  // NLL at T = 1 on the fit set
  double fit_nll_after = 0.0;   // NLL at the fitted T
};

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double max_l = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_l);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

inline std::vector<double> apply_temperature(const CalibrationModel& model,
                                             const std::vector<double>& logits) {
  if (!(model.temperature > 0.0)) {
    throw std::invalid_argument("apply_temperature: T must be > 0");
  }
  std::vector<double> scaled(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    scaled[i] = logits[i] / model.temperature;
  }
  return softmax(scaled);
}

inline double calibration_nll(const std::vector<CalibrationSample>& samples,
                              double temperature) {
  double nll = 0.0;
  CalibrationModel m;
  m.temperature = temperature;
  for (const auto& s : samples) {
    std::vector<double> p = apply_temperature(m, s.logits);
    nll -= std::log(std::max(p[static_cast<std::size_t>(s.true_label)], 1e-300));
  }
  return nll;
}

// Fits T on [0.05, 20] by a log-spaced coarse grid followed by golden-section
// refinement. T = 1 is always a candidate, so the fitted NLL never exceeds
// the uncalibrated one.
inline CalibrationModel fit_temperature(
    const std::vector<CalibrationSample>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("fit_temperature: empty fit set");
  }
  for (const auto& s : samples) {
    if (s.logits.empty() || s.true_label < 0 ||
        s.true_label >= static_cast<int>(s.logits.size())) {
      throw std::invalid_argument("fit_temperature: malformed sample");
    }
  }

  const double lo = 0.05, hi = 20.0;
  const int grid_n = 256;
  double best_t = 1.0;
  double best_nll = calibration_nll(samples, 1.0);
  for (int i = 0; i < grid_n; ++i) {
    double t = lo * std::pow(hi / lo, static_cast<double>(i) / (grid_n - 1));
    double nll = calibration_nll(samples, t);
    if (nll < best_nll) {
      best_nll = nll;
      best_t = t;
    }
  }

  // Golden-section refinement around the best grid point.
  double ratio = std::pow(hi / lo, 1.0 / (grid_n - 1));
  double a = std::max(lo, best_t / (ratio * ratio));
  double b = std::min(hi, best_t * ratio * ratio);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = calibration_nll(samples, x1);
  double f2 = calibration_nll(samples, x2);
  while (b - a > 1e-7) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = calibration_nll(samples, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = calibration_nll(samples, x2);
    }
  }
  double refined = 0.5 * (a + b);
  double refined_nll = calibration_nll(samples, refined);
  if (refined_nll < best_nll) {
    best_nll = refined_nll;
    best_t = refined;
  }

  CalibrationModel model;
  model.temperature = best_t;
  model.fitted = true;
  model.fit_nll_before = calibration_nll(samples, 1.0);
  model.fit_nll_after = best_nll;
  return model;
}

}  // namespace navfuse
