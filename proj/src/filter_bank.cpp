#include "neurojscc/filter_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neurojscc/errors.hpp"

namespace neurojscc {

namespace {

void check_shape(int num_filters, int window) {
  if (num_filters < 1) throw ConfigError("filter bank: K must be >= 1");
  if (window < 1) throw ConfigError("filter bank: W must be >= 1");
}

}  // namespace

FilterBank FilterBank::raised_cosine(int num_filters, int window, double log_offset) {
  check_shape(num_filters, window);
  const double pi = std::numbers::pi;
  const double lo = std::log(1.0 + log_offset);
  const double hi = std::log(static_cast<double>(window) + log_offset);

  // peak centers in log-lag space; spacing degenerates for K=1 or W=1
  std::vector<double> centers(num_filters);
  double spacing;
  if (num_filters == 1) {
    centers[0] = lo;
    spacing = (hi > lo) ? (hi - lo) : 1.0;
  } else {
    spacing = (hi - lo) / (num_filters - 1);
    if (spacing <= 0.0) spacing = 1.0;
    for (int k = 0; k < num_filters; ++k) centers[k] = lo + k * spacing;
  }

  FilterBank bank;
  bank.synaptic.assign(num_filters, std::vector<double>(window, 0.0));
  for (int k = 0; k < num_filters; ++k) {
    double peak = 0.0;
    for (int i = 0; i < window; ++i) {
      const double delta = static_cast<double>(i + 1);
      const double arg =
          std::clamp(pi * (std::log(delta + log_offset) - centers[k]) / spacing, -pi, pi);
      bank.synaptic[k][i] = 0.5 * std::cos(arg) + 0.5;
      peak = std::max(peak, bank.synaptic[k][i]);
    }
    if (peak > 0.0) {
      for (auto& v : bank.synaptic[k]) v /= peak;
    } else {
      // dense K relative to W can clamp every lag to zero; pin the peak at
      // the lag nearest this filter's center so amplitude 1 is kept
      const int idx = std::clamp(
          static_cast<int>(std::lround(std::exp(centers[k]) - log_offset)), 1, window);
      bank.synaptic[k][idx - 1] = 1.0;
    }
  }

  bank.feedback.resize(window);
  for (int i = 0; i < window; ++i) bank.feedback[i] = -bank.synaptic[0][i];
  return bank;
}

FilterBank FilterBank::exponential(int num_filters, int window, std::span<const double> betas) {
  check_shape(num_filters, window);
  std::vector<double> decay(betas.begin(), betas.end());
  if (decay.empty()) {
    decay.resize(num_filters);
    for (int k = 0; k < num_filters; ++k) {
      decay[k] = (num_filters == 1) ? 0.5 : 0.2 + 0.6 * k / (num_filters - 1);
    }
  }
  if (static_cast<int>(decay.size()) != num_filters) {
    throw ConfigError("filter bank: need one beta per filter");
  }

  FilterBank bank;
  bank.synaptic.assign(num_filters, std::vector<double>(window, 0.0));
  for (int k = 0; k < num_filters; ++k) {
    double p = 1.0;
    for (int i = 0; i < window; ++i) {
      p *= decay[k];
      bank.synaptic[k][i] = p;
    }
  }
  bank.feedback.resize(window);
  for (int i = 0; i < window; ++i) bank.feedback[i] = -bank.synaptic[0][i];
  return bank;
}

}  // namespace neurojscc
