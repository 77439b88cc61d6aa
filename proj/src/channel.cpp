#include "neurojscc/channel.hpp"

#include <cmath>

#include "neurojscc/errors.hpp"

namespace neurojscc {

int quantize(double x, double threshold) { return x >= threshold ? 1 : 0; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

GaussianQuantizedChannel::GaussianQuantizedChannel(double sigma2, double threshold)
    : threshold_(threshold) {
  set_sigma2(sigma2);
}

void GaussianQuantizedChannel::set_sigma2(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ConfigError("gaussian channel: sigma2 must be positive");
  }
  sigma2_ = sigma2;
  sigma_ = std::sqrt(sigma2);
}

void GaussianQuantizedChannel::step(const SpikeTensor& x_hist, int t, const SpikeTensor&,
                                    std::span<std::uint8_t> y_t, Rng& rng) const {
  const auto x_t = x_hist.column(t);
  if (y_t.size() != x_t.size()) throw DimensionError("channel step: output length mismatch");
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    y_t[i] = static_cast<std::uint8_t>(
        quantize(static_cast<double>(x_t[i]) + rng.gaussian(sigma_), threshold_));
  }
}

double GaussianQuantizedChannel::flip_probability(int input_bit) const {
  if (input_bit == 0) {
    // P(n >= threshold)
    return 1.0 - normal_cdf(threshold_ / sigma_);
  }
  // P(1 + n < threshold)
  return normal_cdf((threshold_ - 1.0) / sigma_);
}

void IdentityChannel::step(const SpikeTensor& x_hist, int t, const SpikeTensor&,
                           std::span<std::uint8_t> y_t, Rng&) const {
  const auto x_t = x_hist.column(t);
  if (y_t.size() != x_t.size()) throw DimensionError("channel step: output length mismatch");
  std::copy(x_t.begin(), x_t.end(), y_t.begin());
}

double sigma2_from_snr(double snr_db, double rho) {
  if (!(rho > 0.0)) {
    throw ConfigError("SNR calibration: measured spike density is zero, no transmitted energy");
  }
  return rho / std::pow(10.0, snr_db / 10.0);
}

double measure_density(const SpikeTensor& x) { return x.density(); }

double measure_density(std::span<const SpikeTensor> tensors) {
  if (tensors.empty()) throw DimensionError("measure_density: empty set");
  long spikes = 0;
  long cells = 0;
  for (const auto& t : tensors) {
    spikes += t.spike_count();
    cells += static_cast<long>(t.num_signals()) * t.num_steps();
  }
  return static_cast<double>(spikes) / static_cast<double>(cells);
}

}  // namespace neurojscc
