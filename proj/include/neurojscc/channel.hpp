#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "neurojscc/rng.hpp"
#include "neurojscc/spike_tensor.hpp"

namespace neurojscc {

/// Causally conditional stochastic map from input spike history to binary
/// channel outputs. Histories are passed so frequency-selective models fit
/// the same interface; the shipped models are memoryless.
class ChannelModel {
 public:
  virtual ~ChannelModel() = default;

  virtual int output_dim(int input_dim) const { return input_dim; }

  /// Produce y_t into `y_t` given inputs up to and including step t (columns
  /// 0..t of x_hist) and own outputs up to t-1 (columns 0..t-1 of y_hist).
  virtual void step(const SpikeTensor& x_hist, int t, const SpikeTensor& y_hist,
                    std::span<std::uint8_t> y_t, Rng& rng) const = 0;

  /// Exact probability that an output bit differs from the input bit;
  /// defined for the memoryless models and used by enumeration and
  /// statistics checks.
  virtual double flip_probability(int input_bit) const = 0;

  bool stochastic() const { return flip_probability(0) > 0.0 || flip_probability(1) > 0.0; }
};

/// Hard binary quantizer, 1 iff x >= threshold.
int quantize(double x, double threshold = 0.5);

/// Standard normal CDF.
double normal_cdf(double z);

/// y_t = Q(x_t + n_t) with n ~ N(0, sigma2 I); memoryless, binary in/out.
class GaussianQuantizedChannel : public ChannelModel {
 public:
  GaussianQuantizedChannel(double sigma2, double threshold = 0.5);

  void step(const SpikeTensor& x_hist, int t, const SpikeTensor& y_hist,
            std::span<std::uint8_t> y_t, Rng& rng) const override;
  double flip_probability(int input_bit) const override;

  double sigma2() const { return sigma2_; }
  double threshold() const { return threshold_; }

  /// SNR recalibration between epochs adjusts the noise power in place.
  void set_sigma2(double sigma2);

 private:
  double sigma2_;
  double sigma_;
  double threshold_;
};

/// Noiseless passthrough (the sigma2 -> 0 limit).
class IdentityChannel : public ChannelModel {
 public:
  void step(const SpikeTensor& x_hist, int t, const SpikeTensor& y_hist,
            std::span<std::uint8_t> y_t, Rng& rng) const override;
  double flip_probability(int) const override { return 0.0; }
};

/// Noise power for a target per-symbol SNR given the measured spike density
/// rho of the transmitted signal: sigma2 = rho / 10^(snr_db / 10).
double sigma2_from_snr(double snr_db, double rho);

/// Fraction of ones in a tensor, or averaged over a dataset.
double measure_density(const SpikeTensor& x);
double measure_density(std::span<const SpikeTensor> tensors);

}  // namespace neurojscc
