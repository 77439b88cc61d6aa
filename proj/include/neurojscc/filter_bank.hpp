#pragma once

#include <span>
#include <vector>

namespace neurojscc {

/// K synaptic filters plus one feedback (self-memory) filter, all with the
/// same finite window W. filter[k][i] is the amplitude at lag delta = i + 1;
/// lags beyond W are implicitly zero.
struct FilterBank {
  std::vector<std::vector<double>> synaptic;  // K x W
  std::vector<double> feedback;               // W

  int num_filters() const { return static_cast<int>(synaptic.size()); }
  int window() const { return static_cast<int>(feedback.size()); }

  /// Raised-cosine basis with log-spaced peaks over the window, each filter
  /// normalized to peak amplitude 1. The feedback filter is the negated
  /// first basis element (refractory shape; its sign is carried by the
  /// learnable feedback weight).
  static FilterBank raised_cosine(int num_filters, int window, double log_offset = 1.0);

  /// Exponential decays a_k[delta] = beta_k^delta. With no betas given, the
  /// K decay constants are spread over [0.2, 0.8].
  static FilterBank exponential(int num_filters, int window, std::span<const double> betas = {});
};

}  // namespace neurojscc
