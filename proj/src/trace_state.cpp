#include "neurojscc/trace_state.hpp"

#include <algorithm>

#include "neurojscc/errors.hpp"

namespace neurojscc {

double convolve_filter(std::span<const double> filter, std::span<const std::uint8_t> spikes, int t) {
  if (t < 1 || t > static_cast<int>(spikes.size()) + 1) {
    throw DimensionError("convolve_filter: query step out of range");
  }
  const int max_delta = std::min(static_cast<int>(filter.size()), t - 1);
  double acc = 0.0;
  for (int delta = 1; delta <= max_delta; ++delta) {
    if (spikes[t - delta - 1]) acc += filter[delta - 1];
  }
  return acc;
}

TraceState::TraceState(FilterBank filters, int num_signals)
    : filters_(std::move(filters)),
      d_(num_signals),
      K_(filters_.num_filters()),
      W_(filters_.window()) {
  if (num_signals < 1) throw DimensionError("TraceState: need at least one signal");
  ring_.assign(static_cast<std::size_t>(W_) * d_, 0);
  syn_.assign(static_cast<std::size_t>(d_) * K_, 0.0);
  fb_.assign(d_, 0.0);
}

void TraceState::advance(std::span<const std::uint8_t> spikes_t) {
  if (static_cast<int>(spikes_t.size()) != d_) {
    throw DimensionError("TraceState::advance: spike vector length mismatch");
  }
  std::copy(spikes_t.begin(), spikes_t.end(), ring_.begin() + static_cast<std::size_t>(head_) * d_);
  ++steps_;
  head_ = (head_ + 1) % W_;

  std::fill(syn_.begin(), syn_.end(), 0.0);
  std::fill(fb_.begin(), fb_.end(), 0.0);
  const int depth = static_cast<int>(std::min<long>(steps_, W_));
  for (int delta = 1; delta <= depth; ++delta) {
    // slot holding the spikes of `delta` steps ago
    const int slot = (head_ - delta + W_ * 2) % W_;
    const std::uint8_t* spikes = ring_.data() + static_cast<std::size_t>(slot) * d_;
    const double fb_w = filters_.feedback[delta - 1];
    for (int j = 0; j < d_; ++j) {
      if (!spikes[j]) continue;
      double* row = syn_.data() + static_cast<std::size_t>(j) * K_;
      for (int k = 0; k < K_; ++k) row[k] += filters_.synaptic[k][delta - 1];
      fb_[j] += fb_w;
    }
  }
}

void TraceState::reset() {
  steps_ = 0;
  head_ = 0;
  std::fill(ring_.begin(), ring_.end(), 0);
  std::fill(syn_.begin(), syn_.end(), 0.0);
  std::fill(fb_.begin(), fb_.end(), 0.0);
}

}  // namespace neurojscc
