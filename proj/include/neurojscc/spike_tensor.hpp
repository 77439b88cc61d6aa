#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neurojscc/errors.hpp"

namespace neurojscc {

/// Binary spike signals over (signal, step). Entries are exactly 0 or 1 and
/// the shape is fixed at construction. Storage is step-major so the column
/// consumed per simulation step is contiguous.
class SpikeTensor {
 public:
  SpikeTensor(int num_signals, int num_steps)
      : d_(num_signals), steps_(num_steps) {
    if (num_signals < 1 || num_steps < 1) {
      throw DimensionError("SpikeTensor: shape must be at least 1x1");
    }
    data_.assign(static_cast<std::size_t>(d_) * steps_, 0);
  }

  int num_signals() const { return d_; }
  int num_steps() const { return steps_; }

  bool get(int signal, int step) const { return data_[index(signal, step)] != 0; }
  void set(int signal, int step, bool value) { data_[index(signal, step)] = value ? 1 : 0; }

  /// All signals at one step.
  std::span<const std::uint8_t> column(int step) const {
    check_step(step);
    return {data_.data() + static_cast<std::size_t>(step) * d_, static_cast<std::size_t>(d_)};
  }
  std::span<std::uint8_t> column(int step) {
    check_step(step);
    return {data_.data() + static_cast<std::size_t>(step) * d_, static_cast<std::size_t>(d_)};
  }

  /// One signal's history as a dense 0/1 vector over steps.
  std::vector<std::uint8_t> signal(int j) const {
    std::vector<std::uint8_t> out(steps_);
    for (int t = 0; t < steps_; ++t) out[t] = data_[index(j, t)];
    return out;
  }

  long spike_count() const {
    long n = 0;
    for (const auto b : data_) n += b;
    return n;
  }

  double density() const {
    return static_cast<double>(spike_count()) / (static_cast<double>(d_) * steps_);
  }

  bool operator==(const SpikeTensor&) const = default;

 private:
  std::size_t index(int signal, int step) const {
    if (signal < 0 || signal >= d_ || step < 0 || step >= steps_) {
      throw DimensionError("SpikeTensor: index out of range");
    }
    return static_cast<std::size_t>(step) * d_ + signal;
  }
  void check_step(int step) const {
    if (step < 0 || step >= steps_) throw DimensionError("SpikeTensor: step out of range");
  }

  int d_;
  int steps_;
  std::vector<std::uint8_t> data_;
};

/// A classification example: spike signals plus the class index.
struct LabeledExample {
  int label = 0;
  SpikeTensor spikes;
};

using Dataset = std::vector<LabeledExample>;

}  // namespace neurojscc
