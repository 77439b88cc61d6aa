#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neurojscc/filter_bank.hpp"
#include "neurojscc/spike_tensor.hpp"

namespace neurojscc {

/// Reference filtered-trace evaluation at query step t (1-based):
///   sum over delta = 1..min(W, t-1) of filter[delta] * spikes[t - delta],
/// i.e. the trace a neuron reads at step t formed from spikes strictly
/// before t. t may be num_steps + 1 ("just past the end"). Used as the
/// oracle for the online TraceState.
double convolve_filter(std::span<const double> filter, std::span<const std::uint8_t> spikes, int t);

/// Online filtered traces for a set of binary signals, advanced one step at
/// a time. After n calls to advance(), synaptic(j, k) equals
/// convolve_filter(a_k, history_j, n + 1): the value potentials read at the
/// next step. Traces are recomputed each step as dot products against a ring
/// buffer of the last W spike vectors, so they are exact, not recursive
/// approximations.
class TraceState {
 public:
  TraceState(FilterBank filters, int num_signals);

  /// Consume the spike vector of one step.
  void advance(std::span<const std::uint8_t> spikes_t);

  void reset();

  double synaptic(int signal, int k) const { return syn_[static_cast<std::size_t>(signal) * K_ + k]; }
  double feedback(int signal) const { return fb_[signal]; }

  std::span<const double> synaptic_row(int signal) const {
    return {syn_.data() + static_cast<std::size_t>(signal) * K_, static_cast<std::size_t>(K_)};
  }

  int num_signals() const { return d_; }
  int num_filters() const { return K_; }
  long steps() const { return steps_; }
  const FilterBank& filters() const { return filters_; }

 private:
  FilterBank filters_;
  int d_;
  int K_;
  int W_;
  long steps_ = 0;
  int head_ = 0;                    // ring slot that receives the next step
  std::vector<std::uint8_t> ring_;  // W x d, slot-major
  std::vector<double> syn_;         // d x K
  std::vector<double> fb_;          // d
};

}  // namespace neurojscc
