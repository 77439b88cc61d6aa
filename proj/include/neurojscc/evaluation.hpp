#pragma once

#include <cstdint>
#include <vector>

#include "neurojscc/channel.hpp"
#include "neurojscc/network.hpp"

namespace neurojscc {

struct ClassificationResult {
  int predicted_class = 0;
  std::vector<long> spike_counts;
  bool no_spikes = false;  // set when no output neuron fired in the horizon
};

/// Rate decoding: the output neuron with the largest spike count over steps
/// 1..horizon wins; ties break to the lowest index.
ClassificationResult rate_decode(const SpikeTensor& outputs, int horizon);

/// One inference rollout: every neuron sampled (no clamping). Returns the
/// decoder output spikes (d_v x T). encoder == nullptr means uncoded
/// transmission.
SpikeTensor run_inference(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                          const SpikeTensor& u, Rng& rng);

/// Classify one example; `repeats` > 1 takes a majority vote over
/// independent rollouts (ties to the lowest class).
int classify_example(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                     const SpikeTensor& u, std::uint64_t seed, int repeats = 1);

/// Test accuracy over a dataset. Each example owns the rng stream derived
/// from (eval_seed, example index), so the result is independent of
/// evaluation order or parallelism.
double evaluate_accuracy(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                         const Dataset& test_set, std::uint64_t eval_seed, int repeats = 1);

/// Accuracy as a function of the observation horizon t = 1..T, from a
/// single rollout per example (the curve at t = T equals the plain test
/// accuracy for repeats = 1).
std::vector<double> time_to_accuracy(SnnModel* encoder, SnnModel& decoder,
                                     const ChannelModel& channel, const Dataset& test_set,
                                     std::uint64_t eval_seed);

}  // namespace neurojscc
