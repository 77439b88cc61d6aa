#pragma once

#include <functional>
#include <vector>

#include "neurojscc/channel.hpp"
#include "neurojscc/trainer.hpp"

namespace neurojscc {

/// Number of stochastic binary variables in one end-to-end rollout:
/// encoder neurons, channel flips (when the channel is noisy) and decoder
/// hidden neurons, per step.
long count_stochastic_bits(const SnnModel* encoder, const SnnModel& decoder,
                           const ChannelModel& channel, int num_steps, int d_x);

/// Visit every realizable trajectory with its exact probability (network
/// factors times channel transition factors) and its total clamped-output
/// loss. Throws when the instance exceeds max_bits stochastic variables.
void enumerate_trajectories(
    SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel, const SpikeTensor& u,
    const SpikeTensor& v, int max_bits,
    const std::function<void(const Trajectory&, double probability, double loss)>& visit);

struct OracleResult {
  double total_probability = 0.0;
  double expected_loss = 0.0;     // L(theta), the trained upper bound
  double neg_log_marginal = 0.0;  // -log p(v || u), exact
  std::vector<std::vector<double>> grad_encoder;  // d L / d theta per neuron
  std::vector<std::vector<double>> grad_decoder;
  long num_trajectories = 0;
};

/// Exact gradient of the loss bound by exhaustive enumeration of all
/// stochastic trajectories. The reference every stochastic estimate is
/// certified against. Resets and replays through the models' trace state.
OracleResult exact_gradient_oracle(SnnModel* encoder, SnnModel& decoder,
                                   const ChannelModel& channel, const SpikeTensor& u,
                                   const SpikeTensor& v, int max_bits = 20);

}  // namespace neurojscc
