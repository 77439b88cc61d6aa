#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "neurojscc/rng.hpp"
#include "neurojscc/spike_tensor.hpp"
#include "neurojscc/trace_state.hpp"

namespace neurojscc {

/// Numerically stable logistic sigmoid.
double spike_probability(double potential);

/// Binary cross-entropy -s*log(p) - (1-s)*log(1-p). Probabilities at 0 or 1
/// with a mismatching target are clamped to epsilon; *clamped reports it.
double log_loss(int spike, double p, double epsilon = 1e-12, bool* clamped = nullptr);

/// Same loss evaluated from the potential via softplus; immune to
/// cancellation for |potential| > 30.
double log_loss_from_potential(int spike, double potential);

/// log p(spike | potential) for a Bernoulli(sigmoid(potential)) draw.
double log_prob_from_potential(int spike, double potential);

/// Directed graph of spiking neurons. Signals are indexed with exogeneous
/// inputs first ([0, num_inputs)) followed by neurons; neurons are ordered
/// hidden first, then outputs. Cycles are allowed.
struct NetworkTopology {
  int num_inputs = 0;
  int num_hidden = 0;
  int num_outputs = 0;
  /// Per neuron: presynaptic signal indices (inputs and/or other neurons).
  std::vector<std::vector<int>> presyn;

  int num_neurons() const { return num_hidden + num_outputs; }
  int num_signals() const { return num_inputs + num_neurons(); }
  bool is_output(int neuron) const { return neuron >= num_hidden; }
  int output_neuron(int k) const { return num_hidden + k; }
  int signal_of(int neuron) const { return num_inputs + neuron; }

  /// Every input feeds every neuron; every neuron feeds every other neuron
  /// (self-history is carried by the feedback filter, not a synapse).
  static NetworkTopology fully_connected(int num_inputs, int num_hidden, int num_outputs);

  /// Inputs feed every neuron and hidden neurons are fully recurrent, but
  /// output spikes are not fed back as synapses. During clamped training the
  /// output spikes are the targets, so feeding them back lets the decoder
  /// explain the targets from the targets themselves; the readout then
  /// free-runs into an arbitrary attractor at inference. Keeping the output
  /// layer out of the recurrent loop removes that leak.
  static NetworkTopology recurrent_hidden(int num_inputs, int num_hidden, int num_outputs);

  void validate() const;
};

/// Probabilistic GLM spiking network: per-neuron membrane potentials are
/// affine in the filtered traces of presynaptic spikes (lag >= 1) and the
/// neuron's own spike history, and spikes are Bernoulli(sigmoid(potential)).
///
/// Per-neuron parameters are stored flat: |P_i| * K synaptic weights grouped
/// by presynaptic signal, then the feedback weight, then the bias.
class SnnModel {
 public:
  SnnModel(NetworkTopology topology, FilterBank filters);

  const NetworkTopology& topology() const { return topo_; }
  const FilterBank& filters() const { return traces_.filters(); }
  int num_filters() const { return traces_.num_filters(); }

  int param_count(int neuron) const { return static_cast<int>(params_[neuron].size()); }
  std::span<double> params(int neuron) { return params_[neuron]; }
  std::span<const double> params(int neuron) const { return params_[neuron]; }

  /// Gaussian weights with std scale / sqrt(|P_i| * K); zero biases.
  void init_params(std::uint64_t seed, double scale = 0.1);

  /// Membrane potential of one neuron from the current traces (the state
  /// after the previous step's spikes were consumed).
  double membrane_potential(int neuron) const;
  void potentials(std::span<double> out) const;

  /// d log p(spike | potential) / d theta_i evaluated against the current
  /// traces (the ones membrane_potential just read). Layout matches params.
  void log_prob_grad(int neuron, std::uint8_t spike, double potential,
                     std::span<double> grad_out) const;

  /// Advance the trace state by one step with the realized spikes.
  void advance(std::span<const std::uint8_t> inputs_t, std::span<const std::uint8_t> neuron_spikes_t);

  struct StepResult {
    std::vector<std::uint8_t> spikes;   // per neuron
    std::vector<double> potentials;     // per neuron
    std::vector<double> log_probs;      // per neuron, log p(realized spike)
  };

  /// One full step: compute potentials, sample every neuron (outputs take
  /// the clamp values when given), then advance traces. Sampling consumes
  /// one uniform draw per unclamped neuron, in neuron order.
  StepResult step(std::span<const std::uint8_t> inputs_t,
                  std::optional<std::span<const std::uint8_t>> clamp_outputs, Rng& rng);

  /// Clear all trace state (start of a fresh sequence).
  void reset_state();

  const TraceState& traces() const { return traces_; }

  /// Joint log probability of a realized spike matrix under the model,
  /// recomputed from scratch; does not disturb the live trace state.
  double sequence_log_prob(const SpikeTensor& neuron_spikes, const SpikeTensor& inputs) const;

 private:
  NetworkTopology topo_;
  std::vector<std::vector<double>> params_;
  TraceState traces_;
  std::vector<std::uint8_t> signal_buf_;  // scratch for advance()

  double potential_from(const TraceState& traces, int neuron) const;
};

}  // namespace neurojscc
