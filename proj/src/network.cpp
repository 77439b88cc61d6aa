#include "neurojscc/network.hpp"

#include <cmath>

#include "neurojscc/errors.hpp"

namespace neurojscc {

double spike_probability(double potential) {
  if (potential >= 0.0) {
    return 1.0 / (1.0 + std::exp(-potential));
  }
  const double e = std::exp(potential);
  return e / (1.0 + e);
}

namespace {

double softplus(double x) {
  // log(1 + e^x) without overflow
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

}  // namespace

double log_loss(int spike, double p, double epsilon, bool* clamped) {
  if (clamped) *clamped = false;
  double q = spike ? p : 1.0 - p;
  if (q < epsilon) {
    q = epsilon;
    if (clamped) *clamped = true;
  }
  return -std::log(q);
}

double log_loss_from_potential(int spike, double potential) {
  return softplus(potential) - (spike ? potential : 0.0);
}

double log_prob_from_potential(int spike, double potential) {
  return -log_loss_from_potential(spike, potential);
}

NetworkTopology NetworkTopology::fully_connected(int num_inputs, int num_hidden, int num_outputs) {
  NetworkTopology topo;
  topo.num_inputs = num_inputs;
  topo.num_hidden = num_hidden;
  topo.num_outputs = num_outputs;
  const int n = topo.num_neurons();
  topo.presyn.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& p = topo.presyn[i];
    p.reserve(num_inputs + n - 1);
    for (int j = 0; j < num_inputs; ++j) p.push_back(j);
    for (int j = 0; j < n; ++j) {
      if (j != i) p.push_back(num_inputs + j);
    }
  }
  return topo;
}

NetworkTopology NetworkTopology::recurrent_hidden(int num_inputs, int num_hidden,
                                                  int num_outputs) {
  NetworkTopology topo;
  topo.num_inputs = num_inputs;
  topo.num_hidden = num_hidden;
  topo.num_outputs = num_outputs;
  const int n = topo.num_neurons();
  topo.presyn.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& p = topo.presyn[i];
    for (int j = 0; j < num_inputs; ++j) p.push_back(j);
    for (int j = 0; j < num_hidden; ++j) {
      if (j != i) p.push_back(num_inputs + j);
    }
  }
  return topo;
}

void NetworkTopology::validate() const {
  if (num_inputs < 0 || num_hidden < 0 || num_outputs < 1) {
    throw ConfigError("topology: needs at least one output neuron");
  }
  if (static_cast<int>(presyn.size()) != num_neurons()) {
    throw DimensionError("topology: presynaptic list count != neuron count");
  }
  for (const auto& p : presyn) {
    for (const int j : p) {
      if (j < 0 || j >= num_signals()) {
        throw DimensionError("topology: presynaptic index out of range");
      }
    }
  }
}

SnnModel::SnnModel(NetworkTopology topology, FilterBank filters)
    : topo_(std::move(topology)),
      traces_(std::move(filters), std::max(1, topo_.num_signals())),
      signal_buf_(topo_.num_signals(), 0) {
  topo_.validate();
  const int K = traces_.num_filters();
  params_.resize(topo_.num_neurons());
  for (int i = 0; i < topo_.num_neurons(); ++i) {
    params_[i].assign(topo_.presyn[i].size() * K + 2, 0.0);
  }
}

void SnnModel::init_params(std::uint64_t seed, double scale) {
  Rng rng(seed);
  const int K = traces_.num_filters();
  for (int i = 0; i < topo_.num_neurons(); ++i) {
    const std::size_t fan_in = topo_.presyn[i].size() * K;
    const double std_dev = fan_in > 0 ? scale / std::sqrt(static_cast<double>(fan_in)) : scale;
    auto& p = params_[i];
    for (std::size_t w = 0; w < fan_in; ++w) p[w] = rng.gaussian(std_dev);
    p[fan_in] = rng.gaussian(std_dev);  // feedback weight
    p[fan_in + 1] = 0.0;                // bias
  }
}

double SnnModel::potential_from(const TraceState& traces, int neuron) const {
  const auto& presyn = topo_.presyn[neuron];
  const auto& p = params_[neuron];
  const int K = traces.num_filters();
  double acc = 0.0;
  std::size_t w = 0;
  for (const int j : presyn) {
    const auto row = traces.synaptic_row(j);
    for (int k = 0; k < K; ++k) acc += p[w++] * row[k];
  }
  acc += p[w] * traces.feedback(topo_.signal_of(neuron));  // self-memory
  acc += p[w + 1];                                         // bias
  return acc;
}

double SnnModel::membrane_potential(int neuron) const {
  return potential_from(traces_, neuron);
}

void SnnModel::potentials(std::span<double> out) const {
  if (static_cast<int>(out.size()) != topo_.num_neurons()) {
    throw DimensionError("potentials: output span length mismatch");
  }
  for (int i = 0; i < topo_.num_neurons(); ++i) out[i] = potential_from(traces_, i);
}

void SnnModel::log_prob_grad(int neuron, std::uint8_t spike, double potential,
                             std::span<double> grad_out) const {
  const auto& presyn = topo_.presyn[neuron];
  const int K = traces_.num_filters();
  if (grad_out.size() != params_[neuron].size()) {
    throw DimensionError("log_prob_grad: gradient span length mismatch");
  }
  const double residual = static_cast<double>(spike) - spike_probability(potential);
  std::size_t w = 0;
  for (const int j : presyn) {
    const auto row = traces_.synaptic_row(j);
    for (int k = 0; k < K; ++k) grad_out[w++] = residual * row[k];
  }
  grad_out[w] = residual * traces_.feedback(topo_.signal_of(neuron));
  grad_out[w + 1] = residual;
}

void SnnModel::advance(std::span<const std::uint8_t> inputs_t,
                       std::span<const std::uint8_t> neuron_spikes_t) {
  if (static_cast<int>(inputs_t.size()) != topo_.num_inputs ||
      static_cast<int>(neuron_spikes_t.size()) != topo_.num_neurons()) {
    throw DimensionError("advance: spike vector length mismatch");
  }
  std::copy(inputs_t.begin(), inputs_t.end(), signal_buf_.begin());
  std::copy(neuron_spikes_t.begin(), neuron_spikes_t.end(), signal_buf_.begin() + topo_.num_inputs);
  traces_.advance(signal_buf_);
}

SnnModel::StepResult SnnModel::step(std::span<const std::uint8_t> inputs_t,
                                    std::optional<std::span<const std::uint8_t>> clamp_outputs,
                                    Rng& rng) {
  const int n = topo_.num_neurons();
  if (clamp_outputs && static_cast<int>(clamp_outputs->size()) != topo_.num_outputs) {
    throw DimensionError("step: clamp vector length != number of output neurons");
  }
  StepResult r;
  r.spikes.resize(n);
  r.potentials.resize(n);
  r.log_probs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double o = potential_from(traces_, i);
    r.potentials[i] = o;
    if (clamp_outputs && topo_.is_output(i)) {
      r.spikes[i] = (*clamp_outputs)[i - topo_.num_hidden];
    } else {
      r.spikes[i] = rng.bernoulli(spike_probability(o)) ? 1 : 0;
    }
    r.log_probs[i] = log_prob_from_potential(r.spikes[i], o);
  }
  advance(inputs_t, r.spikes);
  return r;
}

void SnnModel::reset_state() { traces_.reset(); }

double SnnModel::sequence_log_prob(const SpikeTensor& neuron_spikes, const SpikeTensor& inputs) const {
  if (neuron_spikes.num_signals() != topo_.num_neurons() ||
      inputs.num_signals() != std::max(1, topo_.num_inputs) ||
      neuron_spikes.num_steps() != inputs.num_steps()) {
    throw DimensionError("sequence_log_prob: shape mismatch with topology");
  }
  TraceState traces(traces_.filters(), std::max(1, topo_.num_signals()));
  std::vector<std::uint8_t> signals(topo_.num_signals(), 0);
  double total = 0.0;
  for (int t = 0; t < neuron_spikes.num_steps(); ++t) {
    for (int i = 0; i < topo_.num_neurons(); ++i) {
      const double o = potential_from(traces, i);
      total += log_prob_from_potential(neuron_spikes.get(i, t), o);
    }
    if (topo_.num_inputs > 0) {
      const auto col = inputs.column(t);
      std::copy(col.begin(), col.end(), signals.begin());
    }
    const auto ncol = neuron_spikes.column(t);
    std::copy(ncol.begin(), ncol.end(), signals.begin() + topo_.num_inputs);
    traces.advance(signals);
  }
  return total;
}

}  // namespace neurojscc
