#include "neurojscc/trainer.hpp"

#include <cmath>

#include "neurojscc/errors.hpp"

namespace neurojscc {

void Hyperparams::validate() const {
  // eta = 0 is allowed: it turns training passes into pure evaluation
  if (eta < 0.0 || !std::isfinite(eta)) throw ConfigError("hyperparams: eta must be >= 0");
  for (const auto& [name, v] :
       {std::pair<const char*, double>{"kappa", kappa}, {"kappa2", kappa2}, {"alpha", alpha}}) {
    if (v < 0.0 || v >= 1.0) {
      throw ConfigError(std::string("hyperparams: ") + name + " must be in [0, 1)");
    }
  }
  if (!(epsilon > 0.0)) throw ConfigError("hyperparams: epsilon must be > 0");
}

double learning_signal_update(double prev, double step_loss, double kappa) {
  return kappa * prev + (1.0 - kappa) * step_loss;
}

void eligibility_update(std::span<double> e, std::span<const double> grad, double kappa) {
  if (e.size() != grad.size()) throw DimensionError("eligibility_update: shape mismatch");
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = kappa * e[i] + (1.0 - kappa) * grad[i];
  }
}

void baseline_stats_update(std::span<double> e2_avg, std::span<double> le2_avg,
                           std::span<const double> e, double learning_signal, double alpha) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double e2 = e[i] * e[i];
    e2_avg[i] = alpha * e2_avg[i] + (1.0 - alpha) * e2;
    le2_avg[i] = alpha * le2_avg[i] + (1.0 - alpha) * learning_signal * e2;
  }
}

void baseline_value(std::span<const double> le2_avg, std::span<const double> e2_avg,
                    std::span<double> b_out) {
  for (std::size_t i = 0; i < b_out.size(); ++i) {
    b_out[i] = e2_avg[i] > 0.0 ? le2_avg[i] / e2_avg[i] : 0.0;
  }
}

void delta_update_stochastic(std::span<double> delta, double learning_signal,
                             std::span<const double> baseline, std::span<const double> e,
                             double kappa2) {
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = kappa2 * delta[i] + (1.0 - kappa2) * (learning_signal - baseline[i]) * e[i];
  }
}

void delta_update_observed(std::span<double> delta, std::span<const double> e) {
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = -e[i];
}

void apply_update(std::span<double> params, std::span<const double> delta, double eta,
                  long iteration) {
  if (params.size() != delta.size()) throw DimensionError("apply_update: shape mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double d = delta[i];
    if (!std::isfinite(d)) {
      throw DivergenceError("apply_update: non-finite update component", iteration);
    }
    params[i] -= eta * d;
  }
}

void ModelTrainState::resize_like(const SnnModel& model) {
  const int n = model.topology().num_neurons();
  eligibility.resize(n);
  e2_avg.resize(n);
  le2_avg.resize(n);
  delta.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto count = static_cast<std::size_t>(model.param_count(i));
    eligibility[i].assign(count, 0.0);
    e2_avg[i].assign(count, 0.0);
    le2_avg[i].assign(count, 0.0);
    delta[i].assign(count, 0.0);
  }
}

void ModelTrainState::reset_fast() {
  for (auto& v : eligibility) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : delta) std::fill(v.begin(), v.end(), 0.0);
}

void ModelTrainState::reset_baseline_stats() {
  for (auto& v : e2_avg) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : le2_avg) std::fill(v.begin(), v.end(), 0.0);
}

JsccTrainer::JsccTrainer(SnnModel* encoder, SnnModel* decoder, const ChannelModel* channel,
                         Hyperparams hp, TrainOptions options)
    : encoder_(encoder), decoder_(decoder), channel_(channel), hp_(hp), options_(options) {
  hp_.validate();
  if (!decoder_ || !channel_) throw ConfigError("trainer: decoder and channel are required");
  if (encoder_) state_.encoder.resize_like(*encoder_);
  state_.decoder.resize_like(*decoder_);
}

void JsccTrainer::update_neuron(SnnModel& model, ModelTrainState& ms, int neuron,
                                std::uint8_t spike, double potential, bool observed,
                                long iteration) {
  auto& e = ms.eligibility[neuron];
  grad_buf_.resize(e.size());
  model.log_prob_grad(neuron, spike, potential, grad_buf_);
  eligibility_update(e, grad_buf_, hp_.kappa);

  auto& delta = ms.delta[neuron];
  if (observed) {
    delta_update_observed(delta, e);
    if (!options_.train_output_feedback) {
      delta[delta.size() - 2] = 0.0;  // keep the self-feedback weight frozen
    }
  } else {
    baseline_buf_.assign(e.size(), 0.0);
    if (hp_.use_baseline) {
      baseline_stats_update(ms.e2_avg[neuron], ms.le2_avg[neuron], e, state_.learning_signal,
                            hp_.alpha);
      baseline_value(ms.le2_avg[neuron], ms.e2_avg[neuron], baseline_buf_);
    }
    delta_update_stochastic(delta, state_.learning_signal, baseline_buf_, e, hp_.kappa2);
  }
  apply_update(model.params(neuron), delta, hp_.eta, iteration);
}

std::vector<double> JsccTrainer::train_example(const SpikeTensor& u, const SpikeTensor& v,
                                               Rng& rng, long iteration) {
  const int T = u.num_steps();
  if (v.num_steps() != T) throw DimensionError("train_example: input/target step counts differ");
  const int d_x = encoder_ ? encoder_->topology().num_outputs : u.num_signals();
  if (encoder_ && encoder_->topology().num_inputs != u.num_signals()) {
    throw DimensionError("train_example: encoder input width != d_u");
  }
  const int d_y = channel_->output_dim(d_x);
  if (decoder_->topology().num_inputs != d_y) {
    throw DimensionError("train_example: decoder input width != channel output width");
  }
  if (decoder_->topology().num_outputs != v.num_signals()) {
    throw DimensionError("train_example: target width != number of decoder outputs");
  }

  if (encoder_) encoder_->reset_state();
  decoder_->reset_state();
  if (options_.reset_smoothing_per_example) {
    state_.learning_signal = 0.0;
    state_.encoder.reset_fast();
    state_.decoder.reset_fast();
  }
  if (!options_.carry_baseline_stats) {
    state_.encoder.reset_baseline_stats();
    state_.decoder.reset_baseline_stats();
  }

  const auto& dec_topo = decoder_->topology();
  const int n_dec = dec_topo.num_neurons();
  const int n_enc = encoder_ ? encoder_->topology().num_neurons() : 0;

  SpikeTensor x(d_x, T);
  SpikeTensor y(d_y, T);
  std::vector<double> step_losses(T, 0.0);
  std::vector<double> enc_o(std::max(1, n_enc));
  std::vector<double> dec_o(n_dec);
  std::vector<std::uint8_t> enc_spikes(std::max(1, n_enc));
  std::vector<std::uint8_t> dec_spikes(n_dec);

  for (int t = 0; t < T; ++t) {
    // encoder: potentials from the previous step's traces, all neurons sampled
    if (encoder_) {
      const auto& enc_topo = encoder_->topology();
      encoder_->potentials({enc_o.data(), static_cast<std::size_t>(n_enc)});
      for (int i = 0; i < n_enc; ++i) {
        enc_spikes[i] = rng.bernoulli(spike_probability(enc_o[i])) ? 1 : 0;
      }
      for (int k = 0; k < enc_topo.num_outputs; ++k) {
        x.column(t)[k] = enc_spikes[enc_topo.output_neuron(k)];
      }
    } else {
      const auto col = u.column(t);
      std::copy(col.begin(), col.end(), x.column(t).begin());
    }

    channel_->step(x, t, y, y.column(t), rng);

    // decoder: hidden neurons sampled, outputs clamped to the target
    decoder_->potentials(dec_o);
    for (int i = 0; i < n_dec; ++i) {
      dec_spikes[i] = dec_topo.is_output(i)
                          ? v.get(i - dec_topo.num_hidden, t)
                          : (rng.bernoulli(spike_probability(dec_o[i])) ? 1 : 0);
    }

    // global learning signal from the clamped output losses
    double step_loss = 0.0;
    for (int k = 0; k < dec_topo.num_outputs; ++k) {
      step_loss += log_loss_from_potential(v.get(k, t), dec_o[dec_topo.output_neuron(k)]);
    }
    step_losses[t] = step_loss;
    state_.learning_signal = learning_signal_update(state_.learning_signal, step_loss, hp_.kappa);

    // per-neuron updates read the same traces the potentials did, so they
    // run before the trace state advances
    if (encoder_) {
      for (int i = 0; i < n_enc; ++i) {
        update_neuron(*encoder_, state_.encoder, i, enc_spikes[i], enc_o[i], false, iteration);
      }
      encoder_->advance(u.column(t), {enc_spikes.data(), static_cast<std::size_t>(n_enc)});
    }
    for (int i = 0; i < n_dec; ++i) {
      update_neuron(*decoder_, state_.decoder, i, dec_spikes[i], dec_o[i], dec_topo.is_output(i),
                    iteration);
    }
    decoder_->advance(y.column(t), dec_spikes);
  }
  return step_losses;
}

Trajectory sample_trajectory(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                             const SpikeTensor& u, const SpikeTensor& v, Rng& rng) {
  const int T = u.num_steps();
  const int d_x = encoder ? encoder->topology().num_outputs : u.num_signals();
  const int d_y = channel.output_dim(d_x);
  const auto& dec_topo = decoder.topology();
  const int n_enc = encoder ? encoder->topology().num_neurons() : 0;

  Trajectory traj{SpikeTensor(std::max(1, n_enc), T), SpikeTensor(d_y, T),
                  SpikeTensor(dec_topo.num_neurons(), T), encoder != nullptr};
  if (encoder) encoder->reset_state();
  decoder.reset_state();

  SpikeTensor x(d_x, T);
  std::vector<std::uint8_t> clamp(dec_topo.num_outputs);
  for (int t = 0; t < T; ++t) {
    if (encoder) {
      const auto enc = encoder->step(u.column(t), std::nullopt, rng);
      for (int i = 0; i < n_enc; ++i) traj.encoder_spikes.set(i, t, enc.spikes[i] != 0);
      const auto& enc_topo = encoder->topology();
      for (int k = 0; k < enc_topo.num_outputs; ++k) {
        x.column(t)[k] = enc.spikes[enc_topo.output_neuron(k)];
      }
    } else {
      const auto col = u.column(t);
      std::copy(col.begin(), col.end(), x.column(t).begin());
    }
    channel.step(x, t, traj.channel_output, traj.channel_output.column(t), rng);
    for (int k = 0; k < dec_topo.num_outputs; ++k) clamp[k] = v.get(k, t);
    const auto dec =
        decoder.step(traj.channel_output.column(t), std::span<const std::uint8_t>(clamp), rng);
    for (int i = 0; i < dec_topo.num_neurons(); ++i) {
      traj.decoder_spikes.set(i, t, dec.spikes[i] != 0);
    }
  }
  return traj;
}

TrajectoryUpdate reinforce_trajectory_update(SnnModel* encoder, SnnModel& decoder,
                                             const SpikeTensor& u, const Trajectory& traj) {
  const int T = u.num_steps();
  if (traj.channel_output.num_steps() != T || traj.decoder_spikes.num_steps() != T ||
      (traj.has_encoder && traj.encoder_spikes.num_steps() != T)) {
    throw DimensionError("trajectory update: step counts differ");
  }
  if (static_cast<bool>(encoder) != traj.has_encoder) {
    throw DimensionError("trajectory update: encoder presence mismatch");
  }

  TrajectoryUpdate out;
  const auto& dec_topo = decoder.topology();
  const int n_dec = dec_topo.num_neurons();
  const int n_enc = encoder ? encoder->topology().num_neurons() : 0;

  // per-neuron summed score functions over the whole trajectory
  std::vector<std::vector<double>> enc_scores(n_enc);
  std::vector<std::vector<double>> dec_scores(n_dec);
  for (int i = 0; i < n_enc; ++i) enc_scores[i].assign(encoder->param_count(i), 0.0);
  for (int i = 0; i < n_dec; ++i) dec_scores[i].assign(decoder.param_count(i), 0.0);

  if (encoder) encoder->reset_state();
  decoder.reset_state();

  std::vector<double> grad;
  double total_loss = 0.0;
  for (int t = 0; t < T; ++t) {
    if (encoder) {
      for (int i = 0; i < n_enc; ++i) {
        const double o = encoder->membrane_potential(i);
        grad.assign(enc_scores[i].size(), 0.0);
        encoder->log_prob_grad(i, traj.encoder_spikes.get(i, t), o, grad);
        for (std::size_t w = 0; w < grad.size(); ++w) enc_scores[i][w] += grad[w];
      }
      encoder->advance(u.column(t), traj.encoder_spikes.column(t));
    }
    for (int i = 0; i < n_dec; ++i) {
      const double o = decoder.membrane_potential(i);
      const std::uint8_t s = traj.decoder_spikes.get(i, t);
      grad.assign(dec_scores[i].size(), 0.0);
      decoder.log_prob_grad(i, s, o, grad);
      for (std::size_t w = 0; w < grad.size(); ++w) dec_scores[i][w] += grad[w];
      if (dec_topo.is_output(i)) {
        total_loss += log_loss_from_potential(s, o);
      }
    }
    decoder.advance(traj.channel_output.column(t), traj.decoder_spikes.column(t));
  }

  out.total_loss = total_loss;
  out.encoder.resize(n_enc);
  for (int i = 0; i < n_enc; ++i) {
    out.encoder[i] = enc_scores[i];
    for (auto& g : out.encoder[i]) g *= total_loss;
  }
  out.decoder.resize(n_dec);
  for (int i = 0; i < n_dec; ++i) {
    out.decoder[i] = dec_scores[i];
    if (dec_topo.is_output(i)) {
      for (auto& g : out.decoder[i]) g = -g;
    } else {
      for (auto& g : out.decoder[i]) g *= total_loss;
    }
  }
  return out;
}

}  // namespace neurojscc
