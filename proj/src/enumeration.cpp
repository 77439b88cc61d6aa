#include "neurojscc/enumeration.hpp"

#include <cmath>
#include <string>

#include "neurojscc/errors.hpp"

namespace neurojscc {

long count_stochastic_bits(const SnnModel* encoder, const SnnModel& decoder,
                           const ChannelModel& channel, int num_steps, int d_x) {
  const long per_step = (encoder ? encoder->topology().num_neurons() : 0) +
                        (channel.stochastic() ? channel.output_dim(d_x) : 0) +
                        decoder.topology().num_hidden;
  return per_step * num_steps;
}

namespace {

struct Layout {
  int n_enc = 0;
  int d_x = 0;
  int d_y = 0;
  int flips = 0;  // flip bits per step (0 for deterministic channels)
  int n_dec_hidden = 0;
  int per_step = 0;
  int T = 0;
};

Layout make_layout(const SnnModel* encoder, const SnnModel& decoder, const ChannelModel& channel,
                   const SpikeTensor& u, const SpikeTensor& v, int max_bits) {
  Layout lay;
  lay.T = u.num_steps();
  if (v.num_steps() != lay.T) throw DimensionError("enumeration: input/target step counts differ");
  lay.n_enc = encoder ? encoder->topology().num_neurons() : 0;
  lay.d_x = encoder ? encoder->topology().num_outputs : u.num_signals();
  lay.d_y = channel.output_dim(lay.d_x);
  lay.flips = channel.stochastic() ? lay.d_y : 0;
  lay.n_dec_hidden = decoder.topology().num_hidden;
  lay.per_step = lay.n_enc + lay.flips + lay.n_dec_hidden;
  const long bits = static_cast<long>(lay.per_step) * lay.T;
  if (bits > max_bits) {
    throw ConfigError("enumeration refused: " + std::to_string(bits) +
                      " stochastic variables exceed the limit of " + std::to_string(max_bits) +
                      " (" + std::to_string(lay.n_enc) + " encoder + " + std::to_string(lay.flips) +
                      " channel + " + std::to_string(lay.n_dec_hidden) + " decoder hidden per step, " +
                      std::to_string(lay.T) + " steps)");
  }
  return lay;
}

}  // namespace

void enumerate_trajectories(
    SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel, const SpikeTensor& u,
    const SpikeTensor& v, int max_bits,
    const std::function<void(const Trajectory&, double, double)>& visit) {
  const Layout lay = make_layout(encoder, decoder, channel, u, v, max_bits);
  const auto& dec_topo = decoder.topology();
  const long bits = static_cast<long>(lay.per_step) * lay.T;
  const std::uint64_t count = 1ULL << bits;

  for (std::uint64_t mask = 0; mask < count; ++mask) {
    Trajectory traj{SpikeTensor(std::max(1, lay.n_enc), lay.T), SpikeTensor(lay.d_y, lay.T),
                    SpikeTensor(dec_topo.num_neurons(), lay.T), encoder != nullptr};
    // decode the bit assignment
    long bit = 0;
    const auto take = [&](std::uint64_t m) { return (m >> bit++) & 1ULL; };
    for (int t = 0; t < lay.T; ++t) {
      for (int i = 0; i < lay.n_enc; ++i) traj.encoder_spikes.set(i, t, take(mask));
      if (lay.flips > 0) {
        for (int i = 0; i < lay.d_y; ++i) traj.channel_output.set(i, t, take(mask));
      }
      for (int i = 0; i < lay.n_dec_hidden; ++i) traj.decoder_spikes.set(i, t, take(mask));
      for (int k = 0; k < dec_topo.num_outputs; ++k) {
        traj.decoder_spikes.set(dec_topo.output_neuron(k), t, v.get(k, t));
      }
    }

    // replay for probability and loss
    if (encoder) encoder->reset_state();
    decoder.reset_state();
    double prob = 1.0;
    double loss = 0.0;
    for (int t = 0; t < lay.T; ++t) {
      std::vector<std::uint8_t> x_t(lay.d_x);
      if (encoder) {
        const auto& enc_topo = encoder->topology();
        for (int i = 0; i < lay.n_enc; ++i) {
          const double o = encoder->membrane_potential(i);
          prob *= std::exp(log_prob_from_potential(traj.encoder_spikes.get(i, t), o));
        }
        encoder->advance(u.column(t), traj.encoder_spikes.column(t));
        for (int k = 0; k < enc_topo.num_outputs; ++k) {
          x_t[k] = traj.encoder_spikes.get(enc_topo.output_neuron(k), t);
        }
      } else {
        const auto col = u.column(t);
        std::copy(col.begin(), col.end(), x_t.begin());
      }

      if (lay.flips > 0) {
        for (int i = 0; i < lay.d_y; ++i) {
          const double p_flip = channel.flip_probability(x_t[i]);
          const bool flipped = traj.channel_output.get(i, t) != (x_t[i] != 0);
          prob *= flipped ? p_flip : 1.0 - p_flip;
        }
      } else {
        // deterministic channel: y is forced to x
        for (int i = 0; i < lay.d_y; ++i) {
          traj.channel_output.set(i, t, x_t[i] != 0);
        }
      }

      for (int i = 0; i < dec_topo.num_neurons(); ++i) {
        const double o = decoder.membrane_potential(i);
        const std::uint8_t s = traj.decoder_spikes.get(i, t);
        if (dec_topo.is_output(i)) {
          loss += log_loss_from_potential(s, o);
        } else {
          prob *= std::exp(log_prob_from_potential(s, o));
        }
      }
      decoder.advance(traj.channel_output.column(t), traj.decoder_spikes.column(t));
    }
    visit(traj, prob, loss);
  }
}

OracleResult exact_gradient_oracle(SnnModel* encoder, SnnModel& decoder,
                                   const ChannelModel& channel, const SpikeTensor& u,
                                   const SpikeTensor& v, int max_bits) {
  const Layout lay = make_layout(encoder, decoder, channel, u, v, max_bits);
  const auto& dec_topo = decoder.topology();

  OracleResult res;
  res.grad_encoder.resize(lay.n_enc);
  for (int i = 0; i < lay.n_enc; ++i) res.grad_encoder[i].assign(encoder->param_count(i), 0.0);
  res.grad_decoder.resize(dec_topo.num_neurons());
  for (int i = 0; i < dec_topo.num_neurons(); ++i) {
    res.grad_decoder[i].assign(decoder.param_count(i), 0.0);
  }
  double marginal = 0.0;

  std::vector<std::vector<double>> enc_scores(lay.n_enc);
  std::vector<std::vector<double>> dec_scores(dec_topo.num_neurons());
  std::vector<double> grad;

  enumerate_trajectories(
      encoder, decoder, channel, u, v, max_bits,
      [&](const Trajectory& traj, double prob, double loss) {
        ++res.num_trajectories;
        res.total_probability += prob;
        res.expected_loss += prob * loss;
        marginal += prob * std::exp(-loss);

        // per-trajectory score sums, replayed independently of the visit
        for (int i = 0; i < lay.n_enc; ++i) enc_scores[i].assign(encoder->param_count(i), 0.0);
        for (int i = 0; i < dec_topo.num_neurons(); ++i) {
          dec_scores[i].assign(decoder.param_count(i), 0.0);
        }
        if (encoder) encoder->reset_state();
        decoder.reset_state();
        for (int t = 0; t < lay.T; ++t) {
          if (encoder) {
            for (int i = 0; i < lay.n_enc; ++i) {
              const double o = encoder->membrane_potential(i);
              grad.assign(enc_scores[i].size(), 0.0);
              encoder->log_prob_grad(i, traj.encoder_spikes.get(i, t), o, grad);
              for (std::size_t w = 0; w < grad.size(); ++w) enc_scores[i][w] += grad[w];
            }
            encoder->advance(u.column(t), traj.encoder_spikes.column(t));
          }
          for (int i = 0; i < dec_topo.num_neurons(); ++i) {
            const double o = decoder.membrane_potential(i);
            grad.assign(dec_scores[i].size(), 0.0);
            decoder.log_prob_grad(i, traj.decoder_spikes.get(i, t), o, grad);
            for (std::size_t w = 0; w < grad.size(); ++w) dec_scores[i][w] += grad[w];
          }
          decoder.advance(traj.channel_output.column(t), traj.decoder_spikes.column(t));
        }

        // dL = sum_traj [ dP * loss + P * d loss ]: score terms for the
        // sampled neurons, plain loss gradients for the clamped outputs
        for (int i = 0; i < lay.n_enc; ++i) {
          for (std::size_t w = 0; w < enc_scores[i].size(); ++w) {
            res.grad_encoder[i][w] += prob * loss * enc_scores[i][w];
          }
        }
        for (int i = 0; i < dec_topo.num_neurons(); ++i) {
          for (std::size_t w = 0; w < dec_scores[i].size(); ++w) {
            res.grad_decoder[i][w] += dec_topo.is_output(i)
                                          ? prob * (-dec_scores[i][w])
                                          : prob * loss * dec_scores[i][w];
          }
        }
      });

  res.neg_log_marginal = -std::log(marginal);
  return res;
}

}  // namespace neurojscc
