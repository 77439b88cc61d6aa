#include "neurojscc/evaluation.hpp"

#include <algorithm>

#include "neurojscc/errors.hpp"

namespace neurojscc {

ClassificationResult rate_decode(const SpikeTensor& outputs, int horizon) {
  if (horizon < 1 || horizon > outputs.num_steps()) {
    throw DimensionError("rate_decode: horizon out of range");
  }
  ClassificationResult res;
  res.spike_counts.assign(outputs.num_signals(), 0);
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < outputs.num_signals(); ++j) {
      if (outputs.get(j, t)) ++res.spike_counts[j];
    }
  }
  long best = -1;
  for (int j = 0; j < outputs.num_signals(); ++j) {
    if (res.spike_counts[j] > best) {
      best = res.spike_counts[j];
      res.predicted_class = j;
    }
  }
  res.no_spikes = (best == 0);
  return res;
}

SpikeTensor run_inference(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                          const SpikeTensor& u, Rng& rng) {
  const int T = u.num_steps();
  const int d_x = encoder ? encoder->topology().num_outputs : u.num_signals();
  const int d_y = channel.output_dim(d_x);
  const auto& dec_topo = decoder.topology();
  if (dec_topo.num_inputs != d_y) {
    throw DimensionError("run_inference: decoder input width != channel output width");
  }

  if (encoder) encoder->reset_state();
  decoder.reset_state();

  SpikeTensor x(d_x, T);
  SpikeTensor y(d_y, T);
  SpikeTensor outputs(dec_topo.num_outputs, T);
  for (int t = 0; t < T; ++t) {
    if (encoder) {
      const auto enc = encoder->step(u.column(t), std::nullopt, rng);
      const auto& enc_topo = encoder->topology();
      for (int k = 0; k < enc_topo.num_outputs; ++k) {
        x.column(t)[k] = enc.spikes[enc_topo.output_neuron(k)];
      }
    } else {
      const auto col = u.column(t);
      std::copy(col.begin(), col.end(), x.column(t).begin());
    }
    channel.step(x, t, y, y.column(t), rng);
    const auto dec = decoder.step(y.column(t), std::nullopt, rng);
    for (int k = 0; k < dec_topo.num_outputs; ++k) {
      outputs.set(k, t, dec.spikes[dec_topo.output_neuron(k)] != 0);
    }
  }
  return outputs;
}

int classify_example(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                     const SpikeTensor& u, std::uint64_t seed, int repeats) {
  const int d_v = decoder.topology().num_outputs;
  std::vector<int> votes(d_v, 0);
  for (int r = 0; r < repeats; ++r) {
    Rng rng(repeats == 1 ? seed : derive_seed(seed, "repeat", static_cast<std::uint64_t>(r)));
    const SpikeTensor outputs = run_inference(encoder, decoder, channel, u, rng);
    ++votes[rate_decode(outputs, outputs.num_steps()).predicted_class];
  }
  int best = 0;
  for (int c = 1; c < d_v; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

double evaluate_accuracy(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                         const Dataset& test_set, std::uint64_t eval_seed, int repeats) {
  if (test_set.empty()) throw DimensionError("evaluate_accuracy: empty test set");
  long correct = 0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const auto seed = derive_seed(eval_seed, "example", static_cast<std::uint64_t>(i));
    if (classify_example(encoder, decoder, channel, test_set[i].spikes, seed, repeats) ==
        test_set[i].label) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

std::vector<double> time_to_accuracy(SnnModel* encoder, SnnModel& decoder,
                                     const ChannelModel& channel, const Dataset& test_set,
                                     std::uint64_t eval_seed) {
  if (test_set.empty()) throw DimensionError("time_to_accuracy: empty test set");
  const int T = test_set.front().spikes.num_steps();
  std::vector<long> correct(T, 0);
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    Rng rng(derive_seed(eval_seed, "example", static_cast<std::uint64_t>(i)));
    const SpikeTensor outputs = run_inference(encoder, decoder, channel, test_set[i].spikes, rng);
    for (int t = 1; t <= T; ++t) {
      if (rate_decode(outputs, t).predicted_class == test_set[i].label) ++correct[t - 1];
    }
  }
  std::vector<double> acc(T);
  for (int t = 0; t < T; ++t) {
    acc[t] = static_cast<double>(correct[t]) / static_cast<double>(test_set.size());
  }
  return acc;
}

}  // namespace neurojscc
