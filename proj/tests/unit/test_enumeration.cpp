#include <doctest.h>

#include <cmath>

#include "neurojscc/dataset.hpp"
#include "neurojscc/enumeration.hpp"

using namespace neurojscc;

namespace {

FilterBank bank() { return FilterBank::raised_cosine(2, 3); }

SpikeTensor pattern(int d, int T, std::uint64_t seed, double density = 0.5) {
  Rng rng(seed);
  SpikeTensor s(d, T);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < d; ++j) s.set(j, t, rng.bernoulli(density));
  }
  return s;
}

/// 1 exogeneous input -> 1 encoder output neuron -> channel -> decoder with
/// 1 hidden + 1 output neuron.
struct TinyNet {
  SnnModel encoder;
  SnnModel decoder;
  TinyNet(std::uint64_t seed, double scale)
      : encoder(NetworkTopology::fully_connected(1, 0, 1), bank()),
        decoder(NetworkTopology::fully_connected(1, 1, 1), bank()) {
    encoder.init_params(seed, scale);
    decoder.init_params(seed + 1, scale);
  }
};

}  // namespace

TEST_CASE("stochastic bit counting and the size guard") {
  TinyNet net(1, 1.0);
  IdentityChannel identity;
  GaussianQuantizedChannel noisy(0.25);
  CHECK(count_stochastic_bits(&net.encoder, net.decoder, identity, 3, 1) == 6);
  CHECK(count_stochastic_bits(&net.encoder, net.decoder, noisy, 3, 1) == 9);
  CHECK(count_stochastic_bits(nullptr, net.decoder, noisy, 4, 1) == 8);

  const auto u = pattern(1, 30, 2);
  const auto v = pattern(1, 30, 3, 1.0);
  try {
    exact_gradient_oracle(&net.encoder, net.decoder, identity, u, v);
    FAIL("expected a size refusal");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("60") != std::string::npos);  // the size report names the count
  }
}

TEST_CASE("trajectory probabilities sum to one (network x channel)") {
  // per step: 2 encoder neurons + 1 channel flip + 1 decoder hidden, T = 3
  SnnModel encoder(NetworkTopology::fully_connected(1, 1, 1), bank());
  SnnModel decoder(NetworkTopology::fully_connected(1, 1, 1), bank());
  encoder.init_params(5, 1.3);
  decoder.init_params(6, 1.3);
  GaussianQuantizedChannel channel(0.49);

  const auto u = pattern(1, 3, 7);
  const auto v = pattern(1, 3, 8, 1.0);
  const auto res = exact_gradient_oracle(&encoder, decoder, channel, u, v, 12);
  CHECK(res.num_trajectories == (1 << 12));
  CHECK(std::abs(res.total_probability - 1.0) <= 1e-10);
}

TEST_CASE("oracle upper-bounds the exact negative log marginal") {
  TinyNet net(11, 1.1);
  GaussianQuantizedChannel channel(0.36);
  const auto u = pattern(1, 3, 12);
  const auto v = pattern(1, 3, 13, 1.0);
  const auto res = exact_gradient_oracle(&net.encoder, net.decoder, channel, u, v);
  CHECK(res.expected_loss >= res.neg_log_marginal - 1e-12);
  // strict gap in the generic stochastic case
  CHECK(res.expected_loss > res.neg_log_marginal);
}

TEST_CASE("oracle gradient equals central finite differences of L(theta)") {
  TinyNet net(21, 0.9);
  GaussianQuantizedChannel channel(0.42);
  const auto u = pattern(1, 2, 22);
  const auto v = pattern(1, 2, 23, 1.0);

  const auto base = exact_gradient_oracle(&net.encoder, net.decoder, channel, u, v);
  const double h = 1e-6;

  const auto fd_check = [&](bool enc_side, int neuron, int w, double analytic) {
    TinyNet plus = net;
    TinyNet minus = net;
    auto& mp = enc_side ? plus.encoder : plus.decoder;
    auto& mm = enc_side ? minus.encoder : minus.decoder;
    mp.params(neuron)[w] += h;
    mm.params(neuron)[w] -= h;
    const double lp =
        exact_gradient_oracle(&plus.encoder, plus.decoder, channel, u, v).expected_loss;
    const double lm =
        exact_gradient_oracle(&minus.encoder, minus.decoder, channel, u, v).expected_loss;
    const double fd = (lp - lm) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-4});
    CHECK(std::abs(fd - analytic) / scale <= 1e-4);
  };

  for (int w = 0; w < net.encoder.param_count(0); ++w) {
    fd_check(true, 0, w, base.grad_encoder[0][w]);
  }
  for (int i = 0; i < 2; ++i) {
    for (int w = 0; w < net.decoder.param_count(i); ++w) {
      fd_check(false, i, w, base.grad_decoder[i][w]);
    }
  }
}

TEST_CASE("probability-weighted mean of the unsmoothed update equals the oracle gradient") {
  // the reference tiny network: 1 input, 1 encoder output, identity channel,
  // 1 decoder hidden, 1 decoder output, T = 3
  TinyNet net(31, 1.2);
  IdentityChannel channel;
  const auto u = pattern(1, 3, 32);
  const auto v = pattern(1, 3, 33, 1.0);

  const auto oracle = exact_gradient_oracle(&net.encoder, net.decoder, channel, u, v);
  CHECK(std::abs(oracle.total_probability - 1.0) <= 1e-10);

  std::vector<double> mean_enc(net.encoder.param_count(0), 0.0);
  std::vector<std::vector<double>> mean_dec{
      std::vector<double>(net.decoder.param_count(0), 0.0),
      std::vector<double>(net.decoder.param_count(1), 0.0)};
  enumerate_trajectories(&net.encoder, net.decoder, channel, u, v, 20,
                         [&](const Trajectory& traj, double prob, double) {
                           const auto upd =
                               reinforce_trajectory_update(&net.encoder, net.decoder, u, traj);
                           for (std::size_t w = 0; w < mean_enc.size(); ++w) {
                             mean_enc[w] += prob * upd.encoder[0][w];
                           }
                           for (int i = 0; i < 2; ++i) {
                             for (std::size_t w = 0; w < mean_dec[i].size(); ++w) {
                               mean_dec[i][w] += prob * upd.decoder[i][w];
                             }
                           }
                         });

  for (std::size_t w = 0; w < mean_enc.size(); ++w) {
    CHECK(std::abs(mean_enc[w] - oracle.grad_encoder[0][w]) <= 1e-8);
  }
  for (int i = 0; i < 2; ++i) {
    for (std::size_t w = 0; w < mean_dec[i].size(); ++w) {
      CHECK(std::abs(mean_dec[i][w] - oracle.grad_decoder[i][w]) <= 1e-8);
    }
  }
}

TEST_CASE("uncoded identity-channel oracle is the plain analytic loss gradient") {
  // no stochastic variables at all: a decoder with no hidden neurons fed by u
  SnnModel decoder(NetworkTopology::fully_connected(2, 0, 1), bank());
  decoder.init_params(41, 1.0);
  IdentityChannel channel;
  const auto u = pattern(2, 3, 42);
  const auto v = pattern(1, 3, 43, 1.0);

  const auto res = exact_gradient_oracle(nullptr, decoder, channel, u, v);
  CHECK(res.num_trajectories == 1);
  CHECK(res.total_probability == doctest::Approx(1.0));
  CHECK(res.expected_loss == doctest::Approx(res.neg_log_marginal));

  // direct replay of sum_t d/dtheta of the output BCE
  SnnModel replay = decoder;
  replay.reset_state();
  std::vector<double> direct(decoder.param_count(0), 0.0);
  std::vector<double> g(decoder.param_count(0));
  for (int t = 0; t < 3; ++t) {
    const double o = replay.membrane_potential(0);
    replay.log_prob_grad(0, v.get(0, t), o, g);
    for (std::size_t w = 0; w < g.size(); ++w) direct[w] -= g[w];
    const std::vector<std::uint8_t> spikes{v.get(0, t) ? std::uint8_t{1} : std::uint8_t{0}};
    replay.advance(u.column(t), spikes);
  }
  for (std::size_t w = 0; w < direct.size(); ++w) {
    CHECK(res.grad_decoder[0][w] == doctest::Approx(direct[w]).epsilon(1e-12));
  }
}

TEST_CASE("expected score is zero, so constant baselines cannot bias the update") {
  TinyNet net(51, 1.0);
  GaussianQuantizedChannel channel(0.3);
  const auto u = pattern(1, 2, 52);
  const auto v = pattern(1, 2, 53, 1.0);

  std::vector<double> mean_score_enc(net.encoder.param_count(0), 0.0);
  std::vector<double> mean_score_hidden(net.decoder.param_count(0), 0.0);
  enumerate_trajectories(
      &net.encoder, net.decoder, channel, u, v, 20,
      [&](const Trajectory& traj, double prob, double) {
        const auto upd = reinforce_trajectory_update(&net.encoder, net.decoder, u, traj);
        REQUIRE(upd.total_loss > 0.0);
        // the stochastic update is loss * score; divide the loss back out
        for (std::size_t w = 0; w < mean_score_enc.size(); ++w) {
          mean_score_enc[w] += prob * upd.encoder[0][w] / upd.total_loss;
        }
        for (std::size_t w = 0; w < mean_score_hidden.size(); ++w) {
          mean_score_hidden[w] += prob * upd.decoder[0][w] / upd.total_loss;
        }
      });
  for (const double s : mean_score_enc) CHECK(std::abs(s) <= 1e-10);
  for (const double s : mean_score_hidden) CHECK(std::abs(s) <= 1e-10);
}

TEST_CASE("adaptive baseline: unbiased within noise and variance-reducing") {
  TinyNet net(61, 1.4);
  GaussianQuantizedChannel channel(0.5);
  const auto u = pattern(1, 3, 62);
  const auto v = pattern(1, 3, 63, 1.0);

  const int n_coords = net.encoder.param_count(0) + net.decoder.param_count(0);
  std::vector<double> upd_flat;
  const auto flatten = [&](const TrajectoryUpdate& upd) {
    upd_flat.clear();
    upd_flat.insert(upd_flat.end(), upd.encoder[0].begin(), upd.encoder[0].end());
    upd_flat.insert(upd_flat.end(), upd.decoder[0].begin(), upd.decoder[0].end());
  };

  // warmup: estimate b = <l e^2> / <e^2> over sampled trajectories, then
  // freeze it so it is state-independent across the measured batch
  Rng rng(64);
  std::vector<double> e2(n_coords, 0.0);
  std::vector<double> le2(n_coords, 0.0);
  for (int n = 0; n < 2000; ++n) {
    const auto traj = sample_trajectory(&net.encoder, net.decoder, channel, u, v, rng);
    const auto upd = reinforce_trajectory_update(&net.encoder, net.decoder, u, traj);
    flatten(upd);
    for (int c = 0; c < n_coords; ++c) {
      const double score = upd_flat[c] / upd.total_loss;
      e2[c] = 0.9 * e2[c] + 0.1 * score * score;
      le2[c] = 0.9 * le2[c] + 0.1 * upd.total_loss * score * score;
    }
  }
  std::vector<double> baseline(n_coords, 0.0);
  for (int c = 0; c < n_coords; ++c) baseline[c] = e2[c] > 0.0 ? le2[c] / e2[c] : 0.0;

  const int N = 100000;
  std::vector<double> sum_plain(n_coords, 0.0), sum2_plain(n_coords, 0.0);
  std::vector<double> sum_base(n_coords, 0.0), sum2_base(n_coords, 0.0);
  std::vector<double> sum_diff(n_coords, 0.0), sum2_diff(n_coords, 0.0);
  for (int n = 0; n < N; ++n) {
    const auto traj = sample_trajectory(&net.encoder, net.decoder, channel, u, v, rng);
    const auto upd = reinforce_trajectory_update(&net.encoder, net.decoder, u, traj);
    flatten(upd);
    for (int c = 0; c < n_coords; ++c) {
      const double score = upd_flat[c] / upd.total_loss;
      const double plain = upd_flat[c];
      const double based = (upd.total_loss - baseline[c]) * score;
      const double diff = plain - based;  // = b * score, mean zero
      sum_plain[c] += plain;
      sum2_plain[c] += plain * plain;
      sum_base[c] += based;
      sum2_base[c] += based * based;
      sum_diff[c] += diff;
      sum2_diff[c] += diff * diff;
    }
  }

  int reduced = 0;
  for (int c = 0; c < n_coords; ++c) {
    const double mean_diff = sum_diff[c] / N;
    const double var_diff = sum2_diff[c] / N - mean_diff * mean_diff;
    const double se = std::sqrt(std::max(var_diff, 0.0) / N);
    CHECK(std::abs(mean_diff) <= 3.0 * se + 1e-12);

    const double var_plain = sum2_plain[c] / N - (sum_plain[c] / N) * (sum_plain[c] / N);
    const double var_base = sum2_base[c] / N - (sum_base[c] / N) * (sum_base[c] / N);
    if (var_base < var_plain) ++reduced;
  }
  CHECK(reduced * 10 >= n_coords * 9);  // at least 90% of coordinates
}
