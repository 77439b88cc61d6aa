// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run through ctest as `acceptance` or directly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "neurojscc/dataset.hpp"
#include "neurojscc/enumeration.hpp"
#include "neurojscc/experiment.hpp"

using namespace neurojscc;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool pass, const std::string& detail) {
  std::printf("%s criterion-%d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, what,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

SpikeTensor pattern(int d, int T, std::uint64_t seed, double density = 0.5) {
  Rng rng(seed);
  SpikeTensor s(d, T);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < d; ++j) s.set(j, t, rng.bernoulli(density));
  }
  return s;
}

// ---------------------------------------------------------------- criterion 1
// Probability-weighted mean of the stochastic update (baselines off, no
// smoothing) against the enumeration oracle's exact gradient on the tiny
// end-to-end network, coordinate-wise within 1e-8.
void criterion_1() {
  SnnModel encoder(NetworkTopology::fully_connected(1, 0, 1), FilterBank::raised_cosine(2, 3));
  SnnModel decoder(NetworkTopology::fully_connected(1, 1, 1), FilterBank::raised_cosine(2, 3));
  encoder.init_params(31, 1.2);
  decoder.init_params(32, 1.2);
  IdentityChannel channel;
  const auto u = pattern(1, 3, 32);
  const auto v = pattern(1, 3, 33, 1.0);

  const auto oracle = exact_gradient_oracle(&encoder, decoder, channel, u, v);

  std::vector<std::vector<double>> mean_enc{std::vector<double>(encoder.param_count(0), 0.0)};
  std::vector<std::vector<double>> mean_dec{std::vector<double>(decoder.param_count(0), 0.0),
                                            std::vector<double>(decoder.param_count(1), 0.0)};
  enumerate_trajectories(&encoder, decoder, channel, u, v, 20,
                         [&](const Trajectory& traj, double prob, double) {
                           const auto upd =
                               reinforce_trajectory_update(&encoder, decoder, u, traj);
                           for (std::size_t w = 0; w < mean_enc[0].size(); ++w) {
                             mean_enc[0][w] += prob * upd.encoder[0][w];
                           }
                           for (int i = 0; i < 2; ++i) {
                             for (std::size_t w = 0; w < mean_dec[i].size(); ++w) {
                               mean_dec[i][w] += prob * upd.decoder[i][w];
                             }
                           }
                         });

  double worst = 0.0;
  for (std::size_t w = 0; w < mean_enc[0].size(); ++w) {
    worst = std::max(worst, std::abs(mean_enc[0][w] - oracle.grad_encoder[0][w]));
  }
  for (int i = 0; i < 2; ++i) {
    for (std::size_t w = 0; w < mean_dec[i].size(); ++w) {
      worst = std::max(worst, std::abs(mean_dec[i][w] - oracle.grad_decoder[i][w]));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max coordinate deviation %.3e (tolerance 1e-8)", worst);
  report(1, "score-function estimator mean equals the exact gradient", worst <= 1e-8, buf);
}

// ---------------------------------------------------------------- criterion 2
// Analytic log-prob gradients vs central finite differences of the sequence
// log probability on 50 random tiny networks, relative error <= 1e-5.
void criterion_2() {
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t seed = 1000 + trial;
    Rng topo_rng(seed);
    const int d_in = 1 + static_cast<int>(topo_rng.below(3));
    const int n_hidden = static_cast<int>(topo_rng.below(2));
    const int n_out = 1 + static_cast<int>(topo_rng.below(2));
    const int T = 3 + static_cast<int>(topo_rng.below(3));

    SnnModel model(NetworkTopology::fully_connected(d_in, n_hidden, n_out),
                   FilterBank::raised_cosine(2, 3));
    model.init_params(seed, 1.0);
    const auto inputs = pattern(d_in, T, seed * 3 + 1);
    const auto spikes = pattern(model.topology().num_neurons(), T, seed * 3 + 2);

    std::vector<std::vector<double>> analytic(model.topology().num_neurons());
    for (int i = 0; i < model.topology().num_neurons(); ++i) {
      analytic[i].assign(model.param_count(i), 0.0);
    }
    SnnModel replay = model;
    replay.reset_state();
    std::vector<double> grad;
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < model.topology().num_neurons(); ++i) {
        const double o = replay.membrane_potential(i);
        grad.assign(model.param_count(i), 0.0);
        replay.log_prob_grad(i, spikes.get(i, t), o, grad);
        for (std::size_t w = 0; w < grad.size(); ++w) analytic[i][w] += grad[w];
      }
      replay.advance(inputs.column(t), spikes.column(t));
    }

    const double h = 1e-6;
    for (int i = 0; i < model.topology().num_neurons(); ++i) {
      for (int w = 0; w < model.param_count(i); ++w) {
        SnnModel plus = model;
        SnnModel minus = model;
        plus.params(i)[w] += h;
        minus.params(i)[w] -= h;
        const double fd =
            (plus.sequence_log_prob(spikes, inputs) - minus.sequence_log_prob(spikes, inputs)) /
            (2.0 * h);
        const double scale = std::max({std::abs(fd), std::abs(analytic[i][w]), 1e-3});
        worst = std::max(worst, std::abs(fd - analytic[i][w]) / scale);
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst relative error %.3e over 50 nets (tolerance 1e-5)",
                worst);
  report(2, "analytic gradients match finite differences", worst <= 1e-5, buf);
}

// ---------------------------------------------------------------- criterion 3
// Enumerated trajectory probabilities (network x channel) sum to 1 +- 1e-10
// on a 12-binary-variable instance.
void criterion_3() {
  SnnModel encoder(NetworkTopology::fully_connected(1, 1, 1), FilterBank::raised_cosine(2, 3));
  SnnModel decoder(NetworkTopology::fully_connected(1, 1, 1), FilterBank::raised_cosine(2, 3));
  encoder.init_params(5, 1.3);
  decoder.init_params(6, 1.3);
  GaussianQuantizedChannel channel(0.49);
  const auto u = pattern(1, 3, 7);
  const auto v = pattern(1, 3, 8, 1.0);

  const auto res = exact_gradient_oracle(&encoder, decoder, channel, u, v, 12);
  const double dev = std::abs(res.total_probability - 1.0);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "|1 - sum| = %.3e over %ld trajectories (tolerance 1e-10)", dev,
                res.num_trajectories);
  report(3, "trajectory probabilities are normalized", dev <= 1e-10, buf);
}

// ---------------------------------------------------------------- criterion 4
// Quantized-AWGN flip rates vs 1 - Phi(0.5 / sigma) at sigma in
// {0.25, 0.5, 1.0}, 1e6 draws each, within 3 binomial standard errors.
void criterion_4() {
  bool pass = true;
  std::string detail;
  const int n = 1000000;
  for (const double sigma : {0.25, 0.5, 1.0}) {
    GaussianQuantizedChannel ch(sigma * sigma);
    const double p = 1.0 - normal_cdf(0.5 / sigma);
    for (const int bit : {0, 1}) {
      SpikeTensor x(1, 1);
      x.set(0, 0, bit != 0);
      SpikeTensor y(1, 1);
      Rng rng(777 + static_cast<std::uint64_t>(sigma * 100) + bit);
      long flips = 0;
      for (int i = 0; i < n; ++i) {
        ch.step(x, 0, y, y.column(0), rng);
        flips += (y.get(0, 0) != (bit != 0)) ? 1 : 0;
      }
      const double emp = static_cast<double>(flips) / n;
      const double se = std::sqrt(p * (1.0 - p) / n);
      if (std::abs(emp - p) > 3.0 * se) pass = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), " s=%.2f/x=%d: %.5f vs %.5f;", sigma, bit, emp, p);
      detail += buf;
    }
  }
  report(4, "channel flip statistics match the gaussian tail", pass, detail);
}

// ---------------------------------------------------------------- criterion 5
// Desk-scale end-to-end learning on the synthetic task. The iteration budget
// was fixed by a 10-seed calibration campaign (seeds 1..10): noiseless
// median 1.00 at 24000 iterations; acceptance uses fresh seeds 101..110.
constexpr long kBudgetNoiseless = 24000;
constexpr long kBudget0dB = 24000;  // pinned after calibration, see below

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.dataset.synthetic = {2, 40, 16, 20, 0.2, 0.05};
  cfg.topology = {16, 1.0, 0, 16, 2};
  cfg.training.eval_cadence = 1000000;  // final evaluation only
  return cfg;
}

void criterion_5() {
  {  // noiseless half: >= 0.90 on >= 8/10 fresh seeds within the budget
    auto cfg = desk_config();
    cfg.channel.type = ChannelConfig::Type::kIdentity;
    cfg.training.iterations = kBudgetNoiseless;
    int hits = 0;
    std::string accs;
    for (int s = 101; s <= 110; ++s) {
      cfg.seed = s;
      const auto run = run_training(cfg);
      const double acc = run.metrics.back().test_accuracy;
      hits += acc >= 0.90 ? 1 : 0;
      char buf[16];
      std::snprintf(buf, sizeof(buf), " %.2f", acc);
      accs += buf;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d/10 fresh seeds >= 0.90 at %ld iterations:%s", hits,
                  kBudgetNoiseless, accs.c_str());
    report(5, "noiseless desk-scale learning", hits >= 8, buf);
  }
  {  // 0 dB half with the relaxed 0.85 bar
    auto cfg = desk_config();
    cfg.channel.type = ChannelConfig::Type::kGaussianQuantized;
    cfg.channel.snr_db = 0.0;
    cfg.training.iterations = kBudget0dB;
    int hits = 0;
    std::string accs;
    for (int s = 101; s <= 110; ++s) {
      cfg.seed = s;
      const auto run = run_training(cfg);
      const double acc = run.metrics.back().test_accuracy;
      hits += acc >= 0.85 ? 1 : 0;
      char buf[16];
      std::snprintf(buf, sizeof(buf), " %.2f", acc);
      accs += buf;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d/10 fresh seeds >= 0.85 at %ld iterations:%s", hits,
                  kBudget0dB, accs.c_str());
    report(5, "0 dB desk-scale learning", hits >= 8, buf);
  }
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
  std::printf("SKIP criterion-6: full-scale MNIST-DVS reproduction is opt-in "
              "(external dataset, hours of runtime); see scripts/reproduce_mnist_dvs.sh\n");
}

// ---------------------------------------------------------------- criterion 7
// Mismatch robustness: train at the lowest SNR of {-6,-3,0,+6} dB, evaluate
// at each higher SNR; the median accuracy drop over 5 seeds must not exceed
// 3 points.
void criterion_7() {
  auto cfg = desk_config();
  cfg.channel.type = ChannelConfig::Type::kGaussianQuantized;
  cfg.channel.snr_db = -6.0;
  cfg.training.iterations = kBudget0dB;

  const std::vector<double> test_snrs{-3.0, 0.0, 6.0};
  std::vector<std::vector<double>> drops(test_snrs.size());
  for (int s = 1; s <= 5; ++s) {
    cfg.seed = 200 + s;
    const auto run = run_training(cfg);
    const auto ref = evaluate_checkpoint(run.checkpoint, run.test, 1, -6.0);
    for (std::size_t j = 0; j < test_snrs.size(); ++j) {
      const auto ev = evaluate_checkpoint(run.checkpoint, run.test, 1, test_snrs[j]);
      drops[j].push_back(ev.accuracy - ref.accuracy);
    }
  }
  bool pass = true;
  std::string detail;
  for (std::size_t j = 0; j < test_snrs.size(); ++j) {
    std::sort(drops[j].begin(), drops[j].end());
    const double median = drops[j][2];
    if (median < -0.03 - 1e-12) pass = false;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %+.0fdB: median drop %+.3f;", test_snrs[j], median);
    detail += buf;
  }
  report(7, "models trained at low SNR hold up at higher SNR", pass, detail);
}

// ---------------------------------------------------------------- criterion 8
// Smoothing recursions match closed-form unrollings exactly.
void criterion_8() {
  Rng rng(88);
  const double kappa = 0.375;
  const double kappa2 = 0.25;
  double l = 0.0;
  std::vector<double> e(4, 0.0);
  std::vector<double> delta(4, 0.0);
  std::vector<double> l_hist;
  std::vector<std::vector<double>> g_hist;
  bool exact = true;
  for (int t = 0; t < 25; ++t) {
    const double step_loss = rng.uniform01() * 3.0;
    std::vector<double> g(4);
    for (auto& x : g) x = rng.gaussian(1.0);
    l = learning_signal_update(l, step_loss, kappa);
    eligibility_update(e, g, kappa);
    const std::vector<double> b(4, 0.0);
    delta_update_stochastic(delta, l, b, e, kappa2);
    l_hist.push_back(step_loss);
    g_hist.push_back(g);

    double l_ref = 0.0;
    std::vector<double> e_ref(4, 0.0);
    std::vector<double> d_ref(4, 0.0);
    for (std::size_t j = 0; j < l_hist.size(); ++j) {
      l_ref = kappa * l_ref + (1.0 - kappa) * l_hist[j];
      for (int c = 0; c < 4; ++c) {
        e_ref[c] = kappa * e_ref[c] + (1.0 - kappa) * g_hist[j][c];
        d_ref[c] = kappa2 * d_ref[c] + (1.0 - kappa2) * l_ref * e_ref[c];
      }
    }
    if (l != l_ref) exact = false;
    for (int c = 0; c < 4; ++c) {
      if (e[c] != e_ref[c] || delta[c] != d_ref[c]) exact = false;
    }
  }
  // observed-output branch: delta = -e regardless of the rest
  std::vector<double> d_obs(4, 123.0);
  delta_update_observed(d_obs, e);
  for (int c = 0; c < 4; ++c) {
    if (d_obs[c] != -e[c]) exact = false;
  }
  report(8, "smoothing recursions are exactly their closed forms", exact,
         exact ? "bit-for-bit over 25 random steps" : "mismatch found");
}

// ---------------------------------------------------------------- criterion 9
// Identical manifest -> byte-identical metrics logs across two runs.
void criterion_9() {
  const fs::path dir =
      fs::temp_directory_path() / ("neurojscc_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  auto cfg = desk_config();
  cfg.channel.type = ChannelConfig::Type::kGaussianQuantized;
  cfg.channel.snr_db = 3.0;
  cfg.training.iterations = 400;
  cfg.training.eval_cadence = 100;
  cfg.seed = 9;

  const auto run1 = run_training(cfg);
  write_metrics_jsonl((dir / "m1.jsonl").string(), run1.metrics, cfg.hyperparams);
  write_manifest((dir / "manifest.json").string(), cfg, {(dir / "m1.jsonl").string()});

  // reload the config from the manifest, rerun, compare bytes
  const auto cfg2 = load_config((dir / "manifest.json").string());
  const auto run2 = run_training(cfg2);
  write_metrics_jsonl((dir / "m2.jsonl").string(), run2.metrics, cfg2.hyperparams);

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  };
  const std::string a = slurp(dir / "m1.jsonl");
  const std::string b = slurp(dir / "m2.jsonl");
  const bool pass = !a.empty() && a == b;
  report(9, "manifest reruns reproduce metrics byte for byte", pass,
         pass ? std::to_string(a.size()) + " identical bytes" : "metrics differ");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures > 0) {
    std::printf("%d criterion check(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criterion checks passed\n");
  return 0;
}
