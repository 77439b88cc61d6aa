#include "neurojscc/experiment.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "neurojscc/dataset.hpp"
#include "neurojscc/errors.hpp"
#include "neurojscc/evaluation.hpp"

namespace neurojscc {

namespace {

/// Forward-only encoding pass; returns the output spike density.
double encode_density(SnnModel& encoder, const SpikeTensor& u, Rng& rng) {
  const auto& topo = encoder.topology();
  encoder.reset_state();
  long spikes = 0;
  for (int t = 0; t < u.num_steps(); ++t) {
    const auto r = encoder.step(u.column(t), std::nullopt, rng);
    for (int k = 0; k < topo.num_outputs; ++k) spikes += r.spikes[topo.output_neuron(k)];
  }
  return static_cast<double>(spikes) /
         (static_cast<double>(topo.num_outputs) * u.num_steps());
}

/// Mean encoder output density over a dataset (input density when uncoded).
double measure_encoder_density(SnnModel* encoder, const Dataset& data, Rng& rng) {
  if (data.empty()) throw DimensionError("density measurement: empty dataset");
  if (!encoder) {
    long spikes = 0;
    long cells = 0;
    for (const auto& ex : data) {
      spikes += ex.spikes.spike_count();
      cells += static_cast<long>(ex.spikes.num_signals()) * ex.spikes.num_steps();
    }
    return static_cast<double>(spikes) / static_cast<double>(cells);
  }
  double sum = 0.0;
  for (const auto& ex : data) sum += encode_density(*encoder, ex.spikes, rng);
  return sum / static_cast<double>(data.size());
}

std::uint64_t snr_stream_index(double snr_db) { return std::bit_cast<std::uint64_t>(snr_db); }

}  // namespace

std::pair<Dataset, Dataset> prepare_dataset(const ExperimentConfig& cfg) {
  Dataset data;
  if (cfg.dataset.type == DatasetConfig::Type::kSynthetic) {
    const auto& s = cfg.dataset.synthetic;
    data = generate_synthetic_dataset(s.num_classes, s.examples_per_class, s.d_u, s.num_steps,
                                      s.spike_density, s.jitter, derive_seed(cfg.seed, "dataset"));
  } else {
    data = load_dataset(cfg.dataset.path);
  }
  for (const auto& ex : data) {
    if (ex.spikes.num_signals() != cfg.topology.d_u) {
      throw ConfigError("dataset: example width " + std::to_string(ex.spikes.num_signals()) +
                        " does not match topology.d_u");
    }
    if (ex.label < 0 || ex.label >= cfg.topology.d_v) {
      throw ConfigError("dataset: label " + std::to_string(ex.label) +
                        " outside [0, d_v)");
    }
  }
  return split_dataset(data, cfg.training.train_fraction, derive_seed(cfg.seed, "split"));
}

TrainRunResult run_training(const ExperimentConfig& cfg) {
  cfg.validate();
  auto [train, test] = prepare_dataset(cfg);
  const int T = train.front().spikes.num_steps();

  std::unique_ptr<SnnModel> encoder;
  if (!cfg.training.uncoded) {
    encoder = build_encoder(cfg.topology, cfg.filters, derive_seed(cfg.seed, "enc-init"),
                            cfg.training.init_scale);
  }
  auto decoder = build_decoder(cfg.topology, cfg.filters, derive_seed(cfg.seed, "dec-init"),
                               cfg.training.init_scale);

  const bool gaussian = cfg.channel.type == ChannelConfig::Type::kGaussianQuantized;
  std::unique_ptr<GaussianQuantizedChannel> gauss;
  std::unique_ptr<IdentityChannel> identity;
  ChannelModel* channel = nullptr;
  if (gaussian) {
    gauss = std::make_unique<GaussianQuantizedChannel>(1.0, cfg.channel.threshold);
    channel = gauss.get();
  } else {
    identity = std::make_unique<IdentityChannel>();
    channel = identity.get();
  }

  // per-class target trains
  std::vector<SpikeTensor> targets;
  targets.reserve(cfg.topology.d_v);
  for (int c = 0; c < cfg.topology.d_v; ++c) {
    targets.push_back(target_spike_train(c, cfg.topology.d_v, T, cfg.training.target_rate));
  }

  if (encoder && cfg.training.encoder_bias_init != 0.0) {
    for (int i = 0; i < encoder->topology().num_neurons(); ++i) {
      encoder->params(i)[encoder->param_count(i) - 1] = cfg.training.encoder_bias_init;
    }
  }
  if (!cfg.training.train_output_feedback) {
    for (int k = 0; k < cfg.topology.d_v; ++k) {
      const int out = decoder->topology().output_neuron(k);
      decoder->params(out)[decoder->param_count(out) - 2] = 0.0;
    }
  }
  JsccTrainer trainer(encoder.get(), decoder.get(), channel,
                      cfg.hyperparams,
                      TrainOptions{cfg.training.reset_smoothing_per_example,
                                   cfg.training.carry_baseline_stats,
                                   cfg.training.train_output_feedback});

  Rng train_rng(derive_seed(cfg.seed, "train"));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<MetricsRow> metrics;
  const auto eval_now = [&](long iteration, std::optional<double> train_loss) {
    MetricsRow row;
    row.iteration = iteration;
    row.train_loss = train_loss;
    row.test_accuracy = evaluate_accuracy(
        encoder.get(), *decoder, *channel, test,
        derive_seed(cfg.seed, "eval", static_cast<std::uint64_t>(iteration)),
        cfg.training.inference_repeats);
    if (gaussian) {
      row.snr_db = cfg.channel.snr_db;
      row.sigma2 = gauss->sigma2();
    }
    row.rate = cfg.topology.rate;
    row.seed = cfg.seed;
    metrics.push_back(row);
  };

  double loss_window_sum = 0.0;
  long loss_window_count = 0;
  const long iterations = cfg.training.iterations;
  for (long iter = 0; iter < iterations; ++iter) {
    const long epoch = iter / static_cast<long>(train.size());
    if (iter % static_cast<long>(train.size()) == 0) {
      Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
      shuffle(order, shuffle_rng);
      if (gaussian && !cfg.training.per_example_calibration) {
        Rng calib_rng(derive_seed(cfg.seed, "calib", static_cast<std::uint64_t>(epoch)));
        const double rho = measure_encoder_density(encoder.get(), train, calib_rng);
        gauss->set_sigma2(sigma2_from_snr(cfg.channel.snr_db, rho));
      }
    }
    const auto& ex = train[order[iter % static_cast<long>(train.size())]];
    if (gaussian && cfg.training.per_example_calibration) {
      double rho;
      if (encoder) {
        Rng calib_rng(derive_seed(cfg.seed, "calib-ex", static_cast<std::uint64_t>(iter)));
        rho = encode_density(*encoder, ex.spikes, calib_rng);
      } else {
        rho = ex.spikes.density();
      }
      gauss->set_sigma2(sigma2_from_snr(cfg.channel.snr_db, rho));
    }

    const auto losses = trainer.train_example(ex.spikes, targets[ex.label], train_rng, iter);
    double total = 0.0;
    for (const double l : losses) total += l;
    if (!std::isfinite(total)) {
      throw DivergenceError("training loss is non-finite", iter);
    }
    loss_window_sum += total;
    ++loss_window_count;

    if ((iter + 1) % cfg.training.eval_cadence == 0 || iter + 1 == iterations) {
      eval_now(iter + 1, loss_window_sum / static_cast<double>(loss_window_count));
      loss_window_sum = 0.0;
      loss_window_count = 0;
    }
  }
  if (iterations == 0) eval_now(0, std::nullopt);

  TrainRunResult result;
  result.checkpoint.topology = cfg.topology;
  result.checkpoint.filters = cfg.filters;
  result.checkpoint.channel = cfg.channel;
  result.checkpoint.uncoded = cfg.training.uncoded;
  result.checkpoint.seed = cfg.seed;
  result.checkpoint.iterations_completed = iterations;
  {
    Rng density_rng(derive_seed(cfg.seed, "final-density"));
    result.checkpoint.encoder_density = measure_encoder_density(encoder.get(), train, density_rng);
  }
  if (gaussian) result.checkpoint.sigma2_last = gauss->sigma2();
  result.checkpoint.encoder = std::move(encoder);
  result.checkpoint.decoder = std::move(decoder);
  result.metrics = std::move(metrics);
  result.train = std::move(train);
  result.test = std::move(test);
  return result;
}

TrainRunResult run_uncoded_baseline(const ExperimentConfig& cfg) {
  if (!cfg.training.uncoded) {
    throw ConfigError("training.uncoded: must be true for the uncoded baseline");
  }
  return run_training(cfg);
}

EvalResult evaluate_checkpoint(const Checkpoint& ck, const Dataset& test_set,
                               int inference_repeats, std::optional<double> test_snr_db) {
  EvalResult res;
  std::unique_ptr<ChannelModel> channel;
  std::uint64_t eval_seed;
  if (test_snr_db) {
    channel = std::make_unique<GaussianQuantizedChannel>(
        sigma2_from_snr(*test_snr_db, ck.encoder_density),
        ck.channel.type == ChannelConfig::Type::kGaussianQuantized ? ck.channel.threshold : 0.5);
    res.sigma2 = static_cast<GaussianQuantizedChannel*>(channel.get())->sigma2();
    res.snr_db = *test_snr_db;
    eval_seed = derive_seed(ck.seed, "final-eval", snr_stream_index(*test_snr_db));
  } else if (ck.channel.type == ChannelConfig::Type::kGaussianQuantized) {
    if (!ck.sigma2_last) throw IoError("checkpoint: missing calibrated sigma2");
    channel = std::make_unique<GaussianQuantizedChannel>(*ck.sigma2_last, ck.channel.threshold);
    res.sigma2 = *ck.sigma2_last;
    res.snr_db = ck.channel.snr_db;
    eval_seed = derive_seed(ck.seed, "eval",
                            static_cast<std::uint64_t>(ck.iterations_completed));
  } else {
    channel = std::make_unique<IdentityChannel>();
    eval_seed = derive_seed(ck.seed, "eval",
                            static_cast<std::uint64_t>(ck.iterations_completed));
  }

  res.accuracy = evaluate_accuracy(ck.encoder.get(), *ck.decoder, *channel, test_set, eval_seed,
                                   inference_repeats);
  res.accuracy_per_step =
      time_to_accuracy(ck.encoder.get(), *ck.decoder, *channel, test_set, eval_seed);
  return res;
}

namespace {

/// Run one training job per list entry, jobs-wide.
void parallel_points(std::size_t count, int jobs, const std::function<void(std::size_t)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int width = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), count));
  std::vector<std::exception_ptr> errors(width);
  for (int w = 0; w < width; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) break;
          work(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<SnrSweepRow> snr_sweep(
    const ExperimentConfig& cfg, const std::vector<double>& snrs, int jobs,
    const std::function<void(std::size_t, const TrainRunResult&)>& per_point) {
  if (snrs.empty()) throw ConfigError("snr_sweep: SNR list is empty");
  if (cfg.channel.type != ChannelConfig::Type::kGaussianQuantized) {
    throw ConfigError("snr_sweep: requires a gaussian_quantized channel");
  }
  std::vector<SnrSweepRow> rows(snrs.size());
  std::vector<TrainRunResult> results(snrs.size());
  parallel_points(snrs.size(), jobs, [&](std::size_t i) {
    ExperimentConfig point = cfg;
    point.channel.snr_db = snrs[i];
    point.seed = derive_seed(cfg.seed, "snr-point", i);
    results[i] = run_training(point);
    const EvalResult ev =
        evaluate_checkpoint(results[i].checkpoint, results[i].test,
                            point.training.inference_repeats, snrs[i]);
    rows[i] = {snrs[i], ev.sigma2, ev.accuracy, point.seed};
  });
  if (per_point) {
    for (std::size_t i = 0; i < results.size(); ++i) per_point(i, results[i]);
  }
  return rows;
}

std::vector<MismatchRow> mismatch_matrix(
    const ExperimentConfig& cfg, const std::vector<double>& train_snrs,
    const std::vector<double>& test_snrs, int jobs,
    const std::function<void(std::size_t, const TrainRunResult&)>& per_point) {
  if (train_snrs.empty() || test_snrs.empty()) {
    throw ConfigError("mismatch_matrix: SNR lists must be nonempty");
  }
  if (cfg.channel.type != ChannelConfig::Type::kGaussianQuantized) {
    throw ConfigError("mismatch_matrix: requires a gaussian_quantized channel");
  }
  std::vector<MismatchRow> rows(train_snrs.size() * test_snrs.size());
  std::vector<TrainRunResult> results(train_snrs.size());
  parallel_points(train_snrs.size(), jobs, [&](std::size_t i) {
    ExperimentConfig point = cfg;
    point.channel.snr_db = train_snrs[i];
    point.seed = derive_seed(cfg.seed, "snr-point", i);
    results[i] = run_training(point);
    for (std::size_t j = 0; j < test_snrs.size(); ++j) {
      const EvalResult ev =
          evaluate_checkpoint(results[i].checkpoint, results[i].test,
                              point.training.inference_repeats, test_snrs[j]);
      rows[i * test_snrs.size() + j] =
          {train_snrs[i], test_snrs[j], ev.sigma2, ev.accuracy, point.seed};
    }
  });
  if (per_point) {
    for (std::size_t i = 0; i < results.size(); ++i) per_point(i, results[i]);
  }
  return rows;
}

}  // namespace neurojscc
