#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "neurojscc/checkpoint.hpp"
#include "neurojscc/metrics.hpp"

namespace neurojscc {

/// Dataset construction + stratified split exactly as run_training performs
/// them, so separate evaluation sees the same test set.
std::pair<Dataset, Dataset> prepare_dataset(const ExperimentConfig& cfg);

struct TrainRunResult {
  Checkpoint checkpoint;
  std::vector<MetricsRow> metrics;
  Dataset train;
  Dataset test;
};

/// Full training run per the experiment config: online rule over shuffled
/// examples, per-epoch SNR recalibration, periodic test evaluation.
/// Deterministic given the config (all random streams derive from its seed).
TrainRunResult run_training(const ExperimentConfig& cfg);

/// Uncoded transmission baseline: x_t := u_t, decoder-only training.
/// The config must have training.uncoded = true and rate 1.
TrainRunResult run_uncoded_baseline(const ExperimentConfig& cfg);

struct EvalResult {
  double accuracy = 0.0;
  double sigma2 = 0.0;
  std::optional<double> snr_db;
  std::vector<double> accuracy_per_step;
};

/// Evaluate a trained checkpoint. With test_snr_db set, the noise power is
/// recalibrated from the stored encoder density; otherwise the checkpoint's
/// last calibrated channel is reused, which reproduces the final
/// training-time evaluation bit for bit.
EvalResult evaluate_checkpoint(const Checkpoint& ck, const Dataset& test_set,
                               int inference_repeats, std::optional<double> test_snr_db);

/// Trains one model per SNR point (derived per-point seeds) and evaluates it
/// at its own SNR. `per_point`, when given, receives each point's full
/// training result in index order.
std::vector<SnrSweepRow> snr_sweep(
    const ExperimentConfig& cfg, const std::vector<double>& snrs, int jobs = 1,
    const std::function<void(std::size_t, const TrainRunResult&)>& per_point = {});

/// Trains per train-SNR and evaluates each trained model at every test SNR,
/// recalibrating sigma2 from the trained encoder's density.
std::vector<MismatchRow> mismatch_matrix(
    const ExperimentConfig& cfg, const std::vector<double>& train_snrs,
    const std::vector<double>& test_snrs, int jobs = 1,
    const std::function<void(std::size_t, const TrainRunResult&)>& per_point = {});

}  // namespace neurojscc
