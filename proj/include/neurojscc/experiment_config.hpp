#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "neurojscc/trainer.hpp"

namespace neurojscc {

struct SyntheticSpec {
  int num_classes = 2;
  int examples_per_class = 64;
  int d_u = 16;
  int num_steps = 20;
  double spike_density = 0.2;
  double jitter = 0.05;
};

struct DatasetConfig {
  enum class Type { kSynthetic, kFile };
  Type type = Type::kSynthetic;
  SyntheticSpec synthetic;
  std::string path;  // for kFile
};

struct TopologyConfig {
  int d_u = 16;
  double rate = 1.0;  // d_x = round(rate * d_u)
  int n_hidden_encoder = 0;
  int n_hidden_decoder = 16;
  int d_v = 2;
  /// "hidden": decoder hidden neurons are fully recurrent but output spikes
  /// are not fed back as synapses. "full": every decoder neuron feeds every
  /// other. Clamped training with "full" lets the readout explain the
  /// targets from the targets themselves and free-run into an arbitrary
  /// attractor at inference, so "hidden" is the default.
  bool full_decoder_recurrence = false;

  int d_x() const;
};

struct FilterConfig {
  enum class Type { kRaisedCosine, kExponential };
  Type type = Type::kRaisedCosine;
  int num_filters = 2;
  int window = 10;
  double log_offset = 1.0;
  std::vector<double> betas;  // exponential only; empty selects defaults

  FilterBank build() const;
};

struct ChannelConfig {
  enum class Type { kGaussianQuantized, kIdentity };
  Type type = Type::kGaussianQuantized;
  double snr_db = 0.0;
  double threshold = 0.5;
};

struct TrainingConfig {
  long iterations = 2000;
  long eval_cadence = 100;
  double train_fraction = 0.75;
  double target_rate = 1.0;
  double init_scale = 0.1;
  int inference_repeats = 1;
  bool uncoded = false;
  bool reset_smoothing_per_example = true;
  bool carry_baseline_stats = true;
  bool per_example_calibration = false;
  /// Clamped-target self-memory is another target leak; by default the
  /// decoder output neurons' feedback weights stay frozen at zero.
  bool train_output_feedback = false;
  /// Initial bias of every encoder neuron. Negative values start the code
  /// sparse, which under per-symbol SNR calibration means a quieter channel
  /// from the first epoch.
  double encoder_bias_init = 0.0;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  TopologyConfig topology;
  FilterConfig filters;
  ChannelConfig channel;
  Hyperparams hyperparams;
  TrainingConfig training;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  void validate() const;
};

/// Strict parser: unknown fields are rejected with their full path. Accepts
/// either a plain config object or a manifest (the embedded resolved_config
/// is used).
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Fully resolved canonical form; parsing it back yields the same config.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace neurojscc
