#include "neurojscc/experiment_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>

#include "neurojscc/errors.hpp"

namespace neurojscc {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(path + "." + key + ": unknown field");
  }
}

template <typename T>
void get_to(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key + ": " + e.what());
  }
}

DatasetConfig parse_dataset(const json& j, const std::string& path) {
  require_object(j, path);
  DatasetConfig cfg;
  std::string type = "synthetic";
  get_to(j, path, "type", type);
  if (type == "synthetic") {
    cfg.type = DatasetConfig::Type::kSynthetic;
    reject_unknown(j, path,
                   {"type", "num_classes", "examples_per_class", "d_u", "num_steps",
                    "spike_density", "jitter"});
    get_to(j, path, "num_classes", cfg.synthetic.num_classes);
    get_to(j, path, "examples_per_class", cfg.synthetic.examples_per_class);
    get_to(j, path, "d_u", cfg.synthetic.d_u);
    get_to(j, path, "num_steps", cfg.synthetic.num_steps);
    get_to(j, path, "spike_density", cfg.synthetic.spike_density);
    get_to(j, path, "jitter", cfg.synthetic.jitter);
  } else if (type == "file") {
    cfg.type = DatasetConfig::Type::kFile;
    reject_unknown(j, path, {"type", "path"});
    get_to(j, path, "path", cfg.path);
    if (cfg.path.empty()) throw ConfigError(path + ".path: required for file datasets");
  } else {
    throw ConfigError(path + ".type: must be \"synthetic\" or \"file\"");
  }
  return cfg;
}

TopologyConfig parse_topology(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"d_u", "rate", "n_hidden_encoder", "n_hidden_decoder", "d_v",
                           "full_decoder_recurrence"});
  TopologyConfig cfg;
  get_to(j, path, "d_u", cfg.d_u);
  get_to(j, path, "rate", cfg.rate);
  get_to(j, path, "n_hidden_encoder", cfg.n_hidden_encoder);
  get_to(j, path, "n_hidden_decoder", cfg.n_hidden_decoder);
  get_to(j, path, "d_v", cfg.d_v);
  get_to(j, path, "full_decoder_recurrence", cfg.full_decoder_recurrence);
  return cfg;
}

FilterConfig parse_filters(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"type", "K", "W", "log_offset", "betas"});
  FilterConfig cfg;
  std::string type = "raised_cosine";
  get_to(j, path, "type", type);
  if (type == "raised_cosine") {
    cfg.type = FilterConfig::Type::kRaisedCosine;
  } else if (type == "exponential") {
    cfg.type = FilterConfig::Type::kExponential;
  } else {
    throw ConfigError(path + ".type: must be \"raised_cosine\" or \"exponential\"");
  }
  get_to(j, path, "K", cfg.num_filters);
  get_to(j, path, "W", cfg.window);
  get_to(j, path, "log_offset", cfg.log_offset);
  get_to(j, path, "betas", cfg.betas);
  return cfg;
}

ChannelConfig parse_channel(const json& j, const std::string& path) {
  require_object(j, path);
  ChannelConfig cfg;
  std::string type = "gaussian_quantized";
  get_to(j, path, "type", type);
  if (type == "gaussian_quantized") {
    cfg.type = ChannelConfig::Type::kGaussianQuantized;
    reject_unknown(j, path, {"type", "snr_db", "threshold"});
    get_to(j, path, "snr_db", cfg.snr_db);
    get_to(j, path, "threshold", cfg.threshold);
  } else if (type == "identity") {
    cfg.type = ChannelConfig::Type::kIdentity;
    reject_unknown(j, path, {"type"});
  } else {
    throw ConfigError(path + ".type: must be \"gaussian_quantized\" or \"identity\"");
  }
  return cfg;
}

Hyperparams parse_hyperparams(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"eta", "kappa", "kappa2", "alpha", "use_baseline", "epsilon"});
  Hyperparams hp;
  get_to(j, path, "eta", hp.eta);
  get_to(j, path, "kappa", hp.kappa);
  get_to(j, path, "kappa2", hp.kappa2);
  get_to(j, path, "alpha", hp.alpha);
  get_to(j, path, "use_baseline", hp.use_baseline);
  get_to(j, path, "epsilon", hp.epsilon);
  return hp;
}

TrainingConfig parse_training(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"iterations", "eval_cadence", "train_fraction", "target_rate", "init_scale",
                  "inference_repeats", "uncoded", "reset_smoothing_per_example",
                  "carry_baseline_stats", "per_example_calibration", "train_output_feedback",
                  "encoder_bias_init"});
  TrainingConfig cfg;
  get_to(j, path, "iterations", cfg.iterations);
  get_to(j, path, "eval_cadence", cfg.eval_cadence);
  get_to(j, path, "train_fraction", cfg.train_fraction);
  get_to(j, path, "target_rate", cfg.target_rate);
  get_to(j, path, "init_scale", cfg.init_scale);
  get_to(j, path, "inference_repeats", cfg.inference_repeats);
  get_to(j, path, "uncoded", cfg.uncoded);
  get_to(j, path, "reset_smoothing_per_example", cfg.reset_smoothing_per_example);
  get_to(j, path, "carry_baseline_stats", cfg.carry_baseline_stats);
  get_to(j, path, "per_example_calibration", cfg.per_example_calibration);
  get_to(j, path, "train_output_feedback", cfg.train_output_feedback);
  get_to(j, path, "encoder_bias_init", cfg.encoder_bias_init);
  return cfg;
}

}  // namespace

int TopologyConfig::d_x() const {
  return static_cast<int>(std::llround(rate * static_cast<double>(d_u)));
}

FilterBank FilterConfig::build() const {
  if (type == Type::kRaisedCosine) {
    return FilterBank::raised_cosine(num_filters, window, log_offset);
  }
  return FilterBank::exponential(num_filters, window, betas);
}

void ExperimentConfig::validate() const {
  if (topology.d_u < 1) throw ConfigError("topology.d_u: must be >= 1");
  if (!(topology.rate > 0.0)) throw ConfigError("topology.rate: must be > 0");
  if (topology.d_x() < 1) throw ConfigError("topology.rate: d_x = round(rate * d_u) must be >= 1");
  if (topology.d_v < 1) throw ConfigError("topology.d_v: must be >= 1");
  if (topology.n_hidden_encoder < 0 || topology.n_hidden_decoder < 0) {
    throw ConfigError("topology: hidden counts must be >= 0");
  }
  if (dataset.type == DatasetConfig::Type::kSynthetic) {
    if (dataset.synthetic.d_u != topology.d_u) {
      throw ConfigError("dataset.d_u: must match topology.d_u");
    }
    if (dataset.synthetic.spike_density < 0.0 || dataset.synthetic.spike_density > 1.0) {
      throw ConfigError("dataset.spike_density: must be in [0, 1]");
    }
    if (dataset.synthetic.jitter < 0.0 || dataset.synthetic.jitter > 1.0) {
      throw ConfigError("dataset.jitter: must be in [0, 1]");
    }
  } else if (!std::filesystem::exists(dataset.path)) {
    throw ConfigError("dataset.path: file does not exist: " + dataset.path);
  }
  if (training.uncoded) {
    if (std::abs(topology.rate - 1.0) > 1e-12) {
      throw ConfigError("topology.rate: uncoded transmission fixes r = 1");
    }
    if (topology.n_hidden_encoder != 0) {
      throw ConfigError("topology.n_hidden_encoder: must be 0 for uncoded transmission");
    }
  }
  if (channel.type == ChannelConfig::Type::kGaussianQuantized && !std::isfinite(channel.snr_db)) {
    throw ConfigError("channel.snr_db: must be finite");
  }
  if (training.iterations < 0) throw ConfigError("training.iterations: must be >= 0");
  if (training.eval_cadence < 1) throw ConfigError("training.eval_cadence: must be >= 1");
  if (!(training.train_fraction > 0.0) || !(training.train_fraction < 1.0)) {
    throw ConfigError("training.train_fraction: must be in (0, 1)");
  }
  if (!(training.target_rate > 0.0) || training.target_rate > 1.0) {
    throw ConfigError("training.target_rate: must be in (0, 1]");
  }
  if (training.inference_repeats < 1) {
    throw ConfigError("training.inference_repeats: must be >= 1");
  }
  hyperparams.validate();
  FilterConfig check = filters;
  check.build();  // throws on bad K/W/betas
}

ExperimentConfig config_from_json(const json& root) {
  require_object(root, "config");
  const json& j = root.contains("resolved_config") ? root.at("resolved_config") : root;
  if (&j != &root) require_object(j, "config.resolved_config");
  reject_unknown(j, "config",
                 {"dataset", "topology", "filters", "channel", "hyperparams", "training", "seed",
                  "output_dir"});
  ExperimentConfig cfg;
  if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"), "config.dataset");
  if (j.contains("topology")) cfg.topology = parse_topology(j.at("topology"), "config.topology");
  if (j.contains("filters")) cfg.filters = parse_filters(j.at("filters"), "config.filters");
  if (j.contains("channel")) cfg.channel = parse_channel(j.at("channel"), "config.channel");
  if (j.contains("hyperparams")) {
    cfg.hyperparams = parse_hyperparams(j.at("hyperparams"), "config.hyperparams");
  }
  if (j.contains("training")) cfg.training = parse_training(j.at("training"), "config.training");
  get_to(j, "config", "seed", cfg.seed);
  get_to(j, "config", "output_dir", cfg.output_dir);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.dataset.type == DatasetConfig::Type::kSynthetic) {
    j["dataset"] = {{"type", "synthetic"},
                    {"num_classes", cfg.dataset.synthetic.num_classes},
                    {"examples_per_class", cfg.dataset.synthetic.examples_per_class},
                    {"d_u", cfg.dataset.synthetic.d_u},
                    {"num_steps", cfg.dataset.synthetic.num_steps},
                    {"spike_density", cfg.dataset.synthetic.spike_density},
                    {"jitter", cfg.dataset.synthetic.jitter}};
  } else {
    j["dataset"] = {{"type", "file"}, {"path", cfg.dataset.path}};
  }
  j["topology"] = {{"d_u", cfg.topology.d_u},
                   {"rate", cfg.topology.rate},
                   {"n_hidden_encoder", cfg.topology.n_hidden_encoder},
                   {"n_hidden_decoder", cfg.topology.n_hidden_decoder},
                   {"d_v", cfg.topology.d_v},
                   {"full_decoder_recurrence", cfg.topology.full_decoder_recurrence}};
  j["filters"] = {{"type", cfg.filters.type == FilterConfig::Type::kRaisedCosine
                               ? "raised_cosine"
                               : "exponential"},
                  {"K", cfg.filters.num_filters},
                  {"W", cfg.filters.window},
                  {"log_offset", cfg.filters.log_offset},
                  {"betas", cfg.filters.betas}};
  if (cfg.channel.type == ChannelConfig::Type::kGaussianQuantized) {
    j["channel"] = {{"type", "gaussian_quantized"},
                    {"snr_db", cfg.channel.snr_db},
                    {"threshold", cfg.channel.threshold}};
  } else {
    j["channel"] = {{"type", "identity"}};
  }
  j["hyperparams"] = {{"eta", cfg.hyperparams.eta},       {"kappa", cfg.hyperparams.kappa},
                      {"kappa2", cfg.hyperparams.kappa2}, {"alpha", cfg.hyperparams.alpha},
                      {"use_baseline", cfg.hyperparams.use_baseline},
                      {"epsilon", cfg.hyperparams.epsilon}};
  j["training"] = {{"iterations", cfg.training.iterations},
                   {"eval_cadence", cfg.training.eval_cadence},
                   {"train_fraction", cfg.training.train_fraction},
                   {"target_rate", cfg.training.target_rate},
                   {"init_scale", cfg.training.init_scale},
                   {"inference_repeats", cfg.training.inference_repeats},
                   {"uncoded", cfg.training.uncoded},
                   {"reset_smoothing_per_example", cfg.training.reset_smoothing_per_example},
                   {"carry_baseline_stats", cfg.training.carry_baseline_stats},
                   {"per_example_calibration", cfg.training.per_example_calibration},
                   {"train_output_feedback", cfg.training.train_output_feedback},
                   {"encoder_bias_init", cfg.training.encoder_bias_init}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j;
}

}  // namespace neurojscc
