#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neurojscc/dataset.hpp"
#include "neurojscc/events.hpp"
#include "neurojscc/experiment.hpp"

namespace fs = std::filesystem;
using namespace neurojscc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.output_dir = *args.out;
  cfg.validate();
  return cfg;
}

std::vector<double> parse_snr_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void write_train_artifacts(const fs::path& dir, const ExperimentConfig& cfg,
                           const TrainRunResult& run) {
  fs::create_directories(dir);
  const auto metrics_path = (dir / "metrics.jsonl").string();
  const auto curve_path = (dir / "accuracy_vs_iteration.csv").string();
  const auto ck_path = (dir / "checkpoint.json").string();
  write_metrics_jsonl(metrics_path, run.metrics, cfg.hyperparams);
  write_accuracy_vs_iteration_csv(curve_path, run.metrics);
  save_checkpoint(ck_path, run.checkpoint);
  write_manifest((dir / "manifest.json").string(), cfg, {metrics_path, curve_path, ck_path});
}

int cmd_train(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  const TrainRunResult run = run_training(cfg);
  write_train_artifacts(cfg.output_dir, cfg, run);
  if (!run.metrics.empty()) {
    std::cout << "final test accuracy " << run.metrics.back().test_accuracy << " after "
              << run.checkpoint.iterations_completed << " iterations\n";
  }
  return kExitOk;
}

int cmd_eval(const CommonArgs& args, const std::string& checkpoint_path,
             std::optional<double> test_snr, std::optional<int> horizon) {
  const ExperimentConfig cfg = resolve_config(args);
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  if (ck.topology.d_u != cfg.topology.d_u || ck.topology.d_v != cfg.topology.d_v ||
      ck.topology.d_x() != cfg.topology.d_x() ||
      ck.topology.n_hidden_decoder != cfg.topology.n_hidden_decoder ||
      ck.topology.n_hidden_encoder != cfg.topology.n_hidden_encoder) {
    throw ConfigError("checkpoint/topology mismatch between checkpoint and config");
  }
  auto [train, test] = prepare_dataset(cfg);
  const EvalResult ev = evaluate_checkpoint(ck, test, cfg.training.inference_repeats, test_snr);

  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  write_accuracy_vs_timestep_csv((dir / "accuracy_vs_timestep.csv").string(),
                                 ev.accuracy_per_step);
  const int h = horizon.value_or(static_cast<int>(ev.accuracy_per_step.size()));
  if (h < 1 || h > static_cast<int>(ev.accuracy_per_step.size())) {
    throw ConfigError("--horizon: out of range");
  }
  nlohmann::json summary;
  summary["test_accuracy"] = ev.accuracy;
  summary["sigma2"] = ev.sigma2;
  summary["snr_db"] = ev.snr_db ? nlohmann::json(*ev.snr_db) : nlohmann::json(nullptr);
  summary["horizon"] = h;
  summary["accuracy_at_horizon"] = ev.accuracy_per_step[h - 1];
  std::ofstream sf(dir / "eval_summary.json");
  if (!sf) throw IoError("cannot write eval_summary.json");
  sf << summary.dump(2) << '\n';

  std::cout << "test accuracy " << ev.accuracy << "; at horizon " << h << ": "
            << ev.accuracy_per_step[h - 1] << '\n';
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& snr_csv, const std::string& mode,
              int jobs) {
  const ExperimentConfig cfg = resolve_config(args);
  const std::vector<double> snrs = parse_snr_list(snr_csv);
  if (snrs.empty()) throw ConfigError("--snr-list: at least one SNR point is required");
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  const auto per_point = [&](std::size_t i, const TrainRunResult& run) {
    ExperimentConfig point = cfg;
    point.channel.snr_db = snrs[i];
    point.seed = run.checkpoint.seed;
    char name[64];
    std::snprintf(name, sizeof(name), "point_%02zu", i);
    point.output_dir = (dir / name).string();
    write_train_artifacts(point.output_dir, point, run);
  };

  if (mode == "per-snr") {
    const auto rows = snr_sweep(cfg, snrs, jobs, per_point);
    write_accuracy_vs_snr_csv((dir / "accuracy_vs_snr.csv").string(), rows);
    for (const auto& r : rows) {
      std::cout << "snr " << r.snr_db << " dB: accuracy " << r.test_accuracy << '\n';
    }
  } else if (mode == "mismatch") {
    const auto rows = mismatch_matrix(cfg, snrs, snrs, jobs, per_point);
    write_mismatch_matrix_csv((dir / "mismatch_matrix.csv").string(), rows);
    for (const auto& r : rows) {
      std::cout << "train " << r.train_snr_db << " dB / test " << r.test_snr_db
                << " dB: accuracy " << r.test_accuracy << '\n';
    }
  } else {
    throw ConfigError("--mode: must be per-snr or mismatch");
  }
  return kExitOk;
}

struct GenDataArgs {
  std::string events_path;
  int label = 0;
  std::string out_file = "dataset.jsonl";
  // event preprocessing
  std::vector<int> crop;  // x,y,w,h
  int downsample = 1;
  int steps = 80;
  std::int64_t window_us = 10000;
  std::string polarity = "merge";
};

int cmd_gen_data(const CommonArgs& args, const GenDataArgs& g) {
  Dataset data;
  if (!g.events_path.empty()) {
    if (g.crop.size() != 4) {
      throw ConfigError("--crop: expected x,y,width,height");
    }
    PreprocessConfig pre;
    pre.crop_x = g.crop[0];
    pre.crop_y = g.crop[1];
    pre.crop_width = g.crop[2];
    pre.crop_height = g.crop[3];
    pre.downsample = g.downsample;
    pre.num_steps = g.steps;
    pre.window_us = g.window_us;
    if (g.polarity == "merge") {
      pre.polarity = PolarityMode::kMerge;
    } else if (g.polarity == "positive-only") {
      pre.polarity = PolarityMode::kPositiveOnly;
    } else {
      throw ConfigError("--polarity: must be merge or positive-only");
    }
    const auto events = load_events_csv(g.events_path);
    bool empty = false;
    SpikeTensor spikes = preprocess_events(events, pre, &empty);
    if (empty) std::cerr << "warning: empty event stream\n";
    data.push_back({g.label, std::move(spikes)});
  } else {
    const ExperimentConfig cfg = resolve_config(args);
    if (cfg.dataset.type != DatasetConfig::Type::kSynthetic) {
      throw ConfigError("gen-data without --events needs a synthetic dataset config");
    }
    const auto& s = cfg.dataset.synthetic;
    data = generate_synthetic_dataset(s.num_classes, s.examples_per_class, s.d_u, s.num_steps,
                                      s.spike_density, s.jitter, derive_seed(cfg.seed, "dataset"));
  }
  save_dataset(g.out_file, data);
  std::cout << "wrote " << data.size() << " examples to " << g.out_file << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neurojscc: spiking joint source-channel coding experiments"};
  app.require_subcommand(1);

  CommonArgs common;
  const auto add_common = [&](CLI::App* sub, bool config_required = true) {
    auto* opt = sub->add_option("--config", common.config_path,
                                "experiment config JSON (or a manifest.json)");
    if (config_required) opt->required();
    sub->add_option("--seed", common.seed, "override the config seed");
    sub->add_option("--out", common.out, "override the output directory");
  };

  auto* train = app.add_subcommand("train", "train encoder+decoder end to end");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval);
  std::string checkpoint_path;
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint.json path")->required();
  std::optional<double> test_snr;
  eval->add_option("--test-snr", test_snr, "evaluate at this SNR (dB), recalibrating sigma2");
  std::optional<int> horizon;
  eval->add_option("--horizon", horizon, "report accuracy at this observation horizon");

  auto* sweep = app.add_subcommand("sweep", "train/evaluate across SNR points");
  add_common(sweep);
  std::string snr_list;
  sweep->add_option("--snr-list", snr_list, "comma-separated SNR points (dB)")->required();
  std::string mode = "per-snr";
  sweep->add_option("--mode", mode, "per-snr or mismatch");
  int jobs = 1;
  sweep->add_option("--jobs", jobs, "parallel training jobs");

  auto* gen = app.add_subcommand("gen-data", "generate or convert a spike dataset");
  add_common(gen, /*config_required=*/false);
  GenDataArgs gen_args;
  gen->add_option("--events", gen_args.events_path, "event CSV input (timestamp_us,x,y,polarity)");
  gen->add_option("--label", gen_args.label, "label for converted event streams");
  gen->add_option("--out-file", gen_args.out_file, "output dataset JSONL path");
  gen->add_option("--crop", gen_args.crop, "crop window x,y,width,height")->delimiter(',');
  gen->add_option("--downsample", gen_args.downsample, "spatial downsample factor");
  gen->add_option("--steps", gen_args.steps, "number of time steps");
  gen->add_option("--window-us", gen_args.window_us, "time window per step (microseconds)");
  gen->add_option("--polarity", gen_args.polarity, "merge or positive-only");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return cmd_train(common);
    if (app.got_subcommand(eval)) {
      return cmd_eval(common, checkpoint_path, test_snr, horizon);
    }
    if (app.got_subcommand(sweep)) return cmd_sweep(common, snr_list, mode, jobs);
    if (app.got_subcommand(gen)) {
      if (gen_args.events_path.empty() && common.config_path.empty()) {
        throw ConfigError("gen-data: provide --config (synthetic) or --events (conversion)");
      }
      return cmd_gen_data(common, gen_args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence at iteration " << e.iteration << ": " << e.what() << '\n';
    return kExitDivergence;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
