#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "neurojscc/experiment_config.hpp"

namespace neurojscc {

struct MetricsRow {
  long iteration = 0;
  std::optional<double> train_loss;  // mean per-example loss since last row
  double test_accuracy = 0.0;
  std::optional<double> snr_db;  // absent for the identity channel
  double sigma2 = 0.0;
  double rate = 1.0;
  std::uint64_t seed = 0;
};

nlohmann::json metrics_row_to_json(const MetricsRow& row, const Hyperparams& hp);

/// One JSON object per line; key order and float formatting are canonical,
/// so identical runs produce identical bytes.
void write_metrics_jsonl(const std::string& path, const std::vector<MetricsRow>& rows,
                         const Hyperparams& hp);

/// Shortest-round-trip decimal form for CSV cells (same as the JSON dumps).
std::string format_number(double v);

void write_accuracy_vs_iteration_csv(const std::string& path, const std::vector<MetricsRow>& rows);
void write_accuracy_vs_timestep_csv(const std::string& path, const std::vector<double>& accuracy);

struct SnrSweepRow {
  double snr_db = 0.0;
  double sigma2 = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t seed = 0;
};
void write_accuracy_vs_snr_csv(const std::string& path, const std::vector<SnrSweepRow>& rows);

struct MismatchRow {
  double train_snr_db = 0.0;
  double test_snr_db = 0.0;
  double sigma2 = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t seed = 0;
};
void write_mismatch_matrix_csv(const std::string& path, const std::vector<MismatchRow>& rows);

/// FNV-1a 64 of a file's bytes, hex encoded.
std::string hash_file(const std::string& path);

/// manifest.json: resolved config, seed, and a hash per artifact. Rerunning
/// from a manifest (its resolved_config) reproduces the metrics bytes.
void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::string>& artifact_paths);

}  // namespace neurojscc
