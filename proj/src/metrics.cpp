#include "neurojscc/metrics.hpp"

#include <filesystem>
#include <fstream>

#include "neurojscc/errors.hpp"

namespace neurojscc {

using nlohmann::json;

json metrics_row_to_json(const MetricsRow& row, const Hyperparams& hp) {
  json j;
  j["iteration"] = row.iteration;
  j["train_loss"] = row.train_loss ? json(*row.train_loss) : json(nullptr);
  j["test_accuracy"] = row.test_accuracy;
  j["snr_db"] = row.snr_db ? json(*row.snr_db) : json(nullptr);
  j["sigma2"] = row.sigma2;
  j["rate"] = row.rate;
  j["seed"] = row.seed;
  j["hyperparams"] = {{"eta", hp.eta},
                      {"kappa", hp.kappa},
                      {"kappa2", hp.kappa2},
                      {"alpha", hp.alpha},
                      {"use_baseline", hp.use_baseline},
                      {"epsilon", hp.epsilon}};
  return j;
}

void write_metrics_jsonl(const std::string& path, const std::vector<MetricsRow>& rows,
                         const Hyperparams& hp) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& row : rows) out << metrics_row_to_json(row, hp).dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::string format_number(double v) { return json(v).dump(); }

namespace {

std::ofstream open_csv(const std::string& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << header << '\n';
  return out;
}

}  // namespace

void write_accuracy_vs_iteration_csv(const std::string& path,
                                     const std::vector<MetricsRow>& rows) {
  auto out = open_csv(path, "iteration,train_loss,test_accuracy");
  for (const auto& row : rows) {
    out << row.iteration << ',' << (row.train_loss ? format_number(*row.train_loss) : "")
        << ',' << format_number(row.test_accuracy) << '\n';
  }
}

void write_accuracy_vs_timestep_csv(const std::string& path,
                                    const std::vector<double>& accuracy) {
  auto out = open_csv(path, "timestep,accuracy");
  for (std::size_t t = 0; t < accuracy.size(); ++t) {
    out << (t + 1) << ',' << format_number(accuracy[t]) << '\n';
  }
}

void write_accuracy_vs_snr_csv(const std::string& path, const std::vector<SnrSweepRow>& rows) {
  auto out = open_csv(path, "snr_db,sigma2,test_accuracy,seed");
  for (const auto& row : rows) {
    out << format_number(row.snr_db) << ',' << format_number(row.sigma2) << ','
        << format_number(row.test_accuracy) << ',' << row.seed << '\n';
  }
}

void write_mismatch_matrix_csv(const std::string& path, const std::vector<MismatchRow>& rows) {
  auto out = open_csv(path, "train_snr_db,test_snr_db,sigma2,test_accuracy,seed");
  for (const auto& row : rows) {
    out << format_number(row.train_snr_db) << ',' << format_number(row.test_snr_db) << ','
        << format_number(row.sigma2) << ',' << format_number(row.test_accuracy) << ','
        << row.seed << '\n';
  }
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash, missing file: " + path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::string>& artifact_paths) {
  json j;
  j["format_version"] = 1;
  j["seed"] = cfg.seed;
  j["resolved_config"] = config_to_json(cfg);
  json artifacts = json::object();
  for (const auto& p : artifact_paths) {
    artifacts[std::filesystem::path(p).filename().string()] = hash_file(p);
  }
  j["artifacts"] = artifacts;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace neurojscc
