#include "neurojscc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "neurojscc/errors.hpp"
#include "neurojscc/rng.hpp"

namespace neurojscc {

Dataset generate_synthetic_dataset(int num_classes, int examples_per_class, int num_signals,
                                   int num_steps, double spike_density, double jitter,
                                   std::uint64_t seed) {
  if (num_classes < 1 || examples_per_class < 1) {
    throw ConfigError("synthetic dataset: class and example counts must be positive");
  }
  if (spike_density < 0.0 || spike_density > 1.0) {
    throw ConfigError("synthetic dataset: spike_density must be in [0, 1]");
  }
  if (jitter < 0.0 || jitter > 1.0) {
    throw ConfigError("synthetic dataset: jitter must be in [0, 1]");
  }

  std::vector<SpikeTensor> prototypes;
  prototypes.reserve(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    Rng rng(derive_seed(seed, "prototype", static_cast<std::uint64_t>(c)));
    SpikeTensor proto(num_signals, num_steps);
    for (int t = 0; t < num_steps; ++t) {
      for (int j = 0; j < num_signals; ++j) {
        proto.set(j, t, rng.bernoulli(spike_density));
      }
    }
    prototypes.push_back(std::move(proto));
  }

  Dataset data;
  data.reserve(static_cast<std::size_t>(num_classes) * examples_per_class);
  for (int c = 0; c < num_classes; ++c) {
    for (int e = 0; e < examples_per_class; ++e) {
      Rng rng(derive_seed(seed, "jitter", static_cast<std::uint64_t>(c) * examples_per_class + e));
      SpikeTensor spikes = prototypes[c];
      if (jitter > 0.0) {
        for (int t = 0; t < num_steps; ++t) {
          for (int j = 0; j < num_signals; ++j) {
            if (rng.bernoulli(jitter)) spikes.set(j, t, !spikes.get(j, t));
          }
        }
      }
      data.push_back({c, std::move(spikes)});
    }
  }
  return data;
}

SpikeTensor target_spike_train(int label, int num_outputs, int num_steps, double target_rate) {
  if (label < 0 || label >= num_outputs) {
    throw ConfigError("target_spike_train: label out of range");
  }
  if (!(target_rate > 0.0) || target_rate > 1.0) {
    throw ConfigError("target_spike_train: target_rate must be in (0, 1]");
  }
  const int period = static_cast<int>(std::floor(1.0 / target_rate));
  SpikeTensor v(num_outputs, num_steps);
  for (int t = 0; t < num_steps; t += period) v.set(label, t, true);
  return v;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& ex : data) {
    nlohmann::json rec;
    rec["label"] = ex.label;
    rec["shape"] = {ex.spikes.num_signals(), ex.spikes.num_steps()};
    auto& spikes = rec["spikes"] = nlohmann::json::array();
    for (int j = 0; j < ex.spikes.num_signals(); ++j) {
      for (int t = 0; t < ex.spikes.num_steps(); ++t) {
        if (ex.spikes.get(j, t)) spikes.push_back({j, t});
      }
    }
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  Dataset data;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": invalid JSON record: " + e.what());
    }
    try {
      const int label = rec.at("label").get<int>();
      const auto shape = rec.at("shape");
      const int d = shape.at(0).get<int>();
      const int T = shape.at(1).get<int>();
      SpikeTensor spikes(d, T);
      for (const auto& coord : rec.at("spikes")) {
        const int j = coord.at(0).get<int>();
        const int t = coord.at(1).get<int>();
        if (j < 0 || j >= d || t < 0 || t >= T) {
          throw IoError(path + ":" + std::to_string(line_no) + ": spike coordinate (" +
                        std::to_string(j) + "," + std::to_string(t) + ") outside shape");
        }
        spikes.set(j, t, true);
      }
      data.push_back({label, std::move(spikes)});
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
    } catch (const DimensionError& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return data;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw ConfigError("split_dataset: train_fraction must be in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data[i].label].push_back(i);

  Dataset train;
  Dataset test;
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw ConfigError("split_dataset: class " + std::to_string(label) +
                        " has fewer than 2 examples");
    }
    Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(label)));
    shuffle(indices, rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(indices.size())));
    const std::size_t n = std::clamp<std::size_t>(n_train, 1, indices.size() - 1);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      (i < n ? train : test).push_back(data[indices[i]]);
    }
  }
  return {std::move(train), std::move(test)};
}

}  // namespace neurojscc
