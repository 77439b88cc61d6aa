#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "neurojscc/spike_tensor.hpp"

namespace neurojscc {

/// Synthetic classification task: each class gets a random prototype
/// spatio-temporal pattern with the given spike density; examples are the
/// prototype with independent per-entry flips at rate `jitter`.
/// Deterministic given the seed.
Dataset generate_synthetic_dataset(int num_classes, int examples_per_class, int num_signals,
                                   int num_steps, double spike_density, double jitter,
                                   std::uint64_t seed);

/// Desired output spike train for a class: the labelled neuron fires every
/// floor(1 / target_rate) steps starting at the first step; all other
/// neurons stay silent.
SpikeTensor target_spike_train(int label, int num_outputs, int num_steps,
                               double target_rate = 1.0);

/// JSONL dataset file: one record per example,
///   {"label": int, "shape": [d, T], "spikes": [[j, t], ...]}
/// with 0-indexed sparse coordinates sorted by (signal, step). Round-trips
/// bit-exactly.
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

/// Deterministic stratified split per class.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

}  // namespace neurojscc
