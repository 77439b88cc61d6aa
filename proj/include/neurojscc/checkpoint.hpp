#pragma once

#include <memory>
#include <optional>
#include <string>

#include "neurojscc/experiment_config.hpp"
#include "neurojscc/network.hpp"

namespace neurojscc {

/// Trained models plus everything evaluation needs: the filter and topology
/// descriptors, the encoder's measured spike density (for SNR recalibration
/// at other test SNRs) and the last calibrated noise power.
struct Checkpoint {
  TopologyConfig topology;
  FilterConfig filters;
  ChannelConfig channel;
  bool uncoded = false;
  std::uint64_t seed = 0;
  long iterations_completed = 0;
  double encoder_density = 0.0;           // rho on the training set, final params
  std::optional<double> sigma2_last;      // noise power in effect at the end
  std::unique_ptr<SnnModel> encoder;      // null for uncoded transmission
  std::unique_ptr<SnnModel> decoder;
};

/// JSON checkpoint; parameter arrays round-trip bit exactly.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

/// Fresh untrained models for a configuration.
std::unique_ptr<SnnModel> build_encoder(const TopologyConfig& topo, const FilterConfig& filters,
                                        std::uint64_t seed, double init_scale);
std::unique_ptr<SnnModel> build_decoder(const TopologyConfig& topo, const FilterConfig& filters,
                                        std::uint64_t seed, double init_scale);

}  // namespace neurojscc
