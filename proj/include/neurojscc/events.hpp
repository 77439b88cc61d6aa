#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neurojscc/spike_tensor.hpp"

namespace neurojscc {

/// One event-camera event.
struct EventRecord {
  std::int64_t timestamp_us = 0;
  int x = 0;
  int y = 0;
  int polarity = 1;  // +1 or -1
};

enum class PolarityMode { kMerge, kPositiveOnly };

/// Event-stream to spike-tensor binning. The crop window is applied first,
/// then spatial downsampling; a cell is 1 iff at least one retained event
/// falls into it. Events past num_steps * window_us are ignored.
struct PreprocessConfig {
  int crop_x = 0;
  int crop_y = 0;
  int crop_width = 0;   // 0 means full sensor width
  int crop_height = 0;  // 0 means full sensor height
  int downsample = 1;
  int num_steps = 80;
  std::int64_t window_us = 10000;
  PolarityMode polarity = PolarityMode::kMerge;

  int grid_width() const { return (crop_width + downsample - 1) / downsample; }
  int grid_height() const { return (crop_height + downsample - 1) / downsample; }
  int num_signals() const { return grid_width() * grid_height(); }
};

/// CSV lines `timestamp_us,x,y,polarity`; a header line is skipped when the
/// first field is not numeric. Timestamps must be nondecreasing.
std::vector<EventRecord> load_events_csv(const std::string& path);

/// Bin events into a (num_signals, num_steps) spike tensor.
/// `empty_warning`, when given, is set if the event list was empty.
SpikeTensor preprocess_events(const std::vector<EventRecord>& events, const PreprocessConfig& cfg,
                              bool* empty_warning = nullptr);

}  // namespace neurojscc
