#include "neurojscc/events.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "neurojscc/errors.hpp"

namespace neurojscc {

namespace {

bool parse_long(const std::string& field, std::int64_t& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

std::vector<EventRecord> load_events_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<EventRecord> events;
  std::string line;
  long line_no = 0;
  std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    std::int64_t probe = 0;
    if (line_no == 1 && (fields.empty() || !parse_long(fields[0], probe))) {
      continue;  // header
    }
    if (fields.size() != 4) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                    std::to_string(fields.size()));
    }
    std::int64_t ts = 0, ex = 0, ey = 0, pol = 0;
    if (!parse_long(fields[0], ts) || !parse_long(fields[1], ex) || !parse_long(fields[2], ey) ||
        !parse_long(fields[3], pol)) {
      throw IoError(path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (ts < prev_ts) {
      throw IoError(path + ":" + std::to_string(line_no) + ": timestamps must be nondecreasing");
    }
    prev_ts = ts;
    events.push_back({ts, static_cast<int>(ex), static_cast<int>(ey),
                      pol >= 0 ? 1 : -1});
  }
  return events;
}

SpikeTensor preprocess_events(const std::vector<EventRecord>& events, const PreprocessConfig& cfg,
                              bool* empty_warning) {
  if (cfg.crop_width <= 0 || cfg.crop_height <= 0) {
    throw ConfigError("preprocess: crop window must be set");
  }
  if (cfg.downsample < 1 || cfg.num_steps < 1 || cfg.window_us < 1) {
    throw ConfigError("preprocess: downsample, num_steps and window_us must be positive");
  }
  if (empty_warning) *empty_warning = events.empty();

  SpikeTensor out(cfg.num_signals(), cfg.num_steps);
  const std::int64_t horizon = static_cast<std::int64_t>(cfg.num_steps) * cfg.window_us;
  for (const auto& ev : events) {
    if (ev.timestamp_us < 0 || ev.timestamp_us >= horizon) continue;
    if (cfg.polarity == PolarityMode::kPositiveOnly && ev.polarity < 0) continue;
    const int cx = ev.x - cfg.crop_x;
    const int cy = ev.y - cfg.crop_y;
    if (cx < 0 || cx >= cfg.crop_width || cy < 0 || cy >= cfg.crop_height) continue;
    const int gx = cx / cfg.downsample;
    const int gy = cy / cfg.downsample;
    const int signal = gy * cfg.grid_width() + gx;
    const int step = static_cast<int>(ev.timestamp_us / cfg.window_us);
    out.set(signal, step, true);
  }
  return out;
}

}  // namespace neurojscc
