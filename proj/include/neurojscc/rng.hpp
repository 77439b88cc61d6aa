#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace neurojscc {

/// Derives an independent stream seed from a master seed, a consumer tag
/// and an index, so training, evaluation, calibration and shuffling never
/// share random state. Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

/// mt19937_64 wrapped with hand-rolled uniform/gaussian transforms.
/// std::*_distribution output is implementation-defined; these are not,
/// which keeps seeded runs byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Zero-mean gaussian via Box-Muller; the paired deviate is cached.
  double gaussian(double sigma);

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Deterministic Fisher-Yates shuffle (std::shuffle draws are
/// implementation-defined).
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace neurojscc
