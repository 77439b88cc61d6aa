#include "neurojscc/rng.hpp"

#include <cmath>
#include <numbers>

namespace neurojscc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  std::uint64_t x = splitmix64(master ^ fnv1a64(tag));
  x = splitmix64(x + index * 0x9E3779B97F4A7C15ULL);
  return x;
}

double Rng::gaussian(double sigma) {
  if (have_spare_) {
    have_spare_ = false;
    return spare_ * sigma;
  }
  // u1 in (0, 1] so the log is finite
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle) * sigma;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift; bias is eliminated by rejection.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const __uint128_t m = static_cast<__uint128_t>(gen_()) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

}  // namespace neurojscc
