#include <doctest.h>

#include <cmath>

#include "neurojscc/channel.hpp"

using namespace neurojscc;

TEST_CASE("quantizer boundary behavior") {
  CHECK(quantize(0.5) == 1);
  CHECK(quantize(0.4999) == 0);
  CHECK(quantize(1.7) == 1);
  CHECK(quantize(-0.2) == 0);
  CHECK(quantize(0.1, 0.05) == 1);
}

TEST_CASE("gaussian channel parameter validation") {
  CHECK_THROWS_AS(GaussianQuantizedChannel(0.0), ConfigError);
  CHECK_THROWS_AS(GaussianQuantizedChannel(-1.0), ConfigError);
  GaussianQuantizedChannel ch(0.25);
  CHECK(ch.sigma2() == doctest::Approx(0.25));
  CHECK_THROWS_AS(ch.set_sigma2(0.0), ConfigError);
}

TEST_CASE("near-zero noise is a passthrough for binary inputs") {
  GaussianQuantizedChannel ch(1e-12);
  SpikeTensor x(4, 2);
  x.set(0, 0, true);
  x.set(3, 0, true);
  x.set(1, 1, true);
  SpikeTensor y(4, 2);
  Rng rng(5);
  for (int t = 0; t < 2; ++t) {
    ch.step(x, t, y, y.column(t), rng);
    for (int j = 0; j < 4; ++j) CHECK(y.column(t)[j] == x.column(t)[j]);
  }
}

TEST_CASE("identity channel copies its input") {
  IdentityChannel ch;
  CHECK_FALSE(ch.stochastic());
  SpikeTensor x(3, 1);
  x.set(1, 0, true);
  SpikeTensor y(3, 1);
  Rng rng(1);
  ch.step(x, 0, y, y.column(0), rng);
  CHECK(y.get(0, 0) == false);
  CHECK(y.get(1, 0) == true);
}

TEST_CASE("flip probabilities match the gaussian tail and are symmetric at threshold 0.5") {
  for (const double sigma : {0.25, 0.5, 1.0}) {
    GaussianQuantizedChannel ch(sigma * sigma);
    const double expected = 1.0 - normal_cdf(0.5 / sigma);
    CHECK(ch.flip_probability(0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ch.flip_probability(1) == doctest::Approx(expected).epsilon(1e-12));
  }
  // sanity value: sigma = 0.5 gives 1 - Phi(1) ~ 0.1587
  GaussianQuantizedChannel ch(0.25);
  CHECK(ch.flip_probability(0) == doctest::Approx(0.15865525393145707).epsilon(1e-9));
}

TEST_CASE("empirical flip rate agrees with the closed form") {
  GaussianQuantizedChannel ch(0.25);  // sigma 0.5
  const int n = 200000;
  SpikeTensor x(1, 1);  // all-zero input
  SpikeTensor y(1, 1);
  Rng rng(1234);
  long flips = 0;
  for (int i = 0; i < n; ++i) {
    ch.step(x, 0, y, y.column(0), rng);
    flips += y.get(0, 0) ? 1 : 0;
  }
  const double p = ch.flip_probability(0);
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(flips) / n - p) <= 3.0 * se);
}

TEST_CASE("seeded channels are deterministic") {
  GaussianQuantizedChannel ch(0.5);
  SpikeTensor x(8, 4);
  x.set(2, 1, true);
  x.set(5, 3, true);
  SpikeTensor y1(8, 4);
  SpikeTensor y2(8, 4);
  Rng a(99);
  Rng b(99);
  for (int t = 0; t < 4; ++t) {
    ch.step(x, t, y1, y1.column(t), a);
    ch.step(x, t, y2, y2.column(t), b);
  }
  CHECK(y1 == y2);
}

TEST_CASE("SNR calibration formula") {
  CHECK(sigma2_from_snr(0.0, 0.2) == doctest::Approx(0.2));
  CHECK(sigma2_from_snr(-6.0, 0.2) == doctest::Approx(0.2 / std::pow(10.0, -0.6)).epsilon(1e-12));
  CHECK(sigma2_from_snr(-6.0, 0.2) == doctest::Approx(0.7962).epsilon(1e-4));
  CHECK(sigma2_from_snr(300.0, 0.2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(sigma2_from_snr(0.0, 0.0), ConfigError);
}

TEST_CASE("density measurement") {
  SpikeTensor zero(4, 4);
  CHECK(measure_density(zero) == 0.0);
  SpikeTensor full(4, 4);
  for (int j = 0; j < 4; ++j) {
    for (int t = 0; t < 4; ++t) full.set(j, t, true);
  }
  CHECK(measure_density(full) == 1.0);
  SpikeTensor half(2, 2);
  half.set(0, 0, true);
  half.set(1, 1, true);
  CHECK(measure_density(half) == doctest::Approx(0.5));

  const std::vector<SpikeTensor> set{zero, full};
  CHECK(measure_density(set) == doctest::Approx(0.5));
}
