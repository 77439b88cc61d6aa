#include <doctest.h>

#include <cmath>

#include "neurojscc/dataset.hpp"
#include "neurojscc/rng.hpp"
#include "neurojscc/trace_state.hpp"

using namespace neurojscc;

namespace {

SpikeTensor random_stream(int d, int T, double density, std::uint64_t seed) {
  Rng rng(seed);
  SpikeTensor s(d, T);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < d; ++j) s.set(j, t, rng.bernoulli(density));
  }
  return s;
}

}  // namespace

TEST_CASE("convolve_filter matches the direct sum on the worked examples") {
  const std::vector<double> filter{0.5, 0.25};
  std::vector<std::uint8_t> spikes{1, 0, 0};  // single spike at step 1

  CHECK(convolve_filter(filter, spikes, 1) == doctest::Approx(0.0));
  CHECK(convolve_filter(filter, spikes, 2) == doctest::Approx(0.5));
  CHECK(convolve_filter(filter, spikes, 3) == doctest::Approx(0.25));
  CHECK(convolve_filter(filter, spikes, 4) == doctest::Approx(0.0));

  CHECK_THROWS_AS(convolve_filter(filter, spikes, 0), DimensionError);
  CHECK_THROWS_AS(convolve_filter(filter, spikes, 5), DimensionError);
}

TEST_CASE("online traces equal the convolution oracle on random streams") {
  const auto bank = FilterBank::raised_cosine(2, 5);
  const int d = 3;
  const int T = 40;
  const auto stream = random_stream(d, T, 0.4, 99);

  TraceState traces(bank, d);
  for (int t = 0; t < T; ++t) {
    traces.advance(stream.column(t));
    for (int j = 0; j < d; ++j) {
      const auto sig = stream.signal(j);
      for (int k = 0; k < bank.num_filters(); ++k) {
        CHECK(traces.synaptic(j, k) == doctest::Approx(convolve_filter(bank.synaptic[k], sig, t + 2))
                                           .epsilon(1e-12));
      }
      CHECK(traces.feedback(j) ==
            doctest::Approx(convolve_filter(bank.feedback, sig, t + 2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("all-zero streams leave traces at zero") {
  const auto bank = FilterBank::exponential(2, 4);
  TraceState traces(bank, 2);
  const std::vector<std::uint8_t> zeros{0, 0};
  for (int t = 0; t < 10; ++t) {
    traces.advance(zeros);
    for (int j = 0; j < 2; ++j) {
      CHECK(traces.feedback(j) == 0.0);
      for (int k = 0; k < 2; ++k) CHECK(traces.synaptic(j, k) == 0.0);
    }
  }
}

TEST_CASE("window W=1 trace sees only the previous step") {
  FilterBank bank;
  bank.synaptic = {{1.0}};
  bank.feedback = {0.0};
  TraceState traces(bank, 1);
  const std::vector<std::uint8_t> one{1};
  const std::vector<std::uint8_t> zero{0};
  traces.advance(one);  // spike at step 1
  CHECK(traces.synaptic(0, 0) == doctest::Approx(1.0));  // read at step 2
  traces.advance(zero);
  CHECK(traces.synaptic(0, 0) == doctest::Approx(0.0));  // read at step 3
}

TEST_CASE("traces are linear over disjoint spike supports") {
  const auto bank = FilterBank::raised_cosine(2, 6);
  const int d = 1;
  const int T = 24;
  Rng rng(7);
  SpikeTensor s1(d, T);
  SpikeTensor s2(d, T);
  SpikeTensor both(d, T);
  for (int t = 0; t < T; ++t) {
    const int which = static_cast<int>(rng.below(3));
    if (which == 0) s1.set(0, t, true);
    if (which == 1) s2.set(0, t, true);
    both.set(0, t, which != 2);
  }
  TraceState a(bank, d);
  TraceState b(bank, d);
  TraceState c(bank, d);
  for (int t = 0; t < T; ++t) {
    a.advance(s1.column(t));
    b.advance(s2.column(t));
    c.advance(both.column(t));
    for (int k = 0; k < 2; ++k) {
      CHECK(c.synaptic(0, k) ==
            doctest::Approx(a.synaptic(0, k) + b.synaptic(0, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("causality: future spikes never change a past trace") {
  const auto bank = FilterBank::raised_cosine(2, 5);
  auto stream = random_stream(2, 20, 0.5, 3);
  const int t_probe = 9;

  TraceState base(bank, 2);
  for (int t = 0; t <= t_probe; ++t) base.advance(stream.column(t));
  const double probe = base.synaptic(0, 0);
  const double probe_fb = base.feedback(1);

  // flip everything after the probe step, replay
  for (int t = t_probe + 1; t < 20; ++t) {
    for (int j = 0; j < 2; ++j) stream.set(j, t, !stream.get(j, t));
  }
  TraceState replay(bank, 2);
  for (int t = 0; t <= t_probe; ++t) replay.advance(stream.column(t));
  CHECK(replay.synaptic(0, 0) == probe);
  CHECK(replay.feedback(1) == probe_fb);
}

TEST_CASE("raised cosine bank: unit peaks, finite support, ordered peaks") {
  for (const auto& [K, W] : {std::pair{1, 1}, {2, 10}, {3, 8}, {8, 10}}) {
    const auto bank = FilterBank::raised_cosine(K, W);
    REQUIRE(bank.num_filters() == K);
    REQUIRE(bank.window() == W);
    for (int k = 0; k < K; ++k) {
      double peak = 0.0;
      for (const double v : bank.synaptic[k]) {
        CHECK(std::isfinite(v));
        peak = std::max(peak, v);
      }
      CHECK(peak == doctest::Approx(1.0));
    }
  }

  const auto bank = FilterBank::raised_cosine(2, 10);
  const auto argmax = [](const std::vector<double>& f) {
    return std::distance(f.begin(), std::max_element(f.begin(), f.end()));
  };
  CHECK(argmax(bank.synaptic[0]) < argmax(bank.synaptic[1]));

  CHECK_THROWS_AS(FilterBank::raised_cosine(0, 5), ConfigError);
  CHECK_THROWS_AS(FilterBank::raised_cosine(2, 0), ConfigError);
}

TEST_CASE("feedback filter is the negated first basis element") {
  const auto bank = FilterBank::raised_cosine(3, 7);
  for (int i = 0; i < bank.window(); ++i) {
    CHECK(bank.feedback[i] == doctest::Approx(-bank.synaptic[0][i]));
  }
}

TEST_CASE("exponential bank follows beta^delta") {
  const std::vector<double> betas{0.5, 0.25};
  const auto bank = FilterBank::exponential(2, 4, betas);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 4; ++i) {
      CHECK(bank.synaptic[k][i] == doctest::Approx(std::pow(betas[k], i + 1)));
    }
  }
}

TEST_CASE("synthetic dataset: determinism, jitter and density edge cases") {
  const auto a = generate_synthetic_dataset(2, 4, 6, 5, 0.3, 0.1, 42);
  const auto b = generate_synthetic_dataset(2, 4, 6, 5, 0.3, 0.1, 42);
  REQUIRE(a.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].spikes == b[i].spikes);
  }

  // zero jitter: every example equals its class prototype
  const auto clean = generate_synthetic_dataset(2, 3, 6, 5, 0.3, 0.0, 7);
  CHECK(clean[0].spikes == clean[1].spikes);
  CHECK(clean[0].spikes == clean[2].spikes);
  CHECK(clean[3].spikes == clean[4].spikes);
  CHECK_FALSE(clean[0].spikes == clean[3].spikes);

  // zero density with no jitter: all-zero tensors
  const auto empty = generate_synthetic_dataset(2, 2, 6, 5, 0.0, 0.0, 7);
  for (const auto& ex : empty) CHECK(ex.spikes.spike_count() == 0);
}

TEST_CASE("spike tensor shape and entry invariants") {
  CHECK_THROWS_AS(SpikeTensor(0, 3), DimensionError);
  CHECK_THROWS_AS(SpikeTensor(3, 0), DimensionError);
  SpikeTensor t(2, 3);
  CHECK_THROWS_AS(t.get(2, 0), DimensionError);
  CHECK_THROWS_AS(t.get(0, 3), DimensionError);
  t.set(1, 2, true);
  CHECK(t.spike_count() == 1);
  CHECK(t.density() == doctest::Approx(1.0 / 6.0));
}
