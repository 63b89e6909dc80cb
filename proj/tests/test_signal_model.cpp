// SPDX-License-Identifier: Apache-2.0
#include "catch_amalgamated.hpp"
#include "quadcs/signal_model.hpp"

using namespace quadcs;

namespace {

void check_close(cd got, cd want, double rel) {
  INFO("got " << got << " want " << want);
  CHECK(std::abs(got - want) <= rel * std::abs(want));
}

}  // namespace

// Reference values from a vectorised direct DTFT of the same midpoint samples.
TEST_CASE("waveform spectrum matches the reference DTFT", "[signal_model]") {
  const Waveform w(WaveformSpec{});
  REQUIRE(w.samples().size() == 4096);
  check_close(w.spectrum(0.0), cd(3.199841675407676e-07, 3.0718548181245633e-07), 1e-11);
  check_close(w.spectrum(12.5e6), cd(3.1993435092787524e-07, 3.0294195864916091e-07), 1e-11);
  check_close(w.spectrum(-25e6), cd(1.5999900908718789e-07, 1.5673359351056648e-07), 1e-11);
  check_close(w.spectrum(-7.3e6), cd(4.3028062054693789e-07, 1.1472882633243454e-07), 1e-11);
}

TEST_CASE("sampled spectrum approximates the continuous chirp spectrum", "[signal_model]") {
  // Continuous-time values by adaptive quadrature.
  const Waveform w(WaveformSpec{});
  check_close(w.spectrum(0.0), cd(3.199841689e-07, 3.072676636e-07), 5e-4);
  check_close(w.spectrum(12.5e6), cd(3.199343523e-07, 3.030244207e-07), 5e-4);
}

TEST_CASE("band edges follow the half-open convention", "[signal_model]") {
  const double B = 50e6;
  CHECK(in_band(-B / 2, B));
  CHECK_FALSE(in_band(B / 2, B));
  CHECK(in_band(B / 2 - 1.0, B));
  CHECK_FALSE(in_band(-B / 2 - 1.0, B));
  const Waveform w(WaveformSpec{});
  CHECK(w.spectrum(B / 2) == cd(0.0));
  CHECK(w.spectrum_raw(B / 2) != cd(0.0));
  WaveformSpec loose;
  loose.strict_bandlimit = false;
  CHECK(Waveform(loose).spectrum(B / 2) != cd(0.0));
}

TEST_CASE("down chirp spectrum is the mirrored conjugate", "[signal_model]") {
  WaveformSpec down;
  down.direction = ChirpDirection::down;
  const Waveform up(WaveformSpec{}), dn(down);
  for (double f : {0.0, 3.1e6, -11.7e6}) {
    const cd a = up.spectrum(f), b = dn.spectrum(-f);
    CHECK(std::abs(std::conj(b) - a) < 1e-9 * std::abs(a));
  }
}

TEST_CASE("waveform spec validation", "[signal_model]") {
  WaveformSpec s;
  s.pulse_width = 1e-9;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = WaveformSpec{};
  s.oversample = 0;
  CHECK_THROWS_AS(Waveform(s), std::invalid_argument);
}

TEST_CASE("scene spectrum is linear in the gains", "[signal_model]") {
  const Waveform w(WaveformSpec{});
  const SpectrumGrid grid{-30e6, 48828.125, 1229};
  const DenseSpectrum s0 = sample_S0(w, grid);
  const std::vector<double> d{1e-6, 2.5e-6};
  const auto a = scene_spectrum(d, {cd(1.0), cd(0.0)}, s0);
  const auto b = scene_spectrum(d, {cd(0.0), cd(0.0, 2.0)}, s0);
  const auto c = scene_spectrum(d, {cd(1.0), cd(0.0, 2.0)}, s0);
  for (std::size_t i = 0; i < c.values.size(); ++i) CHECK(std::abs(c.values[i] - a.values[i] - b.values[i]) < 1e-20);
  // Out-of-band bins stay zero.
  for (std::size_t i = 0; i < c.values.size(); ++i)
    if (!in_band(c.freq(i), 50e6)) CHECK(c.values[i] == cd(0.0));
}

TEST_CASE("noise is added at the requested in-band SNR", "[signal_model]") {
  const Waveform w(WaveformSpec{});
  const DenseSpectrum s0 = sample_S0(w, SpectrumGrid{-30e6, 48828.125, 1229});
  const auto clean = scene_spectrum({1e-6, 4e-6, 7e-6}, {cd(1.0), cd(0.5, 0.5), cd(-1.0)}, s0);
  Rng rng(17);
  double ratio = 0.0;
  constexpr int kReps = 200;
  for (int r = 0; r < kReps; ++r) {
    const auto noisy = add_noise(clean, 50e6, 10.0, rng);
    double en = 0.0;
    for (std::size_t i = 0; i < noisy.values.size(); ++i) {
      const cd e = noisy.values[i] - clean.values[i];
      if (!in_band(noisy.freq(i), 50e6)) CHECK(e == cd(0.0));
      en += std::norm(e);
    }
    ratio += inband_energy(clean, 50e6) / en;
  }
  CHECK(10.0 * std::log10(ratio / kReps) == Catch::Approx(10.0).margin(0.1));
  CHECK(add_noise(clean, 50e6, INFINITY, rng).values == clean.values);
  CHECK_THROWS_AS(add_noise(clean, 50e6, NAN, rng), std::invalid_argument);
}

TEST_CASE("random scenes respect range, order and separation", "[signal_model]") {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_scene(7, 10.24e-6, 3 * 20e-9, t % 2 ? GainMode::unit : GainMode::uniform, rng);
    REQUIRE(s.size() == 7);
    CHECK_NOTHROW(s.validate(10.24e-6));
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s.delays[k] - s.delays[k - 1] >= 60e-9);
    for (const auto& g : s.gains) {
      CHECK(std::abs(g) <= 1.0 + 1e-15);
      if (t % 2) CHECK(std::abs(g) == Catch::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(random_scene(10, 1e-6, 0.2e-6, GainMode::unit, rng), std::invalid_argument);
  Rng a(5), b(5);
  CHECK(random_scene(4, 1e-5, 0.0, GainMode::uniform, a).delays == random_scene(4, 1e-5, 0.0, GainMode::uniform, b).delays);
}
