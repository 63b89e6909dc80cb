// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace quadcs {

using Rng = std::mt19937_64;

enum class ChirpDirection { up, down };
enum class GainMode { unit, uniform };

struct WaveformSpec {
  double bandwidth = 50e6;         // B, Hz
  double pulse_width = 10.24e-6;   // Tpw, s
  ChirpDirection direction = ChirpDirection::up;
  bool strict_bandlimit = true;
  double if_center = 0.0;          // informational only
  int oversample = 8;              // DTFT sample rate = oversample * B

  void validate() const {
    if (!(bandwidth > 0.0) || !(pulse_width > 0.0))
      throw std::invalid_argument("waveform: bandwidth and pulse width must be positive");
    if (bandwidth * pulse_width < 1.0) throw std::invalid_argument("waveform: time-bandwidth product below 1");
    if (oversample < 1) throw std::invalid_argument("waveform: oversample must be >= 1");
  }
};

// Half-open band [-B/2, B/2). Grid frequencies sitting exactly on +B/2 are out of band.
inline bool in_band(double f, double B) {
  const double x = f / (0.5 * B);
  return x >= -1.0 - 1e-12 && x < 1.0 - 1e-12;
}

// LFM pulse sampled at midpoints t_n = (n + 0.5)/fs over [0, Tpw].
class Waveform {
 public:
  explicit Waveform(WaveformSpec spec) : spec_(spec) {
    spec_.validate();
    fs_ = spec_.oversample * spec_.bandwidth;
    const auto ns = static_cast<std::size_t>(std::llround(spec_.pulse_width * fs_));
    const double mu = spec_.bandwidth / spec_.pulse_width;
    const double sign = spec_.direction == ChirpDirection::up ? 1.0 : -1.0;
    samples_.resize(ns);
    for (std::size_t n = 0; n < ns; ++n) {
      const double u = sample_time(n) - 0.5 * spec_.pulse_width;
      samples_[n] = std::polar(1.0, sign * kPi * mu * u * u);
    }
  }

  const WaveformSpec& spec() const { return spec_; }
  double sample_rate() const { return fs_; }
  double sample_time(std::size_t n) const { return (static_cast<double>(n) + 0.5) / fs_; }
  const std::vector<cd>& samples() const { return samples_; }

  // DTFT scaled by the sample period, no band truncation.
  cd spectrum_raw(double f) const {
    const double dphi = -kTwoPi * f / fs_;
    cd acc = 0.0;
    constexpr std::size_t kReseed = 128;
    for (std::size_t start = 0; start < samples_.size(); start += kReseed) {
      cd ph = std::polar(1.0, dphi * (static_cast<double>(start) + 0.5));
      const cd step = std::polar(1.0, dphi);
      const std::size_t stop = std::min(samples_.size(), start + kReseed);
      for (std::size_t n = start; n < stop; ++n) {
        acc += samples_[n] * ph;
        ph *= step;
      }
    }
    return acc / fs_;
  }

  cd spectrum(double f) const {
    if (spec_.strict_bandlimit && !in_band(f, spec_.bandwidth)) return 0.0;
    return spectrum_raw(f);
  }

 private:
  WaveformSpec spec_;
  double fs_ = 0.0;
  std::vector<cd> samples_;
};

inline std::vector<cd> eval_S0(const Waveform& w, const std::vector<double>& freqs) {
  std::vector<cd> out(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) out[i] = w.spectrum(freqs[i]);
  return out;
}

inline std::vector<cd> eval_S0(const WaveformSpec& w, const std::vector<double>& freqs) {
  return eval_S0(Waveform(w), freqs);
}

struct SpectrumGrid {
  double f_start = 0.0;
  double df = 1.0;
  std::size_t size = 0;
  double freq(std::size_t i) const { return f_start + static_cast<double>(i) * df; }
};

struct DenseSpectrum {
  double f_start = 0.0;
  double df = 1.0;
  std::vector<cd> values;

  SpectrumGrid grid() const { return {f_start, df, values.size()}; }
  double freq(std::size_t i) const { return f_start + static_cast<double>(i) * df; }
};

inline DenseSpectrum sample_S0(const Waveform& w, const SpectrumGrid& grid) {
  DenseSpectrum out{grid.f_start, grid.df, std::vector<cd>(grid.size)};
  for (std::size_t i = 0; i < grid.size; ++i) out.values[i] = w.spectrum(grid.freq(i));
  return out;
}

struct TargetScene {
  std::vector<double> delays;  // s, strictly increasing
  std::vector<cd> gains;

  std::size_t size() const { return delays.size(); }

  void validate(double tau_max) const {
    if (delays.size() != gains.size()) throw std::invalid_argument("scene: delay/gain count mismatch");
    for (std::size_t k = 0; k < delays.size(); ++k) {
      if (!(delays[k] > 0.0) || delays[k] > tau_max * (1.0 + 1e-12))
        throw std::invalid_argument("scene: delay outside (0, tau_max]");
      if (k > 0 && !(delays[k] > delays[k - 1])) throw std::invalid_argument("scene: delays not strictly increasing");
      if (std::abs(gains[k]) == 0.0) throw std::invalid_argument("scene: zero gain");
    }
  }
};

// values[i] = S0(f_i) * sum_k g_k exp(-j 2 pi f_i tau_k), with S0 already sampled on the grid.
inline DenseSpectrum scene_spectrum(const std::vector<double>& delays, const std::vector<cd>& gains,
                                    const DenseSpectrum& s0) {
  if (delays.size() != gains.size()) throw std::invalid_argument("scene_spectrum: delay/gain count mismatch");
  DenseSpectrum out{s0.f_start, s0.df, std::vector<cd>(s0.values.size())};
  for (std::size_t i = 0; i < s0.values.size(); ++i) {
    if (s0.values[i] == 0.0) continue;
    const double f = s0.freq(i);
    cd acc = 0.0;
    for (std::size_t k = 0; k < delays.size(); ++k) acc += gains[k] * std::polar(1.0, -kTwoPi * f * delays[k]);
    out.values[i] = s0.values[i] * acc;
  }
  return out;
}

inline DenseSpectrum scene_spectrum(const TargetScene& scene, const DenseSpectrum& s0) {
  return scene_spectrum(scene.delays, scene.gains, s0);
}

inline DenseSpectrum scene_spectrum(const TargetScene& scene, const Waveform& w, const SpectrumGrid& grid) {
  return scene_spectrum(scene, sample_S0(w, grid));
}

inline double inband_energy(const DenseSpectrum& spec, double B) {
  double e = 0.0;
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    if (in_band(spec.freq(i), B)) e += std::norm(spec.values[i]);
  return e;
}

// Circular complex Gaussian noise on in-band bins; isnr_db = +inf returns the input unchanged.
inline DenseSpectrum add_noise(const DenseSpectrum& spec, double B, double isnr_db, Rng& rng) {
  if (std::isinf(isnr_db) && isnr_db > 0.0) return spec;
  if (std::isnan(isnr_db)) throw std::invalid_argument("add_noise: isnr is NaN");
  std::size_t n_inband = 0;
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    if (in_band(spec.freq(i), B)) ++n_inband;
  const double es = inband_energy(spec, B);
  if (n_inband == 0 || !(es > 0.0)) throw std::invalid_argument("add_noise: zero in-band signal energy");
  const double var = es / (std::pow(10.0, isnr_db / 10.0) * static_cast<double>(n_inband));
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * var));
  DenseSpectrum out = spec;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!in_band(out.freq(i), B)) continue;
    const double re = gauss(rng);
    const double im = gauss(rng);
    out.values[i] += cd(re, im);
  }
  return out;
}

inline cd random_gain(GainMode mode, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mag = mode == GainMode::unit ? 1.0 : 1.0 - u(rng);
  const double phase = kTwoPi * (1.0 - u(rng));
  return std::polar(mag, phase);
}

inline TargetScene random_scene(int K, double tau_max, double min_sep, GainMode mode, Rng& rng,
                                int max_attempts = 100000) {
  if (K < 1) throw std::invalid_argument("random_scene: K must be positive");
  if (!(tau_max > 0.0) || min_sep < 0.0) throw std::invalid_argument("random_scene: bad tau_max or min_sep");
  if (static_cast<double>(K) * min_sep >= tau_max)
    throw std::invalid_argument("random_scene: K * min_sep must be below tau_max");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TargetScene scene;
  scene.delays.resize(K);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (auto& t : scene.delays) t = tau_max * (1.0 - u(rng));
    std::sort(scene.delays.begin(), scene.delays.end());
    bool ok = true;
    for (int k = 1; k < K && ok; ++k) {
      const double gap = scene.delays[k] - scene.delays[k - 1];
      ok = gap > 0.0 && gap >= min_sep;
    }
    if (!ok) continue;
    scene.gains.resize(K);
    for (auto& g : scene.gains) g = random_gain(mode, rng);
    return scene;
  }
  throw std::runtime_error("random_scene: spacing infeasible after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace quadcs
