// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/signal_model.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace quadcs {

struct QuadCsConfig {
  double B = 0.0;        // signal bandwidth, Hz
  double B_cs = 0.0;     // sampling bandwidth, Hz
  double T = 0.0;        // observation length, s
  long L = 0;            // measurement length
  int M = 0;             // snapshot length (even)
  int M0 = 0;
  int N = 0;             // number of snapshots
  double f_p = 0.0;      // spreading-code repetition rate, Hz
  double df = 0.0;       // frequency grid step, Hz
  int L0 = 0;
  int J = 0;             // virtual array length
  double tau_max = 0.0;  // s
  double tau0 = 0.0;     // 1/B
  double Delta = 0.0;    // B / B_cs
  bool ambiguous = false;  // f_p > 1/tau_max, delays resolved by sector wrap counts

  // Bin index of grid frequency l (0-based): f_(l) = bin(l) * df.
  long bin(long l) const { return l - L / 2; }
  double freq(long l) const { return static_cast<double>(bin(l)) * df; }
  // Half the signal band in grid bins.
  double band_half_bins() const { return 0.5 * B / df; }
  // Dense bins needed by the measurement map.
  long dense_first_bin() const { return -L / 2 - static_cast<long>(L0) * N; }
  long dense_last_bin() const { return L / 2 - 1 + static_cast<long>(L0) * N; }
  SpectrumGrid dense_grid() const {
    return {static_cast<double>(dense_first_bin()) * df, df,
            static_cast<std::size_t>(dense_last_bin() - dense_first_bin() + 1)};
  }
  double theta_of(double tau) const { return kTwoPi * f_p * tau; }
};

inline QuadCsConfig derive_config(double B, double B_cs, double T, int M, std::optional<double> tau_max = {}) {
  if (M <= 0 || M % 2 != 0) throw std::invalid_argument("derive_config: M must be even and positive");
  if (!(B > 0.0) || !(B_cs > 0.0) || B_cs > B) throw std::invalid_argument("derive_config: need 0 < B_cs <= B");
  if (!(T > 0.0)) throw std::invalid_argument("derive_config: T must be positive");
  QuadCsConfig c;
  c.B = B;
  c.B_cs = B_cs;
  c.T = T;
  c.M = M;
  c.M0 = M / 2;
  c.L = static_cast<long>(std::floor(T * B_cs / M + 1e-9)) * M;
  if (c.L < M) throw std::invalid_argument("derive_config: T * B_cs shorter than M");
  c.N = static_cast<int>(c.L / M);
  c.f_p = B_cs / M;
  c.df = B_cs / static_cast<double>(c.L);
  c.L0 = static_cast<int>(std::ceil((B + B_cs) / (2.0 * c.f_p) - 1e-9)) - 1;
  // Smallest J whose columns cover every in-band harmonic for all snapshots.
  const double nfrac = static_cast<double>(c.N - 1) / c.N;
  c.J = c.L0 + 1 + static_cast<int>(std::floor((B - B_cs) / (2.0 * c.f_p) + nfrac + 1e-9));
  if (c.J < M) throw std::invalid_argument("derive_config: J < M");
  c.tau0 = 1.0 / B;
  c.Delta = B / B_cs;
  c.tau_max = tau_max.value_or(0.5 * T);
  if (!(c.tau_max > 0.0)) throw std::invalid_argument("derive_config: tau_max must be positive");
  if (c.f_p * c.tau_max > c.N * (1.0 + 1e-12))
    throw std::invalid_argument("derive_config: f_p * tau_max exceeds N");
  c.ambiguous = c.f_p * c.tau_max > 1.0 + 1e-12;
  return c;
}

struct SpreadingCode {
  double f_p = 0.0;
  int Nc = 0;
  std::vector<int> chips;  // empty when built from coefficients
  int L_max = 0;
  std::vector<cd> rho;     // rho[l + L_max], l in [-L_max, L_max]

  cd coef(int l) const {
    if (l < -L_max || l > L_max) return 0.0;
    return rho[static_cast<std::size_t>(l + L_max)];
  }
};

inline int default_chip_count(const QuadCsConfig& cfg) {
  return 2 * static_cast<int>(std::ceil(cfg.B / cfg.f_p - 1e-9));
}

inline int code_harmonics(const QuadCsConfig& cfg) {
  return std::max(cfg.L0, static_cast<int>(std::ceil(cfg.B / cfg.f_p - 1e-9)));
}

// Rectangular-chip Fourier coefficients.
inline SpreadingCode code_from_chips(double f_p, const std::vector<int>& chips, int L_max) {
  if (chips.empty()) throw std::invalid_argument("spreading code: no chips");
  if (L_max < 0) throw std::invalid_argument("spreading code: negative harmonic count");
  SpreadingCode code;
  code.f_p = f_p;
  code.Nc = static_cast<int>(chips.size());
  code.chips = chips;
  code.L_max = L_max;
  code.rho.assign(static_cast<std::size_t>(2 * L_max + 1), 0.0);
  double mean = 0.0;
  for (int c : chips) {
    if (c != 1 && c != -1) throw std::invalid_argument("spreading code: chips must be +-1");
    mean += c;
  }
  code.rho[static_cast<std::size_t>(L_max)] = mean / code.Nc;
  for (int l = 1; l <= L_max; ++l) {
    cd acc = 0.0;
    for (int m = 0; m < code.Nc; ++m)
      acc += static_cast<double>(chips[m]) * std::polar(1.0, -kTwoPi * l * (m + 0.5) / code.Nc);
    const cd r = std::sin(kPi * l / code.Nc) / (kPi * l) * acc;
    code.rho[static_cast<std::size_t>(L_max + l)] = r;
    code.rho[static_cast<std::size_t>(L_max - l)] = std::conj(r);
  }
  return code;
}

// Direct injection of coefficients for l = 0..L_max; negative harmonics are conjugates.
inline SpreadingCode code_from_coefficients(double f_p, const std::vector<cd>& nonneg) {
  if (nonneg.empty()) throw std::invalid_argument("spreading code: no coefficients");
  SpreadingCode code;
  code.f_p = f_p;
  code.L_max = static_cast<int>(nonneg.size()) - 1;
  code.rho.assign(static_cast<std::size_t>(2 * code.L_max + 1), 0.0);
  code.rho[static_cast<std::size_t>(code.L_max)] = nonneg[0].real();
  for (int l = 1; l <= code.L_max; ++l) {
    code.rho[static_cast<std::size_t>(code.L_max + l)] = nonneg[static_cast<std::size_t>(l)];
    code.rho[static_cast<std::size_t>(code.L_max - l)] = std::conj(nonneg[static_cast<std::size_t>(l)]);
  }
  return code;
}

inline SpreadingCode gen_spreading_code(const QuadCsConfig& cfg, int Nc, Rng& rng) {
  if (Nc < default_chip_count(cfg))
    throw std::invalid_argument("gen_spreading_code: N_c = " + std::to_string(Nc) + " below 2*ceil(B*T_p) = " +
                                std::to_string(default_chip_count(cfg)));
  std::bernoulli_distribution coin(0.5);
  std::vector<int> chips(static_cast<std::size_t>(Nc));
  for (auto& c : chips) c = coin(rng) ? 1 : -1;
  return code_from_chips(cfg.f_p, chips, code_harmonics(cfg));
}

// Configuration, code, waveform and the waveform spectrum tabulated on the dense grid.
class QuadCsSystem {
 public:
  QuadCsSystem(QuadCsConfig cfg, SpreadingCode code, WaveformSpec wave)
      : cfg_(cfg), code_(std::move(code)), wave_(wave) {
    if (code_.L_max < cfg_.L0) throw std::invalid_argument("system: code has fewer than L0 harmonics");
    if (std::abs(code_.f_p - cfg_.f_p) > 1e-9 * cfg_.f_p) throw std::invalid_argument("system: code f_p mismatch");
    if (std::abs(wave_.spec().bandwidth - cfg_.B) > 1e-9 * cfg_.B)
      throw std::invalid_argument("system: waveform bandwidth differs from B");
    s0_ = sample_S0(wave_, cfg_.dense_grid());
  }

  const QuadCsConfig& cfg() const { return cfg_; }
  const SpreadingCode& code() const { return code_; }
  const Waveform& waveform() const { return wave_; }
  const DenseSpectrum& s0_table() const { return s0_; }

  bool has_bin(long bin) const { return bin >= cfg_.dense_first_bin() && bin <= cfg_.dense_last_bin(); }
  cd s0_at_bin(long bin) const { return s0_.values[static_cast<std::size_t>(bin - cfg_.dense_first_bin())]; }

  // S0 at an arbitrary frequency, via the table when f sits on the grid.
  cd s0(double f) const {
    const double x = f / cfg_.df;
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9 && has_bin(static_cast<long>(r))) return s0_at_bin(static_cast<long>(r));
    return wave_.spectrum(f);
  }

 private:
  QuadCsConfig cfg_;
  SpreadingCode code_;
  Waveform wave_;
  DenseSpectrum s0_;
};

inline cd atom_phi(const QuadCsSystem& sys, double f, double tau) {
  const auto& c = sys.cfg();
  cd acc = 0.0;
  for (int l = -c.L0; l <= c.L0; ++l) {
    const cd r = sys.code().coef(l);
    if (r == 0.0) continue;
    const double g = f - l * c.f_p;
    const cd s = sys.s0(g);
    if (s == 0.0) continue;
    acc += r * s * std::polar(1.0, -kTwoPi * g * tau);
  }
  return c.B * acc;
}

// L x K measurement matrix; entry (l, k) = atom_phi(f_(l), tau_k).
inline ComplexMatrix build_Phi(const QuadCsSystem& sys, const std::vector<double>& delays) {
  const auto& c = sys.cfg();
  const int nl = 2 * c.L0 + 1;
  ComplexMatrix Phi(c.L, static_cast<Eigen::Index>(delays.size()));
  std::vector<cd> harm(static_cast<std::size_t>(nl));
  std::vector<cd> rho(static_cast<std::size_t>(nl));
  for (int i = 0; i < nl; ++i) rho[static_cast<std::size_t>(i)] = c.B * sys.code().coef(i - c.L0);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    const double tau = delays[k];
    for (int i = 0; i < nl; ++i)
      harm[static_cast<std::size_t>(i)] = rho[static_cast<std::size_t>(i)] * std::polar(1.0, kTwoPi * (i - c.L0) * c.f_p * tau);
    for (long l = 0; l < c.L; ++l) {
      const long b = c.bin(l);
      cd acc = 0.0;
      for (int i = 0; i < nl; ++i) {
        const cd s = sys.s0_at_bin(b - static_cast<long>(i - c.L0) * c.N);
        if (s != 0.0) acc += harm[static_cast<std::size_t>(i)] * s;
      }
      Phi(l, static_cast<Eigen::Index>(k)) = acc * std::polar(1.0, -kTwoPi * c.freq(l) * tau);
    }
  }
  return Phi;
}

inline ComplexVector measure(const QuadCsSystem& sys, const DenseSpectrum& spec) {
  const auto& c = sys.cfg();
  if (std::abs(spec.df - c.df) > 1e-9 * c.df) throw std::invalid_argument("measure: grid spacing differs from df");
  const double x0 = spec.f_start / c.df;
  const long first = std::lround(x0);
  if (std::abs(x0 - static_cast<double>(first)) > 1e-6) throw std::invalid_argument("measure: grid not aligned to df");
  const long last = first + static_cast<long>(spec.values.size()) - 1;
  if (first > c.dense_first_bin() || last < c.dense_last_bin())
    throw std::invalid_argument("measure: spectrum support does not cover +-(B_cs/2 + L0 f_p)");
  ComplexVector s = ComplexVector::Zero(c.L);
  for (long l = 0; l < c.L; ++l) {
    cd acc = 0.0;
    for (int lp = -c.L0; lp <= c.L0; ++lp) {
      const long b = c.bin(l) - static_cast<long>(lp) * c.N;
      acc += sys.code().coef(lp) * spec.values[static_cast<std::size_t>(b - first)];
    }
    s(l) = c.B * acc;
  }
  return s;
}

// Flat key=value text; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& v, char sep = ',') {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const auto cut = v.find(sep, start);
    const auto item = trim(v.substr(start, cut == std::string::npos ? std::string::npos : cut - start));
    if (!item.empty()) items.push_back(item);
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return items;
}

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_key_values(in);
}

struct SystemSpec {
  double B = 50e6;
  double B_cs = 12.5e6;
  double T = 20.48e-6;
  int M = 16;
  double tau_max = 10.24e-6;
  int Nc = 0;  // 0 selects 2*ceil(B/f_p)
  std::uint64_t seed = 1;
  WaveformSpec wave{};

  QuadCsConfig config() const { return derive_config(B, B_cs, T, M, tau_max); }
};

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number: " + v);
  }
  if (pos != v.size()) throw std::invalid_argument("config key " + key + ": trailing characters: " + v);
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x)) throw std::invalid_argument("config key " + key + ": not an integer: " + v);
  return static_cast<long long>(x);
}

// Reads the system keys (B_hz, Bcs_hz, T_s, M, tau_max_s, Nc, seed, Tpw_s); others are left to the caller.
inline SystemSpec system_from_key_values(const KeyValues& kv) {
  SystemSpec s;
  for (const auto& [k, v] : kv) {
    if (k == "B_hz") s.B = parse_double(k, v);
    else if (k == "Bcs_hz") s.B_cs = parse_double(k, v);
    else if (k == "T_s") s.T = parse_double(k, v);
    else if (k == "M") s.M = static_cast<int>(parse_int(k, v));
    else if (k == "tau_max_s") s.tau_max = parse_double(k, v);
    else if (k == "Nc") s.Nc = static_cast<int>(parse_int(k, v));
    else if (k == "seed") s.seed = static_cast<std::uint64_t>(parse_int(k, v));
    else if (k == "Tpw_s") s.wave.pulse_width = parse_double(k, v);
  }
  s.wave.bandwidth = s.B;
  return s;
}

inline std::string to_key_values(const SystemSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "B_hz=" << s.B << "\nBcs_hz=" << s.B_cs << "\nT_s=" << s.T << "\nM=" << s.M << "\ntau_max_s=" << s.tau_max
     << "\nNc=" << s.Nc << "\nseed=" << s.seed << "\n";
  return os.str();
}

// Builds the system with a spreading code drawn from `code_seed`.
inline QuadCsSystem make_system(const SystemSpec& s, std::uint64_t code_seed) {
  const QuadCsConfig cfg = s.config();
  Rng rng(code_seed);
  const int nc = s.Nc > 0 ? s.Nc : default_chip_count(cfg);
  WaveformSpec w = s.wave;
  w.bandwidth = cfg.B;
  return QuadCsSystem(cfg, gen_spreading_code(cfg, nc, rng), w);
}

}  // namespace quadcs
