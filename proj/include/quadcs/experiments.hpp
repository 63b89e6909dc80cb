// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/glsr.hpp"
#include "quadcs/omp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace quadcs {

enum class Method { glsr1, glsr2, omp1, omp2 };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::glsr1: return "GLSR-1";
    case Method::glsr2: return "GLSR-2";
    case Method::omp1: return "OMP-1";
    case Method::omp2: return "OMP-2";
  }
  return "?";
}

inline Method parse_method(std::string s) {
  std::string t;
  for (char c : s)
    if (c != '-' && c != '_') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "glsr1") return Method::glsr1;
  if (t == "glsr2") return Method::glsr2;
  if (t == "omp1") return Method::omp1;
  if (t == "omp2") return Method::omp2;
  throw std::invalid_argument("unknown method: " + s);
}

struct DelayMatch {
  std::vector<double> truth;     // ascending
  std::vector<double> estimate;  // ascending, paired index-wise with truth
  std::vector<double> error;     // estimate - truth
  bool success = false;
};

inline DelayMatch match_delays(std::vector<double> truth, std::vector<double> estimate, double tau0) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("match_delays: count mismatch");
  std::sort(truth.begin(), truth.end());
  std::sort(estimate.begin(), estimate.end());
  DelayMatch m;
  m.success = true;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    m.error.push_back(estimate[k] - truth[k]);
    if (!(std::abs(m.error.back()) <= tau0 * (1.0 + 1e-12))) m.success = false;
  }
  m.truth = std::move(truth);
  m.estimate = std::move(estimate);
  return m;
}

struct Metrics {
  double rrms_tde = NAN;  // only when the match succeeded
  double rrms_sr = NAN;
  double signal_energy = 0.0;
  double error_energy = 0.0;
  double rsnr_db = NAN;
};

// Riemann sums over the in-band bins of the grid.
inline Metrics compute_metrics(const DelayMatch& match, double tau0, const DenseSpectrum& recon,
                               const DenseSpectrum& truth, double B) {
  if (recon.values.size() != truth.values.size()) throw std::invalid_argument("compute_metrics: grid mismatch");
  Metrics out;
  if (match.success && !match.error.empty()) {
    double acc = 0.0;
    for (double e : match.error) acc += e * e;
    out.rrms_tde = std::sqrt(acc / static_cast<double>(match.error.size())) / tau0;
  }
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    if (!in_band(truth.freq(i), B)) continue;
    out.signal_energy += std::norm(truth.values[i]);
    out.error_energy += std::norm(truth.values[i] - recon.values[i]);
  }
  if (!(out.signal_energy > 0.0)) throw std::invalid_argument("compute_metrics: zero signal energy");
  out.signal_energy *= truth.df;
  out.error_energy *= truth.df;
  out.rrms_sr = std::sqrt(out.error_energy / out.signal_energy);
  out.rsnr_db = 10.0 * std::log10(out.signal_energy / out.error_energy);
  return out;
}

enum class SceneMode { random, pair };

// Two unit-modulus components a fixed separation apart.
inline TargetScene pair_scene(double separation, double tau_max, Rng& rng) {
  if (!(separation > 0.0) || separation >= tau_max) throw std::invalid_argument("pair_scene: bad separation");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TargetScene s;
  const double t1 = (tau_max - separation) * (1.0 - u(rng));
  s.delays = {t1, t1 + separation};
  s.gains = {random_gain(GainMode::unit, rng), random_gain(GainMode::unit, rng)};
  return s;
}

struct ExperimentConfig {
  std::string name = "custom";
  std::vector<SystemSpec> systems{SystemSpec{}};
  std::vector<Method> methods{Method::glsr1, Method::glsr2, Method::omp1, Method::omp2};
  std::vector<int> k_list{5};
  std::vector<double> isnr_list_db{INFINITY};
  std::vector<double> sep_list{3.0};  // in units of tau0
  SceneMode scene = SceneMode::random;
  GainMode gains = GainMode::unit;
  int trials = 200;
  std::uint64_t seed = 1;
  int workers = 1;
  bool record_timing = false;
  // With several systems, K values not below a system's M are left out for that system.
  bool skip_unresolvable_k = false;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    if (methods.empty()) throw std::invalid_argument("experiment: no methods");
    if (systems.empty()) throw std::invalid_argument("experiment: no system configuration");
    if (k_list.empty() || isnr_list_db.empty() || sep_list.empty())
      throw std::invalid_argument("experiment: empty K, ISNR or separation list");
    if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
    for (const auto& sys : systems) {
      const QuadCsConfig cfg = sys.config();
      for (int K : k_list) {
        if (K < 1) throw std::invalid_argument("experiment: K must be positive");
        if (K >= cfg.M && !skip_unresolvable_k)
          throw std::invalid_argument("experiment: K = " + std::to_string(K) + " not below M = " + std::to_string(cfg.M));
        if (scene == SceneMode::pair && K != 2) throw std::invalid_argument("experiment: pair scenes need K = 2");
        for (double sep : sep_list) {
          if (sep < 0.0) throw std::invalid_argument("experiment: negative separation");
          if (scene == SceneMode::pair && !(sep > 0.0)) throw std::invalid_argument("experiment: pair separation must be > 0");
          if (K * sep * cfg.tau0 >= cfg.tau_max) throw std::invalid_argument("experiment: K * separation exceeds tau_max");
        }
      }
      if (scene == SceneMode::pair && cfg.M <= 2) throw std::invalid_argument("experiment: pair scenes need M > 2");
    }
    for (double x : isnr_list_db)
      if (std::isnan(x)) throw std::invalid_argument("experiment: ISNR is NaN");
  }
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Method method = Method::glsr1;
  int K = 0;
  double Bcs = 0.0;
  double isnr_db = INFINITY;
  double sep_tau0 = 0.0;
  TargetScene truth;
  std::vector<double> delays;
  ComplexVector gains;
  bool success = false;
  double rrms_tde = NAN;
  double rrms_sr = NAN;
  double signal_energy = 0.0;
  double error_energy = 0.0;
  double rsnr_db = NAN;
  double wall_ms = 0.0;
  std::string failure;  // empty unless the estimator threw
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline constexpr const char* kTrialCsvHeader =
    "trial,seed,method,K,Bcs_hz,isnr_db,sep_tau0,success,rrms_tde,rrms_sr,rsnr_db,wall_ms";

inline void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kTrialCsvHeader << '\n';
  for (const auto& r : records)
    os << r.trial << ',' << r.seed << ',' << method_name(r.method) << ',' << r.K << ',' << format_number(r.Bcs) << ','
       << format_number(r.isnr_db) << ',' << format_number(r.sep_tau0) << ',' << (r.success ? 1 : 0) << ','
       << format_number(r.rrms_tde) << ',' << format_number(r.rrms_sr) << ',' << format_number(r.rsnr_db) << ','
       << format_number(r.wall_ms) << '\n';
}

struct CellSummary {
  Method method = Method::glsr1;
  int K = 0;
  double Bcs = 0.0;
  double isnr_db = INFINITY;
  double sep_tau0 = 0.0;
  int trials = 0;
  double success_prob = 0.0;
  double mean_rrms_tde = NAN;  // over successful trials
  double median_rrms_sr = NAN;
  double mean_rrms_sr = NAN;
  double mean_rrms_sr_filtered = NAN;  // trials with RRMS-SR <= 1
  int outliers = 0;                    // trials with RRMS-SR > 1
  double mean_rsnr_db = NAN;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return NAN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Groups records by (method, K, B_cs, ISNR, separation) in order of first appearance.
inline std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<int, int, double, double, double>;
  std::map<Key, std::size_t> index;
  std::vector<CellSummary> cells;
  std::vector<std::vector<const TrialRecord*>> members;
  for (const auto& r : records) {
    const Key key{static_cast<int>(r.method), r.K, r.Bcs, r.isnr_db, r.sep_tau0};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.size()).first;
      CellSummary c;
      c.method = r.method;
      c.K = r.K;
      c.Bcs = r.Bcs;
      c.isnr_db = r.isnr_db;
      c.sep_tau0 = r.sep_tau0;
      cells.push_back(c);
      members.emplace_back();
    }
    members[it->second].push_back(&r);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& c = cells[i];
    std::vector<double> tde, sr, sr_kept, rsnr;
    int ok = 0;
    for (const auto* r : members[i]) {
      if (r->success) {
        ++ok;
        tde.push_back(r->rrms_tde);
      }
      sr.push_back(r->rrms_sr);
      if (r->rrms_sr > 1.0) ++c.outliers;
      else sr_kept.push_back(r->rrms_sr);
      rsnr.push_back(r->rsnr_db);
    }
    c.trials = static_cast<int>(members[i].size());
    c.success_prob = static_cast<double>(ok) / c.trials;
    c.mean_rrms_tde = mean(tde);
    c.median_rrms_sr = median(sr);
    c.mean_rrms_sr = mean(sr);
    c.mean_rrms_sr_filtered = mean(sr_kept);
    c.mean_rsnr_db = mean(rsnr);
  }
  return cells;
}

inline void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "method,K,Bcs_hz,isnr_db,sep_tau0,trials,success_prob,mean_rrms_tde,median_rrms_sr,mean_rrms_sr,"
        "mean_rrms_sr_filtered,outliers,mean_rsnr_db\n";
  for (const auto& c : cells)
    os << method_name(c.method) << ',' << c.K << ',' << format_number(c.Bcs) << ',' << format_number(c.isnr_db) << ','
       << format_number(c.sep_tau0) << ',' << c.trials << ',' << format_number(c.success_prob) << ','
       << format_number(c.mean_rrms_tde) << ',' << format_number(c.median_rrms_sr) << ','
       << format_number(c.mean_rrms_sr) << ',' << format_number(c.mean_rrms_sr_filtered) << ',' << c.outliers << ','
       << format_number(c.mean_rsnr_db) << '\n';
}

// Shared, read-only per-system state for the trial workers.
struct SystemContext {
  QuadCsSystem sys;
  BeamspaceModel model;
  std::optional<GridDictionary> dict1;  // delta_tau = tau0
  std::optional<GridDictionary> dict2;  // delta_tau = tau0 / 2
};

inline SystemContext make_context(const SystemSpec& spec, std::uint64_t code_seed, const std::vector<Method>& methods) {
  SystemContext ctx{make_system(spec, code_seed), {}, {}, {}};
  ctx.model = assemble_model(ctx.sys);
  const auto uses = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
  if (uses(Method::omp1) || uses(Method::glsr2)) ctx.dict1 = build_grid_dictionary(ctx.sys, ctx.sys.cfg().tau0);
  if (uses(Method::omp2)) ctx.dict2 = build_grid_dictionary(ctx.sys, 0.5 * ctx.sys.cfg().tau0);
  return ctx;
}

inline std::uint64_t code_seed_for(std::uint64_t master, std::size_t system_index) {
  return mix_seed(mix_seed(master, 0xC0DEULL), system_index);
}

inline std::uint64_t trial_seed_for(std::uint64_t master, std::size_t trial) { return mix_seed(master, trial); }

struct Estimate {
  std::vector<double> delays;
  ComplexVector gains;
};

inline GlsrOptions glsr_options_for(const QuadCsConfig& cfg, const std::vector<double>& centers, double half_width_tau0,
                                    int K) {
  GlsrOptions o;
  o.sector = Sector::around_delays(cfg, centers, half_width_tau0 * cfg.tau0);
  o.K = K;
  return o;
}

// All requested methods on one trial; returns one record per method, in method order.
inline std::vector<TrialRecord> run_trial(const ExperimentConfig& exp, const SystemContext& ctx, int K, double isnr_db,
                                          double sep_tau0, std::size_t trial) {
  const auto& cfg = ctx.sys.cfg();
  const std::uint64_t tseed = trial_seed_for(exp.seed, trial);
  Rng scene_rng(mix_seed(tseed, 1));
  Rng noise_rng(mix_seed(tseed, 2));
  const TargetScene truth = exp.scene == SceneMode::pair
                                ? pair_scene(sep_tau0 * cfg.tau0, cfg.tau_max, scene_rng)
                                : random_scene(K, cfg.tau_max, sep_tau0 * cfg.tau0, exp.gains, scene_rng);
  const DenseSpectrum clean = scene_spectrum(truth, ctx.sys.s0_table());
  const DenseSpectrum noisy = add_noise(clean, cfg.B, isnr_db, noise_rng);
  const ComplexVector s = measure(ctx.sys, noisy);

  std::optional<Estimate> omp1;
  std::string omp1_failure;
  const auto get_omp1 = [&]() -> const Estimate& {
    if (!omp1 && omp1_failure.empty()) {
      try {
        auto r = run_omp(s, *ctx.dict1, K);
        omp1 = Estimate{r.delays, r.gains};
      } catch (const std::exception& e) {
        omp1_failure = std::string("omp1: ") + e.what();
      }
    }
    if (!omp1) throw std::runtime_error(omp1_failure);
    return *omp1;
  };

  std::vector<TrialRecord> out;
  for (Method m : exp.methods) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = tseed;
    rec.method = m;
    rec.K = K;
    rec.Bcs = cfg.B_cs;
    rec.isnr_db = isnr_db;
    rec.sep_tau0 = sep_tau0;
    rec.truth = truth;
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<Estimate> est;
    try {
      switch (m) {
        case Method::omp1: est = get_omp1(); break;
        case Method::omp2: {
          auto r = run_omp(s, *ctx.dict2, K);
          est = Estimate{r.delays, r.gains};
          break;
        }
        case Method::glsr1: {
          auto r = run_glsr(s, ctx.sys, ctx.model, glsr_options_for(cfg, truth.delays, 1.0, K));
          est = Estimate{r.delays, r.gains};
          break;
        }
        case Method::glsr2: {
          const auto& prior = get_omp1();
          auto r = run_glsr(s, ctx.sys, ctx.model, glsr_options_for(cfg, prior.delays, 2.0, K));
          est = Estimate{r.delays, r.gains};
          break;
        }
      }
    } catch (const std::exception& e) {
      rec.failure = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (exp.record_timing) rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    DenseSpectrum recon;
    if (est) {
      rec.delays = est->delays;
      rec.gains = est->gains;
      recon = reconstruct_spectrum(est->delays, est->gains, ctx.sys.s0_table());
    } else {
      recon = DenseSpectrum{clean.f_start, clean.df, std::vector<cd>(clean.values.size(), 0.0)};
    }
    const DelayMatch match = est ? match_delays(truth.delays, est->delays, cfg.tau0) : DelayMatch{};
    const Metrics met = compute_metrics(match, cfg.tau0, recon, clean, cfg.B);
    rec.success = est && match.success;
    rec.rrms_tde = met.rrms_tde;
    rec.rrms_sr = met.rrms_sr;
    rec.signal_energy = met.signal_energy;
    rec.error_energy = met.error_energy;
    rec.rsnr_db = met.rsnr_db;
    out.push_back(std::move(rec));
  }
  return out;
}

// Runs fn(i) for i in [0, n) on `workers` threads; the first exception is rethrown after joining.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t w = 0; w < nthreads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Records ordered by system, K, ISNR, separation, trial, method.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& exp) {
  exp.validate();
  std::vector<TrialRecord> records;
  for (std::size_t si = 0; si < exp.systems.size(); ++si) {
    const SystemContext ctx = make_context(exp.systems[si], code_seed_for(exp.seed, si), exp.methods);
    for (int K : exp.k_list) {
      if (K >= ctx.sys.cfg().M) continue;
      for (double isnr : exp.isnr_list_db)
        for (double sep : exp.sep_list) {
          std::vector<std::vector<TrialRecord>> slots(static_cast<std::size_t>(exp.trials));
          parallel_for(slots.size(), exp.workers,
                       [&](std::size_t t) { slots[t] = run_trial(exp, ctx, K, isnr, sep, t); });
          for (auto& s : slots)
            for (auto& r : s) records.push_back(std::move(r));
        }
    }
  }
  return records;
}

inline std::vector<double> parse_number_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) {
    if (item == "inf" || item == "+inf" || item == "none") out.push_back(INFINITY);
    else out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config key " + key + ": empty list");
  return out;
}

inline ExperimentConfig experiment_from_key_values(const KeyValues& kv) {
  static const char* known[] = {"B_hz",   "Bcs_hz", "T_s",          "M",      "tau_max_s", "Nc",    "seed",
                                "Tpw_s",  "methods", "trials",      "isnr_list_db", "k_list", "sep_list", "scene",
                                "gains",  "workers"};
  for (const auto& [k, v] : kv)
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known))
      throw std::invalid_argument("unknown config key: " + k);
  ExperimentConfig e;
  e.systems = {system_from_key_values(kv)};
  e.seed = e.systems[0].seed;
  for (const auto& [k, v] : kv) {
    if (k == "methods") {
      e.methods.clear();
      for (const auto& x : split_list(v)) e.methods.push_back(parse_method(x));
    } else if (k == "trials") {
      e.trials = static_cast<int>(parse_int(k, v));
    } else if (k == "isnr_list_db") {
      e.isnr_list_db = parse_number_list(k, v);
    } else if (k == "k_list") {
      e.k_list.clear();
      for (double x : parse_number_list(k, v)) {
        if (x != std::floor(x)) throw std::invalid_argument("k_list: non-integer entry");
        e.k_list.push_back(static_cast<int>(x));
      }
    } else if (k == "sep_list") {
      e.sep_list = parse_number_list(k, v);
    } else if (k == "scene") {
      if (v == "random") e.scene = SceneMode::random;
      else if (v == "pair") e.scene = SceneMode::pair;
      else throw std::invalid_argument("scene must be random or pair");
    } else if (k == "gains") {
      if (v == "unit") e.gains = GainMode::unit;
      else if (v == "uniform") e.gains = GainMode::uniform;
      else throw std::invalid_argument("gains must be unit or uniform");
    } else if (k == "workers") {
      e.workers = static_cast<int>(parse_int(k, v));
    }
  }
  return e;
}

inline SystemSpec default_system() { return SystemSpec{}; }

inline SystemSpec system_with(double Bcs, int M) {
  SystemSpec s;
  s.B_cs = Bcs;
  s.M = M;
  return s;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig3", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11"};
  return names;
}

inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig e;
  e.name = name;
  e.trials = 200;
  if (name == "fig3" || name == "fig5" || name == "fig6") {
    e.systems = {default_system(), system_with(10e6, 12)};
    e.k_list = {1, 3, 5, 7, 9, 11, 13, 15};
    e.skip_unresolvable_k = true;
    if (name == "fig6") {
      e.gains = GainMode::uniform;
      e.sep_list = {0.0};
    }
  } else if (name == "fig7") {
    e.systems.clear();
    for (int M : {12, 14, 16, 18, 20}) e.systems.push_back(system_with(M * 781.25e3, M));
    e.k_list = {5, 10};
    e.gains = GainMode::uniform;
    e.sep_list = {0.0};
  } else if (name == "fig9") {
    e.k_list = {5, 10};
    e.isnr_list_db = {10, 15, 20, 25, 30};
    e.gains = GainMode::uniform;
    e.sep_list = {0.0};
  } else if (name == "fig10" || name == "fig11") {
    e.k_list = {2};
    e.scene = SceneMode::pair;
    e.sep_list.clear();
    for (int i = 1; i <= 20; ++i) e.sep_list.push_back(0.1 * i);
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return e;
}

// Writes trials.csv and summary.csv into out_dir.
inline std::vector<TrialRecord> run_monte_carlo(const ExperimentConfig& exp, const std::string& out_dir) {
  exp.validate();
  auto records = run_experiment(exp);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(std::filesystem::path(out_dir) / "trials.csv");
    if (!f) throw std::runtime_error("cannot write trials.csv in " + out_dir);
    write_trials_csv(f, records);
  }
  {
    std::ofstream f(std::filesystem::path(out_dir) / "summary.csv");
    if (!f) throw std::runtime_error("cannot write summary.csv in " + out_dir);
    write_summary_csv(f, summarize(records));
  }
  return records;
}

struct DesignErrorRow {
  int K = 0;
  double mean_error = 0.0;       // sector-normalized beamformer
  double mean_error_orth = 0.0;  // literal orthonormal beamformer
};

// Interpolation error against K for oracle sectors of half-width tau0 around random scenes.
inline std::vector<DesignErrorRow> design_error_sweep(const SystemSpec& spec, const std::vector<int>& k_list, int trials,
                                                      std::uint64_t seed, double sep_tau0 = 3.0) {
  const QuadCsSystem sys = make_system(spec, code_seed_for(seed, 0));
  const BeamspaceModel model = assemble_model(sys);
  const auto& cfg = sys.cfg();
  std::vector<DesignErrorRow> rows;
  for (int K : k_list) {
    DesignErrorRow row;
    row.K = K;
    for (int t = 0; t < trials; ++t) {
      Rng rng(mix_seed(trial_seed_for(seed, static_cast<std::size_t>(t)), 1));
      const auto scene = random_scene(K, cfg.tau_max, sep_tau0 * cfg.tau0, GainMode::unit, rng);
      const Sector sector = Sector::around_delays(cfg, scene.delays, cfg.tau0);
      row.mean_error += design_interpolation(model, sector, BeamformerMode::sector_normalized).error;
      row.mean_error_orth += design_interpolation(model, sector, BeamformerMode::orthonormal).error;
    }
    row.mean_error /= trials;
    row.mean_error_orth /= trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace quadcs
