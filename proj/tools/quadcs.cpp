// SPDX-License-Identifier: Apache-2.0
// quadcs: Monte Carlo experiments, single-scene simulation and interpolator design reports.

#include "quadcs/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace quadcs;

namespace {

struct ExperimentArgs {
  std::string preset;
  std::string config;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out = "results";
  bool timing = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentConfig e = a.config.empty() ? preset(a.preset) : experiment_from_key_values(read_key_values(a.config));
  if (a.trials) e.trials = *a.trials;
  if (a.seed) e.seed = *a.seed;
  if (a.workers) e.workers = *a.workers;
  e.record_timing = a.timing;
  const auto records = run_monte_carlo(e, a.out);
  const auto cells = summarize(records);
  std::printf("%-7s %3s %10s %7s %7s %7s %10s %10s %9s\n", "method", "K", "Bcs_hz", "isnr", "sep", "P_succ", "RRMS-TDE",
              "medRRMS-SR", "RSNR_dB");
  for (const auto& c : cells)
    std::printf("%-7s %3d %10.4g %7.3g %7.3g %7.3f %10.4g %10.4g %9.3f\n", method_name(c.method), c.K, c.Bcs, c.isnr_db,
                c.sep_tau0, c.success_prob, c.mean_rrms_tde, c.median_rrms_sr, c.mean_rsnr_db);
  std::printf("wrote %zu trial records to %s\n", records.size(), a.out.c_str());
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::string trace;
};

// One scene from the first K, ISNR and separation entries of the config.
int cmd_simulate(const SimulateArgs& a) {
  const ExperimentConfig e = experiment_from_key_values(read_key_values(a.config));
  const SystemSpec& spec = e.systems.front();
  const QuadCsSystem sys = make_system(spec, code_seed_for(spec.seed, 0));
  const auto& cfg = sys.cfg();
  const int K = e.k_list.front();
  const double isnr = e.isnr_list_db.front();
  Rng scene_rng(mix_seed(a.seed, 1)), noise_rng(mix_seed(a.seed, 2));
  const TargetScene scene = e.scene == SceneMode::pair
                                ? pair_scene(e.sep_list.front() * cfg.tau0, cfg.tau_max, scene_rng)
                                : random_scene(K, cfg.tau_max, e.sep_list.front() * cfg.tau0, e.gains, scene_rng);
  const ComplexVector s = measure(sys, add_noise(scene_spectrum(scene, sys.s0_table()), cfg.B, isnr, noise_rng));

  std::ofstream f(a.out);
  if (!f) throw std::runtime_error("cannot write " + a.out);
  f << "index,freq_hz,re,im\n";
  for (Eigen::Index l = 0; l < s.size(); ++l)
    f << l << ',' << format_number(cfg.freq(l)) << ',' << format_number(s(l).real()) << ','
      << format_number(s(l).imag()) << '\n';
  std::ofstream g(a.out + ".scene.csv");
  if (!g) throw std::runtime_error("cannot write " + a.out + ".scene.csv");
  g << "delay_s,gain_re,gain_im\n";
  for (std::size_t k = 0; k < scene.size(); ++k)
    g << format_number(scene.delays[k]) << ',' << format_number(scene.gains[k].real()) << ','
      << format_number(scene.gains[k].imag()) << '\n';
  std::printf("L=%ld M=%d N=%d L0=%d J=%d f_p=%.6g Hz, %zu components, wrote %s\n", cfg.L, cfg.M, cfg.N, cfg.L0, cfg.J,
              cfg.f_p, scene.size(), a.out.c_str());

  if (!a.trace.empty()) {
    GlsrOptions opt = glsr_options_for(cfg, scene.delays, 1.0, static_cast<int>(scene.size()));
    opt.keep_trace = true;
    const auto r = run_glsr(s, sys, assemble_model(sys), opt);
    std::ofstream t(a.trace);
    if (!t) throw std::runtime_error("cannot write " + a.trace);
    write_pseudospectrum_csv(t, r.trace);
    for (std::size_t k = 0; k < r.delays.size(); ++k)
      std::printf("tau[%zu] true %.9g s, estimate %.9g s\n", k, scene.delays[k], r.delays[k]);
  }
  return 0;
}

int cmd_design(const std::string& config, int trials, std::uint64_t seed) {
  const ExperimentConfig e = experiment_from_key_values(read_key_values(config));
  const auto cfg = e.systems.front().config();
  std::printf("L=%ld M=%d N=%d L0=%d J=%d f_p=%.6g Hz\n", cfg.L, cfg.M, cfg.N, cfg.L0, cfg.J, cfg.f_p);
  std::printf("%3s %16s %16s\n", "K", "error", "error_orth");
  for (const auto& row : design_error_sweep(e.systems.front(), e.k_list, trials, seed))
    std::printf("%3d %16.6e %16.6e\n", row.K, row.mean_error, row.mean_error_orth);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrature compressive sampling delay estimation"};
  app.require_subcommand(1);

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment and write trials.csv and summary.csv");
  auto* preset_opt = exp->add_option("--preset", ea.preset, "Named experiment")->check(CLI::IsMember(preset_names()));
  auto* config_opt = exp->add_option("--config", ea.config, "key=value experiment file")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  exp->add_option("--trials", ea.trials, "Trials per cell")->check(CLI::PositiveNumber);
  exp->add_option("--seed", ea.seed, "Master seed");
  exp->add_option("--workers", ea.workers, "Worker threads")->check(CLI::PositiveNumber);
  exp->add_option("--out", ea.out, "Output directory");
  exp->add_flag("--timing", ea.timing, "Record wall-clock time per estimate");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate one scene and write the compressed measurement");
  sim->add_option("--config", sa.config, "key=value system file")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", sa.seed, "Scene seed");
  sim->add_option("--out", sa.out, "Measurement CSV")->required();
  sim->add_option("--trace", sa.trace, "Also run GLSR with the oracle sector and write its pseudospectrum");

  std::string design_config;
  int design_trials = 20;
  std::uint64_t design_seed = 1;
  auto* des = app.add_subcommand("design", "Print the interpolation error against K");
  des->add_option("--config", design_config, "key=value system file")->required()->check(CLI::ExistingFile);
  des->add_option("--trials", design_trials, "Random sectors per K")->check(CLI::PositiveNumber);
  des->add_option("--seed", design_seed, "Seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*exp) {
      if (ea.preset.empty() && ea.config.empty()) throw CLI::RequiredError("--preset or --config");
      return cmd_experiment(ea);
    }
    if (*sim) return cmd_simulate(sa);
    if (*des) return cmd_design(design_config, design_trials, design_seed);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
