// SPDX-License-Identifier: Apache-2.0
#include "catch_amalgamated.hpp"
#include "quadcs/experiments.hpp"

#include <filesystem>
#include <sstream>

using namespace quadcs;

TEST_CASE("method names round trip", "[experiments]") {
  for (Method m : {Method::glsr1, Method::glsr2, Method::omp1, Method::omp2}) CHECK(parse_method(method_name(m)) == m);
  CHECK(parse_method("omp_2") == Method::omp2);
  CHECK_THROWS_AS(parse_method("music"), std::invalid_argument);
}

TEST_CASE("delay matching and success", "[experiments]") {
  const double tau0 = 20e-9;
  auto m = match_delays({3e-6, 1e-6}, {1.01e-6, 2.995e-6}, tau0);
  CHECK(m.success);
  CHECK(m.truth == std::vector<double>{1e-6, 3e-6});
  CHECK(m.error[0] == Catch::Approx(0.01e-6));
  CHECK_FALSE(match_delays({1e-6}, {1.03e-6}, tau0).success);
  CHECK(match_delays({1e-6}, {1e-6 + tau0}, tau0).success);
  CHECK_THROWS_AS(match_delays({1e-6}, {}, tau0), std::invalid_argument);
}

TEST_CASE("reconstruction metrics", "[experiments]") {
  const double tau0 = 20e-9;
  const DenseSpectrum truth{-1.0, 1.0, {cd(1.0), cd(2.0), cd(0.0, 1.0), cd(5.0)}};  // last bin out of band for B = 4
  DenseSpectrum half = truth;
  for (auto& v : half.values) v *= 0.5;
  const auto match = match_delays({1e-6, 2e-6}, {1e-6 + 0.3 * tau0, 2e-6 - 0.4 * tau0}, tau0);
  const Metrics a = compute_metrics(match, tau0, half, truth, 4.0);
  CHECK(a.rrms_tde == Catch::Approx(std::sqrt((0.09 + 0.16) / 2.0)));
  CHECK(a.rrms_sr == Catch::Approx(0.5));
  CHECK(a.rsnr_db == Catch::Approx(20.0 * std::log10(2.0)));
  CHECK(a.signal_energy == Catch::Approx(6.0));
  const DenseSpectrum zero{truth.f_start, truth.df, std::vector<cd>(4)};
  const Metrics z = compute_metrics(DelayMatch{}, tau0, zero, truth, 4.0);
  CHECK(z.rrms_sr == Catch::Approx(1.0));
  CHECK(z.rsnr_db == Catch::Approx(0.0).margin(1e-12));
  CHECK(std::isnan(z.rrms_tde));
  CHECK(std::isinf(compute_metrics(match, tau0, truth, truth, 4.0).rsnr_db));
}

TEST_CASE("summary statistics", "[experiments]") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
  std::vector<TrialRecord> recs(4);
  const double sr[] = {0.1, 0.3, 2.0, 0.2};
  for (int i = 0; i < 4; ++i) {
    recs[i].trial = static_cast<std::size_t>(i);
    recs[i].K = 2;
    recs[i].success = i != 2;
    recs[i].rrms_tde = i != 2 ? 0.1 * (i + 1) : NAN;
    recs[i].rrms_sr = sr[i];
    recs[i].rsnr_db = 10.0 * i;
  }
  const auto cells = summarize(recs);
  REQUIRE(cells.size() == 1);
  const auto& c = cells[0];
  CHECK(c.trials == 4);
  CHECK(c.success_prob == 0.75);
  CHECK(c.mean_rrms_tde == Catch::Approx((0.1 + 0.2 + 0.4) / 3.0));
  CHECK(c.median_rrms_sr == Catch::Approx(0.25));
  CHECK(c.outliers == 1);
  CHECK(c.mean_rrms_sr_filtered == Catch::Approx(0.2));
  CHECK(c.mean_rsnr_db == Catch::Approx(15.0));
}

TEST_CASE("trial CSV format", "[experiments]") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  TrialRecord r;
  r.trial = 3;
  r.seed = 77;
  r.method = Method::omp2;
  r.K = 5;
  r.Bcs = 12.5e6;
  r.sep_tau0 = 3;
  r.success = true;
  r.rrms_tde = 0.5;
  r.rrms_sr = 0.25;
  r.rsnr_db = 12;
  std::ostringstream os;
  write_trials_csv(os, {r});
  CHECK(os.str() ==
        "trial,seed,method,K,Bcs_hz,isnr_db,sep_tau0,success,rrms_tde,rrms_sr,rsnr_db,wall_ms\n"
        "3,77,OMP-2,5,12500000,inf,3,1,0.5,0.25,12,0\n");
}

TEST_CASE("experiment config from key=value text", "[experiments]") {
  std::istringstream in(
      "Bcs_hz=10e6\nM=12\nseed=9\nmethods=GLSR-1, OMP-1\ntrials=7\nisnr_list_db=inf,20\nk_list=1,3\nsep_list=0\n");
  const auto e = experiment_from_key_values(parse_key_values(in));
  CHECK(e.systems[0].M == 12);
  CHECK(e.seed == 9);
  CHECK(e.methods == std::vector<Method>{Method::glsr1, Method::omp1});
  CHECK(e.trials == 7);
  CHECK(std::isinf(e.isnr_list_db[0]));
  CHECK(e.isnr_list_db[1] == 20.0);
  CHECK(e.k_list == std::vector<int>{1, 3});
  CHECK_NOTHROW(e.validate());
  std::istringstream bad("Bcs_hz=10e6\ncolour=blue\n");
  CHECK_THROWS_AS(experiment_from_key_values(parse_key_values(bad)), std::invalid_argument);
  std::istringstream badk("k_list=1.5\n");
  CHECK_THROWS_AS(experiment_from_key_values(parse_key_values(badk)), std::invalid_argument);
}

TEST_CASE("presets are valid", "[experiments]") {
  for (const auto& name : preset_names()) {
    const auto e = preset(name);
    CHECK_NOTHROW(e.validate());
  }
  const auto f7 = preset("fig7");
  REQUIRE(f7.systems.size() == 5);
  for (const auto& s : f7.systems) CHECK(s.config().f_p == Catch::Approx(781250.0));
  CHECK(preset("fig10").sep_list.size() == 20);
  CHECK(preset("fig6").systems[1].config().J == 60);
  CHECK_THROWS_AS(preset("fig4"), std::invalid_argument);
  ExperimentConfig bad;
  bad.k_list = {16};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("small experiment is deterministic and worker independent", "[experiments]") {
  ExperimentConfig e;
  e.k_list = {2, 3};
  e.isnr_list_db = {INFINITY, 20.0};
  e.trials = 3;
  e.seed = 5;
  const auto csv = [](const std::vector<TrialRecord>& r) {
    std::ostringstream os;
    write_trials_csv(os, r);
    return os.str();
  };
  const auto one = run_experiment(e);
  e.workers = 4;
  const auto four = run_experiment(e);
  CHECK(csv(one) == csv(four));
  CHECK(one.size() == 2 * 2 * 3 * 4);
  for (const auto& r : one) {
    CHECK(r.failure.empty());
    if (r.method == Method::glsr1 && std::isinf(r.isnr_db)) CHECK(r.success);
  }
  e.seed = 6;
  CHECK(csv(run_experiment(e)) != csv(one));
}

TEST_CASE("GLSR-1 beats OMP-1 on a small noise-free run", "[experiments]") {
  ExperimentConfig e;
  e.methods = {Method::glsr1, Method::omp1};
  e.trials = 10;
  e.seed = 2;
  e.workers = 4;
  const auto cells = summarize(run_experiment(e));
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].success_prob == 1.0);
  CHECK(cells[0].mean_rrms_tde < 0.05);
  CHECK(cells[0].median_rrms_sr < cells[1].median_rrms_sr);
}

TEST_CASE("pair scenes and Monte Carlo output files", "[experiments]") {
  ExperimentConfig e = preset("fig10");
  e.sep_list = {1.5};
  e.trials = 2;
  const auto dir = std::filesystem::temp_directory_path() / "quadcs_mc_test";
  std::filesystem::remove_all(dir);
  const auto recs = run_monte_carlo(e, dir.string());
  CHECK(recs.size() == 8);
  for (const auto& r : recs) CHECK(r.truth.delays[1] - r.truth.delays[0] == Catch::Approx(1.5 * 20e-9));
  CHECK(std::filesystem::exists(dir / "trials.csv"));
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("design error sweep", "[experiments]") {
  const auto rows = design_error_sweep(SystemSpec{}, {1, 5}, 2, 3);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.mean_error > 0.0);
    CHECK(r.mean_error_orth <= r.mean_error + 1e-9);
  }
  CHECK(rows[1].mean_error > rows[0].mean_error);
}
