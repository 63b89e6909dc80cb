// SPDX-License-Identifier: Apache-2.0
#include "catch_amalgamated.hpp"
#include "quadcs/omp.hpp"

using namespace quadcs;

TEST_CASE("grid dictionary layout", "[omp]") {
  const QuadCsSystem sys = make_system(SystemSpec{}, 2);
  const auto d = build_grid_dictionary(sys, sys.cfg().tau0);
  CHECK(d.size() == 512);
  CHECK(d.delays.front() == Catch::Approx(20e-9));
  CHECK(d.delays.back() == Catch::Approx(10.24e-6));
  CHECK(d.columns.rows() == 256);
  CHECK((d.columns.col(7) - build_Phi(sys, {d.delays[7]}).col(0)).norm() < 1e-12 * d.norms(7));
  CHECK(build_grid_dictionary(sys, 0.5 * sys.cfg().tau0).size() == 1024);
  CHECK_THROWS_AS(build_grid_dictionary(sys, 0.0), std::invalid_argument);
}

TEST_CASE("OMP recovers on-grid components exactly", "[omp]") {
  const QuadCsSystem sys = make_system(SystemSpec{}, 2);
  const auto d = build_grid_dictionary(sys, sys.cfg().tau0);
  const std::vector<std::size_t> idx{40, 200, 333};
  const std::vector<cd> g{cd(1.0), cd(-0.5, 0.5), cd(0.0, 0.8)};
  ComplexVector s = ComplexVector::Zero(256);
  for (std::size_t k = 0; k < 3; ++k) s += g[k] * d.columns.col(static_cast<Eigen::Index>(idx[k]));
  const auto r = run_omp(s, d, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(r.delays[k] == d.delays[idx[k]]);
    CHECK(std::abs(r.gains(static_cast<Eigen::Index>(k)) - g[k]) < 1e-10);
  }
  CHECK(r.residual_norms.back() < 1e-10 * s.norm());
  for (std::size_t i = 1; i < r.residual_norms.size(); ++i) CHECK(r.residual_norms[i] <= r.residual_norms[i - 1]);
}

TEST_CASE("OMP on off-grid data stays on the grid", "[omp]") {
  const QuadCsSystem sys = make_system(SystemSpec{}, 4);
  const auto d = build_grid_dictionary(sys, sys.cfg().tau0);
  const ComplexVector s = build_Phi(sys, {3.01e-6}).col(0);
  const auto r = run_omp(s, d, 1);
  CHECK(std::abs(r.delays[0] - 3.01e-6) <= sys.cfg().tau0);
  CHECK(std::abs(r.delays[0] / sys.cfg().tau0 - std::round(r.delays[0] / sys.cfg().tau0)) < 1e-9);
  CHECK_THROWS_AS(run_omp(s, d, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_omp(s.head(10), d, 1), std::invalid_argument);
}
