// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/quadcs_operator.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace quadcs {

struct GridDictionary {
  double delta_tau = 0.0;
  std::vector<double> delays;  // g * delta_tau, g = 1..G
  ComplexMatrix columns;       // L x G
  RealVector norms;

  std::size_t size() const { return delays.size(); }
};

inline GridDictionary build_grid_dictionary(const QuadCsSystem& sys, double delta_tau) {
  if (!(delta_tau > 0.0)) throw std::invalid_argument("grid dictionary: delta_tau must be positive");
  GridDictionary d;
  d.delta_tau = delta_tau;
  const auto G = static_cast<long>(std::floor(sys.cfg().tau_max / delta_tau + 1e-9));
  if (G < 1) throw std::invalid_argument("grid dictionary: delta_tau exceeds tau_max");
  for (long g = 1; g <= G; ++g) d.delays.push_back(static_cast<double>(g) * delta_tau);
  d.columns = build_Phi(sys, d.delays);
  d.norms = d.columns.colwise().norm().transpose();
  return d;
}

struct OmpResult {
  std::vector<std::size_t> selected;  // dictionary indices in selection order
  std::vector<double> delays;         // ascending
  ComplexVector gains;                // aligned with delays
  std::vector<double> residual_norms; // after each iteration
};

inline OmpResult run_omp(const ComplexVector& s, const GridDictionary& dict, int K) {
  if (K < 1 || static_cast<std::size_t>(K) > dict.size()) throw std::invalid_argument("run_omp: need 1 <= K <= G");
  if (s.size() != dict.columns.rows()) throw std::invalid_argument("run_omp: measurement length mismatch");
  OmpResult out;
  ComplexVector r = s;
  ComplexVector x;
  std::vector<char> taken(dict.size(), 0);
  for (int it = 0; it < K; ++it) {
    const RealVector score = (dict.columns.adjoint() * r).cwiseAbs().cwiseQuotient(dict.norms);
    std::size_t best = dict.size();
    double best_score = -1.0;
    for (std::size_t g = 0; g < dict.size(); ++g)
      if (!taken[g] && score(static_cast<Eigen::Index>(g)) > best_score) {
        best_score = score(static_cast<Eigen::Index>(g));
        best = g;
      }
    taken[best] = 1;
    out.selected.push_back(best);
    ComplexMatrix A(s.size(), static_cast<Eigen::Index>(out.selected.size()));
    for (std::size_t k = 0; k < out.selected.size(); ++k)
      A.col(static_cast<Eigen::Index>(k)) = dict.columns.col(static_cast<Eigen::Index>(out.selected[k]));
    x = least_squares(A, s);
    r = s - A * x;
    out.residual_norms.push_back(r.norm());
  }
  std::vector<std::size_t> order(out.selected.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.selected[a] < out.selected[b]; });
  out.gains.resize(K);
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.delays.push_back(dict.delays[out.selected[order[k]]]);
    out.gains(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(order[k]));
  }
  return out;
}

}  // namespace quadcs
