// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/quadcs_operator.hpp"

#include <vector>

namespace quadcs {

// N vectors of length M; snapshot n holds s[n], s[N + n], ..., s[(M-1)N + n] (0-based n).
using SnapshotSet = std::vector<ComplexVector>;

inline SnapshotSet extract_snapshots(const ComplexVector& s, int M, int N) {
  if (s.size() != static_cast<Eigen::Index>(M) * N) throw std::invalid_argument("extract_snapshots: length != M*N");
  SnapshotSet out(static_cast<std::size_t>(N), ComplexVector(M));
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < M; ++m) out[static_cast<std::size_t>(n)](m) = s(static_cast<Eigen::Index>(m) * N + n);
  return out;
}

inline SnapshotSet extract_snapshots(const ComplexVector& s, const QuadCsConfig& cfg) {
  return extract_snapshots(s, cfg.M, cfg.N);
}

inline ComplexVector interleave_snapshots(const SnapshotSet& snaps) {
  if (snaps.empty()) return ComplexVector(0);
  const int N = static_cast<int>(snaps.size());
  const auto M = snaps.front().size();
  ComplexVector s(M * N);
  for (int n = 0; n < N; ++n) {
    if (snaps[static_cast<std::size_t>(n)].size() != M) throw std::invalid_argument("interleave_snapshots: ragged input");
    for (Eigen::Index m = 0; m < M; ++m) s(m * N + n) = snaps[static_cast<std::size_t>(n)](m);
  }
  return s;
}

struct BeamspaceModel {
  ComplexMatrix P;                 // M x J, P(m, j) = B * rho_{-L0 + m + j}
  std::vector<ComplexVector> S;    // S[n](j) = S0(f_(n) + (L0 - j) f_p)
  std::vector<ComplexMatrix> Bn;   // P * diag(S[n])

  int M() const { return static_cast<int>(P.rows()); }
  int J() const { return static_cast<int>(P.cols()); }
  int N() const { return static_cast<int>(Bn.size()); }
};

inline BeamspaceModel assemble_model(const QuadCsSystem& sys) {
  const auto& c = sys.cfg();
  BeamspaceModel m;
  m.P.resize(c.M, c.J);
  for (int r = 0; r < c.M; ++r)
    for (int j = 0; j < c.J; ++j) m.P(r, j) = c.B * sys.code().coef(-c.L0 + r + j);
  m.S.resize(static_cast<std::size_t>(c.N));
  m.Bn.resize(static_cast<std::size_t>(c.N));
  for (int n = 0; n < c.N; ++n) {
    ComplexVector d(c.J);
    for (int j = 0; j < c.J; ++j) d(j) = sys.s0_at_bin(c.bin(n) + static_cast<long>(c.L0 - j) * c.N);
    m.Bn[static_cast<std::size_t>(n)] = m.P * d.asDiagonal();
    m.S[static_cast<std::size_t>(n)] = std::move(d);
  }
  return m;
}

inline ComplexVector steering_vector(double theta, int J) {
  ComplexVector w(J);
  for (int j = 0; j < J; ++j) w(j) = std::polar(1.0, j * theta);
  return w;
}

inline ComplexMatrix steering_W(const std::vector<double>& thetas, int J) {
  ComplexMatrix W(J, static_cast<Eigen::Index>(thetas.size()));
  for (std::size_t k = 0; k < thetas.size(); ++k) W.col(static_cast<Eigen::Index>(k)) = steering_vector(thetas[k], J);
  return W;
}

// Diagonal of D for snapshot n (0-based).
inline ComplexVector phase_D(const QuadCsConfig& cfg, int n, const std::vector<double>& delays) {
  if (n < 0 || n >= cfg.N) throw std::invalid_argument("phase_D: snapshot index out of range");
  const double shift = (cfg.L0 - cfg.M0) + static_cast<double>(n) / cfg.N;
  ComplexVector d(static_cast<Eigen::Index>(delays.size()));
  for (std::size_t k = 0; k < delays.size(); ++k)
    d(static_cast<Eigen::Index>(k)) = std::polar(1.0, -kTwoPi * cfg.f_p * shift * delays[k]);
  return d;
}

inline std::vector<double> delays_to_thetas(const QuadCsConfig& cfg, const std::vector<double>& delays) {
  std::vector<double> th(delays.size());
  for (std::size_t k = 0; k < delays.size(); ++k) th[k] = cfg.theta_of(delays[k]);
  return th;
}

}  // namespace quadcs
