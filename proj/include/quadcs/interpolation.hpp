// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/beamspace.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace quadcs {

// One interval of the sector: [a, b] with a in [0, 2pi) and b > a (b may pass 2pi).
// Adding 2pi*wrap recovers the unwrapped phase 2 pi f_p tau.
struct SubSector {
  double a = 0.0;
  double b = 0.0;
  int wrap = 0;

  double width() const { return b - a; }
  double lo() const { return a + kTwoPi * wrap; }
  double hi() const { return b + kTwoPi * wrap; }
  double center() const { return 0.5 * (lo() + hi()); }
};

using Interval = std::pair<double, double>;

class Sector {
 public:
  Sector() = default;
  explicit Sector(std::vector<SubSector> parts) : parts_(std::move(parts)) { validate(); }

  // Unwrapped intervals [lo, hi] in radians; lo is clamped at 0.
  static Sector from_unwrapped(const std::vector<Interval>& intervals) {
    std::vector<SubSector> parts;
    for (auto [lo, hi] : intervals) {
      lo = std::max(lo, 0.0);
      if (!(hi > lo)) throw std::invalid_argument("sector: empty interval");
      const int w = static_cast<int>(std::floor(lo / kTwoPi));
      const double a = lo - kTwoPi * w;
      parts.push_back({a, a + (hi - lo), w});
    }
    return Sector(std::move(parts));
  }

  // One sub-sector per delay: [2 pi f_p (tau - h), 2 pi f_p (tau + h)].
  static Sector around_delays(const QuadCsConfig& cfg, const std::vector<double>& delays, double half_width_s) {
    std::vector<Interval> iv;
    for (double t : delays) iv.emplace_back(cfg.theta_of(t - half_width_s), cfg.theta_of(t + half_width_s));
    return from_unwrapped(iv);
  }

  const std::vector<SubSector>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }

  // Union of the parts reduced mod 2pi, as sorted disjoint intervals inside [0, 2pi].
  std::vector<Interval> reduced() const {
    std::vector<Interval> raw;
    for (const auto& p : parts_) {
      if (p.width() >= kTwoPi) return {{0.0, kTwoPi}};
      if (p.b > kTwoPi) {
        raw.emplace_back(p.a, kTwoPi);
        raw.emplace_back(0.0, p.b - kTwoPi);
      } else {
        raw.emplace_back(p.a, p.b);
      }
    }
    std::sort(raw.begin(), raw.end());
    std::vector<Interval> out;
    for (const auto& iv : raw) {
      if (!out.empty() && iv.first <= out.back().second) out.back().second = std::max(out.back().second, iv.second);
      else out.push_back(iv);
    }
    return out;
  }

  double measure() const {
    double m = 0.0;
    for (const auto& [a, b] : reduced()) m += b - a;
    return m;
  }

  double min_width() const {
    double w = INFINITY;
    for (const auto& p : parts_) w = std::min(w, p.width());
    return w;
  }

 private:
  void validate() const {
    if (parts_.empty()) throw std::invalid_argument("sector: no intervals");
    for (const auto& p : parts_) {
      if (!(p.a >= 0.0 && p.a < kTwoPi)) throw std::invalid_argument("sector: interval start outside [0, 2pi)");
      if (!(p.b > p.a)) throw std::invalid_argument("sector: interval with b <= a");
      if (p.wrap < 0) throw std::invalid_argument("sector: negative wrap count");
    }
  }

  std::vector<SubSector> parts_;
};

// C(p, q) = sum_i int_{a_i}^{b_i} exp(j (p - q) theta) dtheta over disjoint intervals.
inline ComplexMatrix sector_cww(const std::vector<Interval>& intervals, int J) {
  if (intervals.empty()) throw std::invalid_argument("sector_cww: empty sector");
  std::vector<cd> col(static_cast<std::size_t>(J), 0.0);  // col[d] = entry with p - q = d >= 0
  for (const auto& [a, b] : intervals) {
    if (!(b > a)) throw std::invalid_argument("sector_cww: empty interval");
    col[0] += b - a;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int d = 1; d < J; ++d) col[static_cast<std::size_t>(d)] += std::polar(2.0 * std::sin(d * half) / d, d * mid);
  }
  ComplexMatrix C(J, J);
  for (int p = 0; p < J; ++p)
    for (int q = 0; q < J; ++q)
      C(p, q) = p >= q ? col[static_cast<std::size_t>(p - q)] : std::conj(col[static_cast<std::size_t>(q - p)]);
  return C;
}

inline ComplexMatrix sector_cww(const Sector& sector, int J) { return sector_cww(sector.reduced(), J); }

// Ridge for an inner matrix: 1e-10 tr/M when its condition number exceeds 1e10.
inline double auto_ridge(const ComplexMatrix& G) {
  const auto ev = eig_hermitian(G).values;
  const double lmax = ev(0);
  const double lmin = ev(ev.size() - 1);
  if (lmin <= 0.0 || lmax > 1e10 * lmin) return 1e-10 * G.trace().real() / static_cast<double>(G.rows());
  return 0.0;
}

// X_n = (B_n C B_n^H + r_n I)^{-1} B_n C for every snapshot.
struct InnerSolves {
  std::vector<ComplexMatrix> X;
  std::vector<double> ridge;
};

inline InnerSolves solve_inner(const BeamspaceModel& model, const ComplexMatrix& Cww, std::optional<double> ridge) {
  InnerSolves out;
  for (int n = 0; n < model.N(); ++n) {
    const ComplexMatrix& Bn = model.Bn[static_cast<std::size_t>(n)];
    const ComplexMatrix BC = Bn * Cww;
    ComplexMatrix G = BC * Bn.adjoint();
    G = 0.5 * (G + G.adjoint());
    const double r = ridge ? *ridge : auto_ridge(G);
    try {
      out.X.push_back(solve_hermitian_pd(G, BC, r));
    } catch (const NumericError& e) {
      throw NumericError("inner matrix for snapshot " + std::to_string(n) + " is singular: " + e.what());
    }
    out.ridge.push_back(r);
  }
  return out;
}

inline ComplexMatrix cN_from_solves(const BeamspaceModel& model, const ComplexMatrix& Cww, const InnerSolves& s) {
  ComplexMatrix CN = ComplexMatrix::Zero(Cww.rows(), Cww.cols());
  for (int n = 0; n < model.N(); ++n) {
    const ComplexMatrix BC = model.Bn[static_cast<std::size_t>(n)] * Cww;
    CN += Cww - BC.adjoint() * s.X[static_cast<std::size_t>(n)];
  }
  return 0.5 * (CN + CN.adjoint());
}

inline ComplexMatrix compute_cN(const BeamspaceModel& model, const ComplexMatrix& Cww,
                                std::optional<double> ridge = std::nullopt) {
  return cN_from_solves(model, Cww, solve_inner(model, Cww, ridge));
}

struct BeamformerDesign {
  ComplexMatrix B0;       // M x J, orthonormal rows
  double error = 0.0;     // tr(B0 C_N B0^H)
  bool degenerate = false;  // eigenvalue tie across the M-cut
};

// Rows = conjugated eigenvectors of the M smallest eigenvalues of C_N.
inline BeamformerDesign design_beamformer(const ComplexMatrix& CN, int M) {
  const auto J = CN.rows();
  if (M < 1 || M > J) throw std::invalid_argument("design_beamformer: need 1 <= M <= J");
  const auto e = eig_hermitian(CN);
  BeamformerDesign d;
  d.B0 = e.vectors.rightCols(M).adjoint();
  d.error = e.values.tail(M).sum();
  if (M < J) {
    const double gap = e.values(J - M - 1) - e.values(J - M);
    d.degenerate = gap <= 1e-12 * std::max(std::abs(e.values(0)), 1e-300);
  }
  return d;
}

// Same objective with B0 restricted to the dominant subspace of C_ww and normalized by it,
// so that B0 w(theta) keeps its energy over the sector.
inline BeamformerDesign design_beamformer_sector_normalized(const ComplexMatrix& CN, const ComplexMatrix& Cww, int M) {
  const auto J = CN.rows();
  if (M < 1 || M > J) throw std::invalid_argument("design_beamformer: need 1 <= M <= J");
  const auto ec = eig_hermitian(Cww);
  const double lmax = ec.values(0);
  if (!(lmax > 0.0)) throw NumericError("design_beamformer: sector correlation is zero");
  Eigen::Index r = 0;
  while (r < J && ec.values(r) >= 1e-6 * lmax) ++r;
  r = std::max<Eigen::Index>(r, M);
  ComplexMatrix Wh = ec.vectors.leftCols(r);
  for (Eigen::Index i = 0; i < r; ++i) Wh.col(i) /= std::sqrt(std::max(ec.values(i), 1e-10 * lmax));
  const ComplexMatrix A = Wh.adjoint() * CN * Wh;
  const auto ea = eig_hermitian(0.5 * (A + A.adjoint()));
  const ComplexMatrix Y = Wh * ea.vectors.rightCols(M);
  BeamformerDesign d;
  d.B0 = orthonormal_columns(Y).adjoint();
  d.error = (d.B0 * CN * d.B0.adjoint()).trace().real();
  if (M < r) d.degenerate = ea.values(r - M - 1) - ea.values(r - M) <= 1e-12 * std::max(std::abs(ea.values(0)), 1e-300);
  return d;
}

inline std::vector<ComplexMatrix> interpolators_from_solves(const ComplexMatrix& B0, const InnerSolves& s) {
  std::vector<ComplexMatrix> T;
  T.reserve(s.X.size());
  for (const auto& X : s.X) T.push_back(B0 * X.adjoint());
  return T;
}

// T_n = B0 C B_n^H (B_n C B_n^H)^{-1}.
inline std::vector<ComplexMatrix> design_interpolators(const BeamspaceModel& model, const ComplexMatrix& Cww,
                                                       const ComplexMatrix& B0,
                                                       std::optional<double> ridge = std::nullopt) {
  return interpolators_from_solves(B0, solve_inner(model, Cww, ridge));
}

enum class BeamformerMode { sector_normalized, orthonormal };

struct InterpolationDesign {
  ComplexMatrix C_ww;
  ComplexMatrix C_N;
  ComplexMatrix B0;
  std::vector<ComplexMatrix> T;
  double error = 0.0;
  bool degenerate = false;
  std::vector<double> ridge;
};

inline InterpolationDesign design_interpolation(const BeamspaceModel& model, const Sector& sector,
                                                BeamformerMode mode = BeamformerMode::sector_normalized,
                                                std::optional<double> ridge = std::nullopt) {
  InterpolationDesign d;
  d.C_ww = sector_cww(sector, model.J());
  const InnerSolves s = solve_inner(model, d.C_ww, ridge);
  d.C_N = cN_from_solves(model, d.C_ww, s);
  const BeamformerDesign bf = mode == BeamformerMode::orthonormal
                                  ? design_beamformer(d.C_N, model.M())
                                  : design_beamformer_sector_normalized(d.C_N, d.C_ww, model.M());
  d.B0 = bf.B0;
  d.error = bf.error;
  d.degenerate = bf.degenerate;
  d.T = interpolators_from_solves(d.B0, s);
  d.ridge = s.ridge;
  return d;
}

}  // namespace quadcs
