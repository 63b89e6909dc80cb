// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quadcs/interpolation.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace quadcs {

class GlsrError : public std::runtime_error {
 public:
  GlsrError(std::string stage, const std::string& what)
      : std::runtime_error("glsr/" + stage + ": " + what), stage(std::move(stage)) {}
  std::string stage;
};

inline ComplexMatrix correlation(const SnapshotSet& snaps) {
  if (snaps.empty()) throw std::invalid_argument("correlation: no snapshots");
  const auto M = snaps.front().size();
  ComplexMatrix R = ComplexMatrix::Zero(M, M);
  for (const auto& s : snaps) {
    if (s.size() != M) throw std::invalid_argument("correlation: ragged snapshots");
    R += s * s.adjoint();
  }
  R /= static_cast<double>(snaps.size());
  return 0.5 * (R + R.adjoint());
}

// P(theta) = 1 / |G^H B0 w(theta)|^2 with G the M-K weakest eigenvectors of R.
class MusicSpectrum {
 public:
  MusicSpectrum(const ComplexMatrix& R, const ComplexMatrix& B0, int K) : B0_(B0) {
    const auto M = R.rows();
    if (K < 0 || K >= M) throw std::invalid_argument("music: need 0 <= K < M");
    if (B0.rows() != M) throw std::invalid_argument("music: B0 row count differs from R");
    eig_ = eig_hermitian(R);
    G_ = eig_.vectors.rightCols(M - K);
    PB_ = B0.adjoint() * G_;
  }

  // Noise-subspace energy of the beamspace steering vector.
  double Q(double theta) const {
    const ComplexVector w = steering_vector(theta, static_cast<int>(PB_.rows()));
    return (PB_.adjoint() * w).squaredNorm();
  }
  double operator()(double theta) const { return 1.0 / std::max(Q(theta), std::numeric_limits<double>::min()); }

  // Fraction of the steering vector's beamspace energy in the noise subspace.
  double null_depth(double theta) const {
    const ComplexVector a = B0_ * steering_vector(theta, static_cast<int>(B0_.cols()));
    const double e = a.squaredNorm();
    return e > 0.0 ? Q(theta) / e : 1.0;
  }

  const HermitianEigResult& eig() const { return eig_; }
  const ComplexMatrix& noise_subspace() const { return G_; }

 private:
  ComplexMatrix B0_;
  HermitianEigResult eig_;
  ComplexMatrix G_;
  ComplexMatrix PB_;
};

inline double music_spectrum(const ComplexMatrix& R, const ComplexMatrix& B0, int K, double theta) {
  return MusicSpectrum(R, B0, K)(theta);
}

struct Peak {
  double theta = 0.0;  // in [0, 2pi)
  double value = 0.0;  // P(theta)
  int wrap = 0;
};

struct SearchOptions {
  double grid_step = 0.0;  // 0 selects (smallest sub-sector width) / grid_div
  int grid_div = 200;
  bool refine = true;
};

namespace detail {

inline double reduce_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

// Intervals to scan; a part crossing 0 = 2pi is joined into one interval that may exceed 2pi.
inline std::vector<Interval> scan_intervals(const Sector& sector, bool& full_circle) {
  auto iv = sector.reduced();
  full_circle = iv.size() == 1 && iv[0].first <= 0.0 && iv[0].second >= kTwoPi;
  if (!full_circle && iv.size() >= 2 && iv.front().first <= 1e-12 && iv.back().second >= kTwoPi - 1e-12) {
    iv.back().second = kTwoPi + iv.front().second;
    iv.erase(iv.begin());
  }
  return iv;
}

template <class QFn>
double refine_min(const QFn& Q, double x, double h, double lo, double hi) {
  for (double s : {h, h / 8.0, h / 64.0}) {
    const double qm = Q(x - s), q0 = Q(x), qp = Q(x + s);
    const double d = qm - 2.0 * q0 + qp;
    if (!(d > 0.0)) break;
    const double off = std::clamp(0.5 * (qm - qp) / d, -1.0, 1.0);
    x = std::clamp(x + off * s, lo, hi);
  }
  return x;
}

struct Scan {
  std::vector<Peak> peaks;  // all local maxima of P (wrap unset)
  std::vector<std::pair<double, double>> trace;
  double step = 0.0;
};

template <class QFn>
Scan scan_sector(const QFn& Q, const Sector& sector, const SearchOptions& opt, bool keep_trace) {
  Scan out;
  out.step = opt.grid_step > 0.0 ? opt.grid_step : sector.min_width() / opt.grid_div;
  if (!(out.step > 0.0)) throw std::invalid_argument("peak search: grid step must be positive");
  bool circle = false;
  for (const auto& [a, b] : scan_intervals(sector, circle)) {
    const auto n = static_cast<long>(std::ceil((b - a) / out.step - 1e-9));
    const long count = circle ? n : n + 1;
    const double h = (b - a) / static_cast<double>(n);
    std::vector<double> g(static_cast<std::size_t>(count)), q(g.size());
    for (long i = 0; i < count; ++i) {
      g[static_cast<std::size_t>(i)] = a + i * h;
      q[static_cast<std::size_t>(i)] = Q(g[static_cast<std::size_t>(i)]);
      if (keep_trace)
        out.trace.emplace_back(reduce_angle(g[static_cast<std::size_t>(i)]),
                               1.0 / std::max(q[static_cast<std::size_t>(i)], std::numeric_limits<double>::min()));
    }
    const long first = circle ? 0 : 1;
    const long last = circle ? count : count - 1;
    for (long i = first; i < last; ++i) {
      const auto at = [&](long j) { return q[static_cast<std::size_t>((j + count) % count)]; };
      if (at(i) < at(i - 1) && at(i) <= at(i + 1)) {
        double x = g[static_cast<std::size_t>(i)];
        if (opt.refine) x = refine_min(Q, x, h, circle ? -INFINITY : a, circle ? INFINITY : b);
        out.peaks.push_back({reduce_angle(x), 1.0 / std::max(Q(x), std::numeric_limits<double>::min()), 0});
      }
    }
  }
  std::stable_sort(out.peaks.begin(), out.peaks.end(), [](const Peak& l, const Peak& r) { return l.value > r.value; });
  return out;
}

// Unwrapped phase of theta inside part p, if any.
inline std::optional<double> place_in(const SubSector& p, double theta) {
  const double u = theta + kTwoPi * std::ceil((p.lo() - theta) / kTwoPi - 1e-12);
  if (u <= p.hi() + 1e-12) return u;
  return std::nullopt;
}

// Minimum-cost assignment (Hungarian algorithm, padded to square); rows map to a column or -1.
inline std::vector<int> assign_min_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  constexpr double kPad = 1e12;
  const auto c = [&](std::size_t i, std::size_t j) { return i < rows && j < cols ? cost[i][j] : kPad; };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, INFINITY);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = INFINITY;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(rows, -1);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] >= 1 && p[j] - 1 < rows && j - 1 < cols) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  return row_to_col;
}

// Wrap count from the containing part with the nearest centre; nullopt when outside every part.
inline std::optional<double> unwrap_in_sector(const Sector& sector, double theta) {
  std::optional<double> best;
  double best_cost = INFINITY;
  for (const auto& p : sector.parts()) {
    if (auto u = place_in(p, theta)) {
      const double c = std::abs(*u - p.center());
      if (c < best_cost) {
        best_cost = c;
        best = u;
      }
    }
  }
  return best;
}

inline Peak peak_from_unwrapped(double u, double value) {
  const int w = static_cast<int>(std::floor(u / kTwoPi));
  return {u - kTwoPi * w, value, w};
}

}  // namespace detail

// K largest local maxima of P over the sector, each tagged with its sub-interval wrap count.
inline std::vector<Peak> search_peaks(const std::function<double(double)>& P, const Sector& sector, int K,
                                      const SearchOptions& opt = {}) {
  if (K < 1) throw std::invalid_argument("search_peaks: K must be positive");
  const auto Q = [&](double t) { return 1.0 / P(t); };
  auto scan = detail::scan_sector(Q, sector, opt, false);
  if (static_cast<int>(scan.peaks.size()) < K)
    throw std::runtime_error("search_peaks: found " + std::to_string(scan.peaks.size()) + " local maxima, need " +
                             std::to_string(K));
  std::vector<Peak> out;
  for (int k = 0; k < K; ++k) {
    const auto& pk = scan.peaks[static_cast<std::size_t>(k)];
    const auto u = detail::unwrap_in_sector(sector, pk.theta);
    out.push_back(detail::peak_from_unwrapped(u.value_or(pk.theta), pk.value));
  }
  return out;
}

inline std::vector<double> unwrap_delays(const std::vector<Peak>& peaks, double f_p) {
  std::vector<double> tau;
  for (const auto& p : peaks) {
    if (p.wrap < 0) throw std::invalid_argument("unwrap_delays: negative wrap");
    tau.push_back((p.theta + kTwoPi * p.wrap) / (kTwoPi * f_p));
  }
  std::sort(tau.begin(), tau.end());
  return tau;
}

inline ComplexVector estimate_gains(const ComplexVector& s, const QuadCsSystem& sys, const std::vector<double>& delays) {
  return least_squares(build_Phi(sys, delays), s);
}

inline DenseSpectrum reconstruct_spectrum(const std::vector<double>& delays, const ComplexVector& gains,
                                          const DenseSpectrum& s0) {
  return scene_spectrum(delays, std::vector<cd>(gains.data(), gains.data() + gains.size()), s0);
}

inline DenseSpectrum reconstruct_spectrum(const Waveform& w, const std::vector<double>& delays,
                                          const ComplexVector& gains, const SpectrumGrid& grid) {
  return reconstruct_spectrum(delays, gains, sample_S0(w, grid));
}

struct GlsrOptions {
  Sector sector;
  int K = 1;
  SearchOptions search{};
  BeamformerMode beamformer = BeamformerMode::sector_normalized;
  std::optional<double> ridge;
  bool keep_trace = false;
  double quality_threshold = 0.5;  // largest acceptable null depth
};

struct EstimationResult {
  std::vector<double> theta;      // in [0, 2pi), aligned with delays
  std::vector<int> wraps;
  std::vector<double> delays;     // ascending
  ComplexVector gains;
  std::vector<std::pair<double, double>> trace;  // (theta, P)
  RealVector eigenvalues;         // of the interpolated correlation, descending
  double interpolation_error = 0.0;
  std::vector<double> null_depth;
  int fallback_count = 0;         // sub-sectors with no assignable peak
  bool quality_ok = true;
};

namespace detail {

// One estimate per part: peaks assigned by nearest-centre matching, leftovers from the part's own grid.
template <class QFn>
std::vector<Peak> assign_to_parts(const QFn& Q, const Sector& sector, const Scan& scan, int K,
                                  const SearchOptions& opt, int& fallbacks) {
  const auto& parts = sector.parts();
  const std::size_t np = std::min<std::size_t>(scan.peaks.size(), static_cast<std::size_t>(K));
  std::vector<std::vector<double>> cost(parts.size(), std::vector<double>(np, INFINITY));
  std::vector<std::vector<double>> where(parts.size(), std::vector<double>(np, 0.0));
  constexpr double kInfeasible = 1e6;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t p = 0; p < np; ++p) {
      if (auto u = place_in(parts[i], scan.peaks[p].theta)) {
        cost[i][p] = std::abs(*u - parts[i].center());
        where[i][p] = *u;
      } else {
        cost[i][p] = kInfeasible;
      }
    }
  const auto match = np ? assign_min_cost(cost) : std::vector<int>(parts.size(), -1);
  std::vector<std::optional<double>> est(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const int p = match[i];
    if (p >= 0 && cost[i][static_cast<std::size_t>(p)] < kInfeasible) est[i] = where[i][static_cast<std::size_t>(p)];
  }
  std::vector<Peak> out(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!est[i]) {
      // Unmatched part: best grid point of its own interval away from estimates already taken.
      ++fallbacks;
      const auto& pt = parts[i];
      const double h = pt.width() / opt.grid_div;
      double best_u = NAN, best_q = INFINITY;
      for (int g = 0; g <= opt.grid_div; ++g) {
        const double u = pt.lo() + g * h;
        bool near = false;
        for (const auto& e : est)
          if (e && std::abs(*e - u) < 2.0 * scan.step) near = true;
        if (near) continue;
        const double q = Q(u);
        if (q < best_q) {
          best_q = q;
          best_u = u;
        }
      }
      if (std::isnan(best_u)) throw std::runtime_error("no admissible point left in sub-sector " + std::to_string(i));
      if (opt.refine) best_u = refine_min(Q, best_u, h, pt.lo(), pt.hi());
      est[i] = best_u;
    }
    out[i] = peak_from_unwrapped(*est[i], 1.0 / std::max(Q(*est[i]), std::numeric_limits<double>::min()));
  }
  return out;
}

}  // namespace detail

struct ThetaEstimates {
  std::vector<Peak> peaks;  // ascending in unwrapped phase
  std::vector<std::pair<double, double>> trace;
  int fallback_count = 0;
};

// MUSIC peak search over the sector. With one sub-sector per source each sub-sector yields one
// estimate; otherwise the K strongest maxima are taken.
inline ThetaEstimates estimate_thetas(const MusicSpectrum& music, const Sector& sector, int K, const SearchOptions& opt,
                                      bool keep_trace = false) {
  const auto Q = [&](double t) { return music.Q(t); };
  ThetaEstimates out;
  auto scan = detail::scan_sector(Q, sector, opt, keep_trace);
  out.trace = std::move(scan.trace);
  if (scan.peaks.empty()) throw std::runtime_error("pseudospectrum has no local maxima in the sector");
  if (static_cast<int>(sector.size()) == K) {
    out.peaks = detail::assign_to_parts(Q, sector, scan, K, opt, out.fallback_count);
  } else {
    if (static_cast<int>(scan.peaks.size()) < K)
      throw std::runtime_error("found " + std::to_string(scan.peaks.size()) + " local maxima, need " +
                               std::to_string(K));
    for (int k = 0; k < K; ++k) {
      const auto& pk = scan.peaks[static_cast<std::size_t>(k)];
      out.peaks.push_back(
          detail::peak_from_unwrapped(detail::unwrap_in_sector(sector, pk.theta).value_or(pk.theta), pk.value));
    }
  }
  std::sort(out.peaks.begin(), out.peaks.end(), [](const Peak& a, const Peak& b) {
    return a.theta + kTwoPi * a.wrap < b.theta + kTwoPi * b.wrap;
  });
  return out;
}

inline EstimationResult run_glsr(const ComplexVector& s, const QuadCsSystem& sys, const BeamspaceModel& model,
                                 const GlsrOptions& opt, const InterpolationDesign* design = nullptr) {
  const auto& cfg = sys.cfg();
  if (opt.K < 1 || opt.K >= cfg.M) throw GlsrError("options", "need 1 <= K < M");
  if (opt.K > cfg.N) throw GlsrError("options", "need K <= N");
  if (opt.sector.size() == 0) throw GlsrError("options", "empty sector");
  const auto stage = [](const char* name, auto&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const GlsrError&) {
      throw;
    } catch (const std::exception& e) {
      throw GlsrError(name, e.what());
    }
  };

  const SnapshotSet snaps = stage("snapshots", [&] { return extract_snapshots(s, cfg); });
  InterpolationDesign local;
  if (!design) {
    local = stage("design", [&] { return design_interpolation(model, opt.sector, opt.beamformer, opt.ridge); });
    design = &local;
  }
  const ComplexMatrix R = stage("correlation", [&] {
    SnapshotSet bar(snaps.size());
    for (std::size_t n = 0; n < snaps.size(); ++n) bar[n] = design->T[n] * snaps[n];
    return correlation(bar);
  });
  const MusicSpectrum music = stage("subspace", [&] { return MusicSpectrum(R, design->B0, opt.K); });
  ThetaEstimates est = stage("search", [&] { return estimate_thetas(music, opt.sector, opt.K, opt.search, opt.keep_trace); });

  EstimationResult res;
  res.eigenvalues = music.eig().values;
  res.interpolation_error = design->error;
  res.trace = std::move(est.trace);
  res.fallback_count = est.fallback_count;
  for (const auto& p : est.peaks) {
    res.theta.push_back(p.theta);
    res.wraps.push_back(p.wrap);
    res.delays.push_back((p.theta + kTwoPi * p.wrap) / (kTwoPi * cfg.f_p));
    res.null_depth.push_back(music.null_depth(p.theta));
  }
  for (std::size_t k = 1; k < res.delays.size(); ++k)
    if (!(res.delays[k] > res.delays[k - 1])) throw GlsrError("delays", "coincident delay estimates");
  res.gains = stage("gains", [&] { return estimate_gains(s, sys, res.delays); });
  res.quality_ok = res.fallback_count == 0;
  for (double d : res.null_depth) res.quality_ok = res.quality_ok && d <= opt.quality_threshold;
  return res;
}

inline void write_pseudospectrum_csv(std::ostream& os, const std::vector<std::pair<double, double>>& trace) {
  os << "theta_rad,P\n";
  char buf[64];
  for (const auto& [t, p] : trace) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, p);
    os << buf;
  }
}

}  // namespace quadcs
