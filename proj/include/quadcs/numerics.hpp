// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace quadcs {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficientError : public NumericError {
 public:
  RankDeficientError(Eigen::Index rank, Eigen::Index cols)
      : NumericError("rank-deficient matrix: estimated rank " + std::to_string(rank) + " of " +
                     std::to_string(cols) + " columns"),
        rank(rank) {}
  Eigen::Index rank;
};

inline double max_abs(const ComplexMatrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

inline bool all_finite(const ComplexMatrix& A) {
  for (Eigen::Index i = 0; i < A.size(); ++i)
    if (!std::isfinite(A.data()[i].real()) || !std::isfinite(A.data()[i].imag())) return false;
  return true;
}

inline double hermitian_asymmetry(const ComplexMatrix& A) {
  const double scale = max_abs(A);
  if (scale == 0.0) return 0.0;
  return max_abs(A - A.adjoint()) / scale;
}

struct HermitianEigResult {
  RealVector values;      // descending
  ComplexMatrix vectors;  // column i pairs with values(i)
};

// Scale each column so its largest-magnitude entry is real and positive.
inline void normalize_phases(ComplexMatrix& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > mag * (1.0 + 1e-12)) {
        mag = a;
        best = i;
      }
    }
    if (mag > 0.0) V.col(j) *= std::conj(V(best, j)) / mag;
  }
}

inline HermitianEigResult eig_hermitian(const ComplexMatrix& A) {
  const Eigen::Index n = A.rows();
  if (n < 1 || A.cols() != n) throw NumericError("eig_hermitian: matrix must be square and nonempty");
  if (!all_finite(A)) throw NumericError("eig_hermitian: non-finite entries");
  const double asym = hermitian_asymmetry(A);
  if (asym > 1e-8)
    throw NumericError("eig_hermitian: input not Hermitian (relative asymmetry " + std::to_string(asym) + ")");
  const ComplexMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  if (es.info() != Eigen::Success)
    throw NumericError("eig_hermitian: no convergence within " + std::to_string(30 * n) + " QR iterations");
  HermitianEigResult out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  normalize_phases(out.vectors);
  return out;
}

struct LeastSquaresResult {
  ComplexVector x;
  Eigen::Index rank = 0;
  double condition = 0.0;  // |R_00| / |R_nn| of the pivoted QR
  double residual_norm = 0.0;
};

// Column-pivoted Householder QR. Columns whose pivot falls below rank_tol relative to
// the largest pivot count as dependent.
inline LeastSquaresResult least_squares_solve(const ComplexMatrix& A, const ComplexVector& b,
                                              double rank_tol = 1e-10) {
  if (A.rows() < A.cols()) throw NumericError("least_squares: need rows >= cols");
  if (b.size() != A.rows()) throw NumericError("least_squares: size mismatch");
  LeastSquaresResult out;
  if (A.cols() == 0) {
    out.x = ComplexVector(0);
    out.residual_norm = b.norm();
    return out;
  }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(A);
  qr.setThreshold(rank_tol);
  out.rank = qr.rank();
  if (out.rank < A.cols()) throw RankDeficientError(out.rank, A.cols());
  out.x = qr.solve(b);
  const auto R = qr.matrixR();
  const double r0 = std::abs(R(0, 0));
  const double rn = std::abs(R(A.cols() - 1, A.cols() - 1));
  out.condition = rn > 0.0 ? r0 / rn : INFINITY;
  out.residual_norm = (A * out.x - b).norm();
  return out;
}

inline ComplexVector least_squares(const ComplexMatrix& A, const ComplexVector& b) {
  return least_squares_solve(A, b).x;
}

inline ComplexMatrix solve_hermitian_pd(const ComplexMatrix& A, const ComplexMatrix& B, double ridge = 0.0) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n) throw NumericError("solve_hermitian_pd: size mismatch");
  if (ridge < 0.0) throw NumericError("solve_hermitian_pd: negative ridge");
  if (hermitian_asymmetry(A) > 1e-8) throw NumericError("solve_hermitian_pd: input not Hermitian");
  ComplexMatrix H = 0.5 * (A + A.adjoint());
  H.diagonal().array() += ridge;
  Eigen::LLT<ComplexMatrix> llt(H);
  if (llt.info() != Eigen::Success) throw NumericError("solve_hermitian_pd: matrix not positive definite");
  return llt.solve(B);
}

// Orthonormal basis for the column span of Y (Y assumed full column rank).
inline ComplexMatrix orthonormal_columns(const ComplexMatrix& Y) {
  Eigen::HouseholderQR<ComplexMatrix> qr(Y);
  ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(Y.rows(), Y.cols());
  return Q;
}

// SplitMix64 finalizer, used to derive independent seeds from (seed, index) pairs.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0x5851F42D4C957F2DULL));
}

}  // namespace quadcs
