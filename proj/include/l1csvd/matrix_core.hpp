#pragma once

// Dense real/complex matrix aliases and the linear-algebra primitives the
// rest of the library is written against: compact SVD with a deterministic
// sign convention, Procrustes orthonormalization, entrywise sign and L1 norm,
// realification of complex data and Haar-random orthonormal frames.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "l1csvd/errors.hpp"
#include "l1csvd/random.hpp"

namespace l1csvd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double kOrthonormality = 1e-10;
inline constexpr double kReconstruction = 1e-10;
/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankRelative = 1e-12;
}  // namespace tol

/// Top-k singular triplets: x ~= u * diag(sigma) * v^T.
struct CompactSvd {
  Matrix u;
  Vector sigma;
  Matrix v;

  [[nodiscard]] Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

template <typename Derived>
[[nodiscard]] bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().allFinite();
}

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!all_finite(m)) throw DegenerateInputError(std::string(what) + ": non-finite entry");
}

/// ||Q^T Q - I||_F.
[[nodiscard]] inline double orthonormality_residual(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

/// Flips column signs of u (and the paired columns of v) so that the
/// largest-magnitude entry of every u column is positive. Ties resolve to the
/// first such entry.
inline void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Index c = 0; c < u.cols(); ++c) {
    Index arg = 0;
    u.col(c).cwiseAbs().maxCoeff(&arg);
    if (u(arg, c) < 0.0) {
      u.col(c) *= -1.0;
      if (c < v.cols()) v.col(c) *= -1.0;
    }
  }
}

/// Top-k compact SVD. Singular values are returned in descending order.
inline CompactSvd compact_svd(const Matrix& x, Index k) {
  const Index min_dim = std::min(x.rows(), x.cols());
  if (k < 1 || k > min_dim) {
    throw DimensionError("compact_svd: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(min_dim) + "]");
  }
  require_finite(x, "compact_svd");

  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
    throw ConvergenceError("compact_svd: SVD routine did not converge");
  }

  CompactSvd out{svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
  canonicalize_signs(out.u, out.v);
  return out;
}

/// Full thin SVD (k = min(rows, cols)).
inline CompactSvd compact_svd(const Matrix& x) { return compact_svd(x, std::min(x.rows(), x.cols())); }

inline Vector singular_values(const Matrix& x) {
  require_finite(x, "singular_values");
  return Eigen::JacobiSVD<Matrix>(x).singularValues();
}

inline double nuclear_norm(const Matrix& x) { return singular_values(x).sum(); }

inline double spectral_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  return singular_values(x)(0);
}

/// Number of singular values above kRankRelative * sigma_max.
inline Index numerical_rank(const Matrix& x) {
  const Vector s = singular_values(x);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > tol::kRankRelative * s(0)).count();
}

/// Closest orthonormal matrix to m in Frobenius norm, Q = U' V'^T. Q also
/// maximizes trace(Q^T m) over matrices with orthonormal columns.
inline Matrix procrustes_orthonormalize(const Matrix& m) {
  if (m.rows() < m.cols()) {
    throw DimensionError("procrustes_orthonormalize: rows < cols");
  }
  require_finite(m, "procrustes_orthonormalize");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0 || s(s.size() - 1) <= tol::kRankRelative * s(0)) {
    throw DegenerateInputError("procrustes_orthonormalize: input is rank deficient");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Polar factor U' V'^T without the rank check. For rank-deficient m it is
/// one of several maximizers of trace(Q^T m); the L1-PCA solvers rely on this
/// because X B can lose rank for some sign matrices B.
inline Matrix polar_factor(const Matrix& m) {
  if (m.rows() < m.cols()) throw DimensionError("polar_factor: rows < cols");
  require_finite(m, "polar_factor");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Entrywise sign with sgn(0) = +1, so the result is always antipodal.
inline Matrix sign_matrix(const Matrix& m) {
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

inline Vector sign_vector(const Vector& m) {
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

/// ||m||_{1,1}: sum of absolute values.
template <typename Derived>
[[nodiscard]] double l1_entrywise_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().sum();
}

/// Stacks real parts above imaginary parts: (M x T) complex -> (2M x T) real.
inline Matrix realify(const ComplexMatrix& y) {
  Matrix out(2 * y.rows(), y.cols());
  out.topRows(y.rows()) = y.real();
  out.bottomRows(y.rows()) = y.imag();
  return out;
}

/// Haar-distributed matrix with orthonormal columns, deterministic in seed.
inline Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  if (cols < 1 || rows < cols) {
    throw DimensionError("random_orthonormal: need rows >= cols >= 1");
  }
  Rng rng(seed);
  Matrix g(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) g(r, c) = rng.normal();

  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix& r = qr.matrixQR();
  // Sign-fix against diag(R) so the distribution is exactly Haar.
  for (Index c = 0; c < cols; ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

}  // namespace l1csvd
