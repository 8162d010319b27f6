#pragma once

// Reference computations used only by tests. None of these call into the
// library under test; they rely on brute force or textbook formulas.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Mat a, int sweeps = 100) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Singular values, descending, from the eigenvalues of X^T X.
inline std::vector<double> singular_values_via_gram(const Mat& x) {
  std::vector<double> ev = jacobi_eigenvalues(x.transpose() * x);
  std::vector<double> sv;
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) sv.push_back(std::sqrt(std::max(0.0, *it)));
  return sv;
}

inline double entry_l1(const Mat& m) { return m.cwiseAbs().sum(); }

/// max over b in {+-1}^N of ||X b||_2 (equal to the optimal rank-1 L1-PCA metric).
inline double l1pca_rank1_optimum(const Mat& x) {
  const int n = static_cast<int>(x.cols());
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Vec b(n);
    for (int j = 0; j < n; ++j) b(j) = (mask >> j) & 1U ? -1.0 : 1.0;
    best = std::max(best, (x * b).norm());
  }
  return best;
}

/// Nuclear norm of a D x 2 matrix from the closed-form eigenvalues of its 2x2 Gram.
inline double nuclear_norm_2col(const Mat& m) {
  const double a = m.col(0).squaredNorm(), c = m.col(1).squaredNorm(), b = m.col(0).dot(m.col(1));
  const double tr = a + c, det = a * c - b * b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return std::sqrt(std::max(0.0, tr / 2.0 + disc)) + std::sqrt(std::max(0.0, tr / 2.0 - disc));
}

/// max over B in {+-1}^{N x 2} of ||X B||_* (optimal rank-2 L1-PCA metric).
inline double l1pca_rank2_optimum(const Mat& x) {
  const int n = static_cast<int>(x.cols());
  double best = 0.0;
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Mat b(n, 2);
    for (int j = 0; j < n; ++j) {
      b(j, 0) = (mask >> j) & 1U ? -1.0 : 1.0;
      b(j, 1) = (mask >> (n + j)) & 1U ? -1.0 : 1.0;
    }
    best = std::max(best, nuclear_norm_2col(x * b));
  }
  return best;
}

struct ScanResult {
  double s = 0.0;
  double err = std::numeric_limits<double>::infinity();
};

/// Uniform scan of s -> ||a - s v||_1 over [lo, hi] with the given step.
inline ScanResult scan_l1_scale(const Vec& a, const Vec& v, double lo, double hi, double step) {
  ScanResult best;
  const long count = static_cast<long>(std::ceil((hi - lo) / step));
  for (long i = 0; i <= count; ++i) {
    const double s = lo + step * static_cast<double>(i);
    const double err = (a - s * v).cwiseAbs().sum();
    if (err < best.err) best = {s, err};
  }
  return best;
}

/// Nearest orthonormal matrix X (X^T X)^(-1/2), via a symmetric eigensolve.
inline Mat polar_factor(const Mat& x) {
  const Mat g = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const Vec inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return x * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

/// ULA steering vector entries exp(-j m pi sin theta).
inline std::complex<double> steering_entry(int m, double theta_deg) {
  const double phase = -static_cast<double>(m) * std::numbers::pi * std::sin(theta_deg * std::numbers::pi / 180.0);
  return {std::cos(phase), std::sin(phase)};
}

/// Integer-degree grid -90..89.
inline std::vector<double> angle_grid() {
  std::vector<double> g;
  for (int a = -90; a < 90; ++a) g.push_back(a);
  return g;
}

/// Coordinate-wise median with averaging of the two middle values.
inline Vec column_median(const Mat& x) {
  Vec m(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> row;
    for (Eigen::Index c = 0; c < x.cols(); ++c) row.push_back(x(r, c));
    std::sort(row.begin(), row.end());
    const std::size_t n = row.size();
    m(r) = n % 2 ? row[n / 2] : 0.5 * (row[n / 2 - 1] + row[n / 2]);
  }
  return m;
}

}  // namespace oracle
