#pragma once

// Robust compact SVD built on an L1-PCA basis.
//
// U is the L1-PCA basis of X and stays fixed. With A = X^T U, the remaining
// factors solve  min ||A - V diag(sigma)||_{1,1}  over orthonormal V and
// diagonal sigma, by alternating
//   * sigma_i: exact L1 line fit of A(:,i) against V(:,i), by exhaustive
//     search over the N breakpoints s_j = A(j,i) / V(j,i);
//   * V: orthonormal Procrustes factor of A diag(sigma)^-1.
// The alternation stops once the normalized residual
//   M_P = ||U^T X - diag(sigma) V^T||_{1,1} / ||U^T X||_{1,1}
// changes by less than `tol` (relative), or after min(N*K, max_outer_iter)
// sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "l1csvd/errors.hpp"
#include "l1csvd/l1pca.hpp"
#include "l1csvd/matrix_core.hpp"
#include "l1csvd/random.hpp"

namespace l1csvd {

/// Breakpoints with |v_j| below this are not considered.
inline constexpr double kCandidateGuard = 1e-9;

struct SigmaFit {
  double sigma = 0.0;
  double l1_error = 0.0;
  Index index = -1;  ///< entry j whose ratio was selected
};

/// Scale s minimizing ||a - s v||_1 over the candidates a_j / v_j. Ties go to
/// the smaller |s|. The result may be negative.
inline SigmaFit sigma_search(const Vector& a, const Vector& v) {
  if (a.size() != v.size()) throw DimensionError("sigma_search: length mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-8) throw ContractViolation("sigma_search: v must be a unit vector");

  SigmaFit best;
  best.l1_error = std::numeric_limits<double>::infinity();
  const Index n = a.size();
  for (Index j = 0; j < n; ++j) {
    if (std::abs(v(j)) < kCandidateGuard) continue;
    const double s = a(j) / v(j);
    const double err = (a - s * v).cwiseAbs().sum();
    const double tie = 1e-12 * (1.0 + std::abs(best.l1_error));
    if (best.index < 0 || err < best.l1_error - tie ||
        (err <= best.l1_error + tie && std::abs(s) < std::abs(best.sigma))) {
      best = {s, err, j};
    }
  }
  if (best.index < 0) throw DegenerateInputError("sigma_search: every |v_j| is below the candidate guard");
  return best;
}

/// Default Sigma^-1 floor: 1e-10 of the largest |sigma|.
inline double default_sigma_floor(const Vector& sigma) { return 1e-10 * sigma.cwiseAbs().maxCoeff(); }

/// V = procrustes(A diag(sigma)^-1). Throws if any |sigma_i| < floor.
inline Matrix update_v(const Matrix& a, const Vector& sigma, std::optional<double> floor = std::nullopt) {
  if (a.cols() != sigma.size()) throw DimensionError("update_v: sigma length must equal A columns");
  const double f = floor.value_or(default_sigma_floor(sigma));
  if (!(sigma.cwiseAbs().maxCoeff() > 0.0) || (sigma.cwiseAbs().array() < f).any()) {
    throw DegenerateInputError("update_v: singular scale (sigma below floor)");
  }
  return procrustes_orthonormalize(a * sigma.cwiseInverse().asDiagonal());
}

/// M_P = ||U^T X - diag(sigma) V^T||_{1,1} / ||U^T X||_{1,1}.
inline double perf_metric(const Matrix& u, const Matrix& x, const Vector& sigma, const Matrix& v) {
  if (u.rows() != x.rows() || v.rows() != x.cols() || u.cols() != sigma.size() ||
      v.cols() != sigma.size()) {
    throw DimensionError("perf_metric: non-conformable arguments");
  }
  const Matrix utx = u.transpose() * x;
  const double den = l1_entrywise_norm(utx);
  if (den == 0.0) throw DegenerateInputError("perf_metric: U^T X is zero");
  return l1_entrywise_norm(utx - sigma.asDiagonal() * v.transpose()) / den;
}

struct L1cSvdOptions {
  L1PcaSolver pca_solver = L1PcaSolver::Greedy;
  L1PcaOptions pca;
  int max_outer_iter = 500;
  double tol = 1e-9;
  /// Sigma^-1 clamp, relative to max |sigma|.
  double sigma_floor = 1e-10;
  std::uint64_t seed = 0;
  /// Starting V (N x K); random_orthonormal(N, K, seed) when absent.
  std::optional<Matrix> v_init;
  /// Allowed M_P increase per sweep before it is counted as a violation.
  double descent_slack = 1e-9;
};

struct L1cSvdResult {
  Matrix u;
  Vector sigma;
  Matrix v;
  /// M_P after each sigma step (sigma optimal for the V it was fitted to).
  std::vector<double> mp_trace;
  int iterations = 0;
  bool converged = false;
  double l1pca_metric = 0.0;
  /// Sweeps where M_P rose by more than the descent slack.
  int descent_violations = 0;

  [[nodiscard]] Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
  [[nodiscard]] double final_mp() const { return mp_trace.empty() ? 0.0 : mp_trace.back(); }
};

/// Sigma and V for a fixed basis U. Exposed separately so the alternation can
/// be driven from a known U (tests, convergence studies).
inline L1cSvdResult l1_csvd_from_basis(const Matrix& x, const Matrix& u, const L1cSvdOptions& opts = {}) {
  const Index n = x.cols();
  const Index k = u.cols();
  if (u.rows() != x.rows()) throw DimensionError("l1_csvd: basis rows must equal data rows");
  if (opts.max_outer_iter < 1 || !(opts.tol > 0.0)) {
    throw ContractViolation("l1_csvd: need max_outer_iter >= 1 and tol > 0");
  }

  const Matrix a = x.transpose() * u;  // N x K
  Matrix v;
  if (opts.v_init) {
    v = *opts.v_init;
    if (v.rows() != n || v.cols() != k) throw DimensionError("l1_csvd: v_init must be N x K");
  } else {
    v = random_orthonormal(n, k, derive_seed(opts.seed, "v-init"));
  }

  L1cSvdResult res;
  res.u = u;
  res.sigma = Vector::Zero(k);
  const Index cap = std::min<Index>(n * k, opts.max_outer_iter);

  for (Index it = 0; it < cap; ++it) {
    for (Index i = 0; i < k; ++i) {
      try {
        res.sigma(i) = sigma_search(a.col(i), v.col(i)).sigma;
      } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(std::string(e.what()) + " (column " + std::to_string(i) + ")");
      }
    }
    ++res.iterations;

    const double mp = perf_metric(u, x, res.sigma, v);
    if (!res.mp_trace.empty()) {
      const double prev = res.mp_trace.back();
      if (res.mp_trace.size() > 1 && mp > prev + opts.descent_slack) ++res.descent_violations;
      res.mp_trace.push_back(mp);
      if (std::abs(mp - prev) / std::max(mp, 1e-15) < opts.tol) {
        res.converged = true;
        break;
      }
    } else {
      res.mp_trace.push_back(mp);
    }
    if (it + 1 == cap) break;

    Vector clamped = res.sigma;
    const double floor = opts.sigma_floor * clamped.cwiseAbs().maxCoeff();
    if (!(floor > 0.0)) throw DegenerateInputError("l1_csvd: all singular values are zero");
    for (Index i = 0; i < k; ++i) {
      if (std::abs(clamped(i)) < floor) clamped(i) = clamped(i) < 0.0 ? -floor : floor;
    }
    v = update_v(a, clamped, floor);
  }
  res.v = std::move(v);

  // sigma > 0 by flipping paired V columns; then sort descending.
  for (Index i = 0; i < k; ++i) {
    if (res.sigma(i) < 0.0) {
      res.sigma(i) = -res.sigma(i);
      res.v.col(i) *= -1.0;
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index l, Index r) { return res.sigma(l) > res.sigma(r); });
  Matrix u_sorted(u.rows(), k);
  Matrix v_sorted(n, k);
  Vector s_sorted(k);
  for (Index i = 0; i < k; ++i) {
    u_sorted.col(i) = res.u.col(order[i]);
    v_sorted.col(i) = res.v.col(order[i]);
    s_sorted(i) = res.sigma(order[i]);
  }
  res.u = std::move(u_sorted);
  res.v = std::move(v_sorted);
  res.sigma = std::move(s_sorted);
  return res;
}

/// Robust compact SVD: X ~= U diag(sigma) V^T with U the L1-PCA basis.
inline L1cSvdResult l1_csvd(const Matrix& x, Index k, const L1cSvdOptions& opts = {}) {
  require_finite(x, "l1_csvd");
  L1PcaOptions pca = opts.pca;
  if (pca.init.kind == InitPolicy::Kind::Random) pca.seed = derive_seed(opts.seed, "l1pca-init");
  const L1PcaResult basis = l1pca(x, k, opts.pca_solver, pca);
  L1cSvdResult res = l1_csvd_from_basis(x, basis.q, opts);
  res.l1pca_metric = basis.metric;
  return res;
}

}  // namespace l1csvd
