#pragma once

// Principal component pursuit, min ||L||_* + lambda ||S||_{1,1} s.t. L + S = X,
// solved with the inexact augmented Lagrange multiplier method.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "l1csvd/errors.hpp"
#include "l1csvd/matrix_core.hpp"

namespace l1csvd {

/// Entrywise shrinkage sgn(m) * max(|m| - tau, 0).
inline Matrix soft_threshold(const Matrix& m, double tau) {
  if (tau < 0.0) throw ContractViolation("soft_threshold: tau must be >= 0");
  return m.unaryExpr([tau](double v) {
    const double a = std::abs(v) - tau;
    return a > 0.0 ? std::copysign(a, v) : 0.0;
  });
}

/// Singular-value shrinkage U max(Sigma - tau, 0) V^T.
inline Matrix sv_threshold(const Matrix& m, double tau, Index* rank_out = nullptr) {
  if (tau < 0.0) throw ContractViolation("sv_threshold: tau must be >= 0");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > tau) ++r;
  if (rank_out) *rank_out = r;
  if (r == 0) return Matrix::Zero(m.rows(), m.cols());
  return svd.matrixU().leftCols(r) * (s.head(r).array() - tau).matrix().asDiagonal() *
         svd.matrixV().leftCols(r).transpose();
}

struct RpcaOptions {
  /// Sparse weight; 1/sqrt(max(D, N)) when absent.
  std::optional<double> lambda;
  double tol = 1e-7;
  int max_iter = 1000;
  double rho = 1.5;
  /// mu_0 = mu_scale / ||X||_2.
  double mu_scale = 1.25;
};

struct RpcaResult {
  Matrix l;
  Matrix s;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  Index rank = 0;
  /// ||L_k||_* + lambda ||X - L_k||_{1,1} per iteration (objective at the
  /// feasible point induced by L_k).
  std::vector<double> objective_trace;
};

inline double default_rpca_lambda(const Matrix& x) {
  return 1.0 / std::sqrt(static_cast<double>(std::max(x.rows(), x.cols())));
}

inline double pcp_objective(const Matrix& l, const Matrix& x, double lambda) {
  return nuclear_norm(l) + lambda * l1_entrywise_norm(x - l);
}

inline RpcaResult rpca_pcp(const Matrix& x, const RpcaOptions& opts = {}) {
  require_finite(x, "rpca_pcp");
  if (x.size() == 0) throw DimensionError("rpca_pcp: empty matrix");

  RpcaResult res;
  res.lambda = opts.lambda.value_or(default_rpca_lambda(x));
  if (!(res.lambda > 0.0)) throw ContractViolation("rpca_pcp: lambda must be positive");

  res.l = Matrix::Zero(x.rows(), x.cols());
  res.s = Matrix::Zero(x.rows(), x.cols());
  const double x_norm = x.norm();
  if (x_norm == 0.0) {
    res.converged = true;
    return res;
  }

  const double norm_two = spectral_norm(x);
  const double norm_inf = x.cwiseAbs().maxCoeff() / res.lambda;
  Matrix y = x / std::max(norm_two, norm_inf);
  double mu = opts.mu_scale / norm_two;
  const double mu_max = mu * 1e7;

  for (int it = 0; it < opts.max_iter; ++it) {
    res.s = soft_threshold(x - res.l + y / mu, res.lambda / mu);
    res.l = sv_threshold(x - res.s + y / mu, 1.0 / mu, &res.rank);
    const Matrix z = x - res.l - res.s;
    y += mu * z;
    mu = std::min(mu * opts.rho, mu_max);
    ++res.iterations;
    res.objective_trace.push_back(pcp_objective(res.l, x, res.lambda));
    if (z.norm() / x_norm < opts.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

/// Compact SVD of the recovered low-rank part.
inline CompactSvd rpca_svd(const Matrix& x, Index k, const RpcaOptions& opts = {}) {
  return compact_svd(rpca_pcp(x, opts).l, k);
}

}  // namespace l1csvd
