#pragma once

// L1-norm principal components: Q = argmax ||Q^T X||_{1,1} over matrices with
// orthonormal columns. Three approximate solvers (greedy fixed-point with
// nullspace deflation, joint alternating sign/Procrustes, and single-bit
// flipping) plus an exhaustive oracle for one component on small N.
//
// All solvers are built on the identity
//   max_Q ||Q^T X||_{1,1} = max_{B in {+-1}^{N x K}} ||X B||_*,
// where the optimal Q for a fixed B is the Procrustes factor of X B.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "l1csvd/errors.hpp"
#include "l1csvd/matrix_core.hpp"
#include "l1csvd/random.hpp"

namespace l1csvd {

enum class L1PcaSolver { Greedy, Joint, BitFlip, Exhaustive };

inline const char* to_string(L1PcaSolver s) {
  switch (s) {
    case L1PcaSolver::Greedy: return "greedy";
    case L1PcaSolver::Joint: return "joint";
    case L1PcaSolver::BitFlip: return "bitflip";
    case L1PcaSolver::Exhaustive: return "exhaustive";
  }
  return "?";
}

inline L1PcaSolver parse_l1pca_solver(const std::string& name) {
  if (name == "greedy") return L1PcaSolver::Greedy;
  if (name == "joint") return L1PcaSolver::Joint;
  if (name == "bitflip") return L1PcaSolver::BitFlip;
  if (name == "exhaustive") return L1PcaSolver::Exhaustive;
  throw ContractViolation("unknown L1-PCA solver '" + name + "'");
}

/// How the binary variables are initialized.
struct InitPolicy {
  enum class Kind {
    L2Svd,   ///< B = sgn(X^T U_L2) from the leading L2 left singular vectors
    Random,  ///< antipodal entries drawn from the seed
    Binary,  ///< caller-supplied B (N x K)
    Basis,   ///< B = sgn(X^T Q) for a caller-supplied basis Q (D x K)
  };
  Kind kind = Kind::L2Svd;
  Matrix start;

  static InitPolicy l2() { return {}; }
  static InitPolicy random() { return {Kind::Random, {}}; }
  static InitPolicy binary(Matrix b) { return {Kind::Binary, std::move(b)}; }
  static InitPolicy basis(Matrix q) { return {Kind::Basis, std::move(q)}; }
};

struct L1PcaOptions {
  InitPolicy init;
  int max_iter = 1000;
  std::uint64_t seed = 0;
};

struct L1PcaResult {
  Matrix q;                  ///< D x K, orthonormal columns
  double metric = 0.0;       ///< ||q^T X||_{1,1}
  int iterations = 0;        ///< fixed-point steps, alternations or flips
  L1PcaSolver solver = L1PcaSolver::Greedy;
  bool converged = true;
  Matrix b;                  ///< final binary matrix (N x K)
  std::vector<double> trace; ///< solver objective after every accepted step
};

/// ||Q^T X||_{1,1}; q must have orthonormal columns.
inline double l1_metric(const Matrix& q, const Matrix& x) {
  if (q.rows() != x.rows()) throw DimensionError("l1_metric: q and x row counts differ");
  if (orthonormality_residual(q) > 1e-8) {
    throw ContractViolation("l1_metric: q does not have orthonormal columns");
  }
  return l1_entrywise_norm(q.transpose() * x);
}

namespace detail {

inline void check_l1pca_args(const Matrix& x, Index k, const char* who) {
  require_finite(x, who);
  if (k < 1) throw DimensionError(std::string(who) + ": k must be >= 1");
  if (k > std::min(x.rows(), x.cols())) {
    throw DimensionError(std::string(who) + ": k exceeds matrix dimensions");
  }
  const Index rank = numerical_rank(x);
  if (k > rank) {
    throw RankError(std::string(who) + ": k=" + std::to_string(k) + " exceeds rank " +
                    std::to_string(rank));
  }
}

inline Matrix random_signs(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix b(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) b(r, c) = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return b;
}

/// Initial B (N x K) for the joint and bit-flipping solvers.
inline Matrix initial_binary(const Matrix& x, Index k, const L1PcaOptions& opts) {
  switch (opts.init.kind) {
    case InitPolicy::Kind::L2Svd: return sign_matrix(x.transpose() * compact_svd(x, k).u);
    case InitPolicy::Kind::Random: return random_signs(x.cols(), k, opts.seed);
    case InitPolicy::Kind::Binary:
      if (opts.init.start.rows() != x.cols() || opts.init.start.cols() != k) {
        throw DimensionError("l1pca: binary init must be N x K");
      }
      return sign_matrix(opts.init.start);
    case InitPolicy::Kind::Basis:
      if (opts.init.start.rows() != x.rows() || opts.init.start.cols() != k) {
        throw DimensionError("l1pca: basis init must be D x K");
      }
      return sign_matrix(x.transpose() * opts.init.start);
  }
  return {};
}

}  // namespace detail

/// Greedy L1-PCA: one component at a time via b <- sgn(X^T X b) iterated to a
/// fixed point, q = X b / ||X b||, then X is deflated onto the orthogonal
/// complement of q. A fixed-point cycle longer than max_iter keeps the best
/// iterate and clears `converged`.
inline L1PcaResult l1pca_greedy(const Matrix& x, Index k, const L1PcaOptions& opts = {}) {
  detail::check_l1pca_args(x, k, "l1pca_greedy");
  const Index d = x.rows();
  const Index n = x.cols();

  Matrix init_b;
  if (opts.init.kind == InitPolicy::Kind::Random || opts.init.kind == InitPolicy::Kind::Binary) {
    init_b = detail::initial_binary(x, k, opts);
  }

  L1PcaResult res;
  res.solver = L1PcaSolver::Greedy;
  res.q = Matrix::Zero(d, k);
  res.b = Matrix::Zero(n, k);

  Matrix xd = x;
  for (Index j = 0; j < k; ++j) {
    Vector b;
    switch (opts.init.kind) {
      case InitPolicy::Kind::L2Svd: b = sign_vector(xd.transpose() * compact_svd(xd, 1).u.col(0)); break;
      case InitPolicy::Kind::Basis:
        if (opts.init.start.rows() != d || opts.init.start.cols() != k) {
          throw DimensionError("l1pca: basis init must be D x K");
        }
        b = sign_vector(xd.transpose() * opts.init.start.col(j));
        break;
      default: b = init_b.col(j); break;
    }

    Vector w = xd * b;
    double best = w.norm();
    Vector best_b = b;
    bool fixed = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      Vector next = sign_vector(xd.transpose() * w);
      ++res.iterations;
      if (next == b) {
        fixed = true;
        break;
      }
      b = std::move(next);
      w = xd * b;
      const double val = w.norm();
      if (val > best) {
        best = val;
        best_b = b;
      }
    }
    if (!fixed) {
      res.converged = false;
      b = best_b;
      w = xd * b;
    }
    if (w.norm() == 0.0) throw DegenerateInputError("l1pca_greedy: zero projection");

    Vector q = w / w.norm();
    // Deflation keeps q in the complement already; this removes round-off.
    if (j > 0) {
      const auto prev = res.q.leftCols(j);
      q -= prev * (prev.transpose() * q);
      q.normalize();
    }
    res.q.col(j) = q;
    res.b.col(j) = b;
    res.trace.push_back(best);
    xd -= q * (q.transpose() * xd);
  }
  res.metric = l1_entrywise_norm(res.q.transpose() * x);
  return res;
}

/// Joint L1-PCA: B <- sgn(X^T Q), Q <- procrustes(X B) until B repeats, the
/// metric stops improving (< 1e-12) or max_iter is reached.
inline L1PcaResult l1pca_joint(const Matrix& x, Index k, const L1PcaOptions& opts = {}) {
  detail::check_l1pca_args(x, k, "l1pca_joint");

  L1PcaResult res;
  res.solver = L1PcaSolver::Joint;
  res.converged = false;
  res.b = detail::initial_binary(x, k, opts);
  res.q = polar_factor(x * res.b);
  res.metric = l1_entrywise_norm(res.q.transpose() * x);
  res.trace.push_back(res.metric);

  for (int it = 0; it < opts.max_iter; ++it) {
    Matrix next = sign_matrix(x.transpose() * res.q);
    ++res.iterations;
    if (next == res.b) {
      res.converged = true;
      break;
    }
    Matrix q = polar_factor(x * next);
    const double metric = l1_entrywise_norm(q.transpose() * x);
    res.b = std::move(next);
    res.q = std::move(q);
    const double gain = metric - res.metric;
    res.metric = metric;
    res.trace.push_back(metric);
    if (gain < 1e-12) {
      res.converged = true;
      break;
    }
  }
  return res;
}

/// Bit-flipping L1-PCA: steepest single-bit ascent on ||X B||_*. Every step
/// evaluates all N*K flips and applies the largest strictly improving one
/// (ties resolve to the lowest (row, column) index). Stops at a local maximum.
inline L1PcaResult l1pca_bitflip(const Matrix& x, Index k, const L1PcaOptions& opts = {}) {
  detail::check_l1pca_args(x, k, "l1pca_bitflip");
  const Index n = x.cols();

  L1PcaResult res;
  res.solver = L1PcaSolver::BitFlip;
  res.converged = false;
  res.b = detail::initial_binary(x, k, opts);

  auto objective = [k](const Matrix& xb) {
    return k == 1 ? xb.col(0).norm() : nuclear_norm(xb);
  };

  Matrix xb = x * res.b;
  double value = objective(xb);
  res.trace.push_back(value);

  Matrix trial = xb;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double threshold = 1e-12 * std::max(1.0, value);
    double best_gain = threshold;
    Index best_row = -1;
    Index best_col = -1;
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < k; ++c) {
        trial.col(c) = xb.col(c) - 2.0 * res.b(r, c) * x.col(r);
        const double gain = objective(trial) - value;
        trial.col(c) = xb.col(c);
        if (gain > best_gain) {
          best_gain = gain;
          best_row = r;
          best_col = c;
        }
      }
    }
    if (best_row < 0) {
      res.converged = true;
      break;
    }
    xb.col(best_col) -= 2.0 * res.b(best_row, best_col) * x.col(best_row);
    trial.col(best_col) = xb.col(best_col);
    res.b(best_row, best_col) *= -1.0;
    value = objective(xb);
    res.trace.push_back(value);
    ++res.iterations;
  }

  res.q = polar_factor(x * res.b);
  res.metric = l1_entrywise_norm(res.q.transpose() * x);
  return res;
}

/// Largest N accepted by the exhaustive oracle.
inline constexpr Index kExhaustiveMaxColumns = 20;

/// Globally optimal single L1 component by enumerating b in {+-1}^N.
/// Candidates are visited in lexicographic order with +1 before -1 and only
/// strict improvements replace the incumbent, so of each (b, -b) pair the one
/// with b_1 = +1 wins.
inline L1PcaResult l1pca_exhaustive(const Matrix& x, Index k = 1) {
  if (k != 1) throw ContractViolation("l1pca_exhaustive: only k = 1 is supported");
  if (x.cols() > kExhaustiveMaxColumns) {
    throw CapacityError("l1pca_exhaustive: N=" + std::to_string(x.cols()) + " exceeds " +
                        std::to_string(kExhaustiveMaxColumns));
  }
  require_finite(x, "l1pca_exhaustive");
  const Index n = x.cols();

  // b_1 = +1 throughout: the mirrored half never strictly improves.
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  double best = -1.0;
  Vector best_b(n);
  Vector b(n);
  for (std::uint64_t mask = 0; mask < half; ++mask) {
    for (Index i = 0; i < n; ++i) {
      b(i) = ((mask >> (n - 1 - i)) & 1U) ? -1.0 : 1.0;
    }
    const double val = (x * b).norm();
    if (val > best) {
      best = val;
      best_b = b;
    }
  }
  if (best <= 0.0) throw DegenerateInputError("l1pca_exhaustive: zero matrix");

  L1PcaResult res;
  res.solver = L1PcaSolver::Exhaustive;
  res.b = best_b;
  res.q = x * best_b / best;
  res.metric = l1_entrywise_norm(res.q.transpose() * x);
  res.iterations = static_cast<int>(half);
  res.trace.push_back(best);
  return res;
}

inline L1PcaResult l1pca(const Matrix& x, Index k, L1PcaSolver solver, const L1PcaOptions& opts = {}) {
  switch (solver) {
    case L1PcaSolver::Greedy: return l1pca_greedy(x, k, opts);
    case L1PcaSolver::Joint: return l1pca_joint(x, k, opts);
    case L1PcaSolver::BitFlip: return l1pca_bitflip(x, k, opts);
    case L1PcaSolver::Exhaustive: return l1pca_exhaustive(x, k);
  }
  throw ContractViolation("l1pca: unknown solver");
}

}  // namespace l1csvd
