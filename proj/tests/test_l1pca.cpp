#include <gtest/gtest.h>

#include "l1csvd/l1pca.hpp"
#include "oracles.hpp"

using namespace l1csvd;

namespace {

Matrix gaussian(Index r, Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

constexpr L1PcaSolver kSolvers[] = {L1PcaSolver::Greedy, L1PcaSolver::Joint, L1PcaSolver::BitFlip};

}  // namespace

TEST(L1Pca, SolverNamesRoundTrip) {
  for (auto s : {L1PcaSolver::Greedy, L1PcaSolver::Joint, L1PcaSolver::BitFlip, L1PcaSolver::Exhaustive}) {
    EXPECT_EQ(parse_l1pca_solver(to_string(s)), s);
  }
  EXPECT_THROW(parse_l1pca_solver("nope"), ContractViolation);
}

TEST(L1Pca, MetricIsEntrywiseL1OfProjection) {
  const Matrix x = gaussian(4, 6, 1);
  const Matrix q = random_orthonormal(4, 2, 2);
  EXPECT_NEAR(l1_metric(q, x), oracle::entry_l1(q.transpose() * x), 1e-12);
  EXPECT_THROW(l1_metric(2.0 * q, x), ContractViolation);
}

TEST(L1Pca, ExhaustiveMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = gaussian(3, 8, seed);
    const L1PcaResult r = l1pca_exhaustive(x, 1);
    EXPECT_NEAR(r.metric, oracle::l1pca_rank1_optimum(x), 1e-10);
    EXPECT_LT(orthonormality_residual(r.q), 1e-12);
  }
}

TEST(L1Pca, ExhaustiveLimits) {
  EXPECT_THROW(l1pca_exhaustive(gaussian(3, 8, 1), 2), ContractViolation);
  EXPECT_THROW(l1pca_exhaustive(gaussian(3, kExhaustiveMaxColumns + 1, 1), 1), CapacityError);
}

TEST(L1Pca, RankOneSolversNeverBeatOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix x = gaussian(4, 10, 100 + seed);
    const double opt = oracle::l1pca_rank1_optimum(x);
    for (auto s : kSolvers) EXPECT_LE(l1pca(x, 1, s).metric, opt + 1e-9) << to_string(s);
  }
}

TEST(L1Pca, RankTwoBitFlipBoundedByOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = gaussian(3, 6, 200 + seed);
    const double opt = oracle::l1pca_rank2_optimum(x);
    const L1PcaResult r = l1pca_bitflip(x, 2);
    // At the optimum B, ||XB||_* equals the metric of the Procrustes basis.
    EXPECT_LE(oracle::nuclear_norm_2col(x * r.b), opt + 1e-9);
    EXPECT_GE(oracle::nuclear_norm_2col(x * r.b), 0.9 * opt);
  }
}

TEST(L1Pca, GreedyComponentsOrthonormal) {
  const Matrix x = gaussian(6, 30, 9);
  const L1PcaResult r = l1pca_greedy(x, 4);
  EXPECT_LT(orthonormality_residual(r.q), 1e-10);
  EXPECT_TRUE(r.converged);
}

TEST(L1Pca, RankDeficientProductsDoNotThrow) {
  // Identical start columns make X B rank one although X has full rank.
  const Matrix x = gaussian(3, 6, 41);
  L1PcaOptions opts;
  opts.init = InitPolicy::binary(Matrix::Ones(6, 2));
  for (auto s : {L1PcaSolver::Joint, L1PcaSolver::BitFlip}) {
    ASSERT_NO_THROW(l1pca(x, 2, s, opts));
    const L1PcaResult r = l1pca(x, 2, s, opts);
    EXPECT_LT((r.q.transpose() * r.q - Matrix::Identity(2, 2)).norm(), 1e-10);
  }
}

TEST(L1Pca, JointAndBitFlipTracesNonDecreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = gaussian(5, 15, 300 + seed);
    for (auto s : {L1PcaSolver::Joint, L1PcaSolver::BitFlip}) {
      const L1PcaResult r = l1pca(x, 2, s);
      for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i], r.trace[i - 1] - 1e-9);
    }
  }
}

TEST(L1Pca, RestartFromSolutionDoesNotDecrease) {
  const Matrix x = gaussian(5, 20, 17);
  for (auto s : kSolvers) {
    const L1PcaResult first = l1pca(x, 2, s);
    L1PcaOptions opts;
    opts.init = InitPolicy::basis(first.q);
    const L1PcaResult again = l1pca(x, 2, s, opts);
    EXPECT_GE(again.metric, first.metric - 1e-9) << to_string(s);
  }
}

TEST(L1Pca, OutlierResistance) {
  // Points along e1 plus one huge point along e2: L2 PCA follows the outlier,
  // L1 PCA stays with the bulk.
  Matrix x = Matrix::Zero(2, 21);
  for (Index j = 0; j < 20; ++j) x(0, j) = (j % 2 ? 1.0 : -1.0) * (1.0 + 0.01 * static_cast<double>(j));
  x(1, 20) = 10.0;
  const Matrix q_l1 = l1pca_greedy(x, 1).q;
  const Matrix q_l2 = compact_svd(x, 1).u;
  EXPECT_GT(std::abs(q_l1(0, 0)), 0.9);
  EXPECT_GT(std::abs(q_l2(1, 0)), 0.9);
}

TEST(L1Pca, RankErrors) {
  const Matrix x = gaussian(4, 1, 1) * gaussian(1, 8, 2);
  EXPECT_THROW(l1pca_greedy(x, 2), RankError);
  EXPECT_THROW(l1pca_greedy(x, 0), DimensionError);
}

TEST(L1Pca, RandomInitIsSeeded) {
  const Matrix x = gaussian(5, 12, 4);
  L1PcaOptions opts;
  opts.init = InitPolicy::random();
  opts.seed = 9;
  EXPECT_EQ(l1pca_joint(x, 2, opts).q, l1pca_joint(x, 2, opts).q);
}
