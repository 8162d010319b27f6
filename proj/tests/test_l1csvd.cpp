#include <gtest/gtest.h>

#include "l1csvd/l1csvd.hpp"
#include "oracles.hpp"

using namespace l1csvd;

namespace {

Matrix gaussian(Index r, Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

Vector unit(Index n, std::uint64_t seed) {
  Vector v = gaussian(n, 1, seed);
  return v / v.norm();
}

}  // namespace

TEST(SigmaSearch, ExactOnProportionalData) {
  const Vector v = unit(6, 1);
  const SigmaFit f = sigma_search(3.5 * v, v);
  EXPECT_NEAR(f.sigma, 3.5, 1e-12);
  EXPECT_NEAR(f.l1_error, 0.0, 1e-12);
}

TEST(SigmaSearch, RobustToOneGrossEntry) {
  const Vector v = Vector::Constant(5, 1.0 / std::sqrt(5.0));
  Vector a = 2.0 * v;
  a(3) += 100.0;
  EXPECT_NEAR(sigma_search(a, v).sigma, 2.0, 1e-12);
}

TEST(SigmaSearch, MatchesGridScan) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Vector v = unit(7, 10 + seed);
    const Vector a = gaussian(7, 1, 50 + seed);
    const SigmaFit f = sigma_search(a, v);
    // Any minimizer has |s| ||v||_1 <= 2 ||a||_1, since f(0) = ||a||_1.
    const double bound = 2.0 * a.lpNorm<1>() / v.lpNorm<1>();
    const auto scan = oracle::scan_l1_scale(a, v, -bound, bound, 1e-4);
    EXPECT_LE(f.l1_error, scan.err + 1e-12);
    EXPECT_NEAR(f.l1_error, (a - f.sigma * v).cwiseAbs().sum(), 1e-12);
  }
}

TEST(SigmaSearch, BeatsEveryCandidate) {
  const Vector v = unit(9, 3);
  const Vector a = gaussian(9, 1, 4);
  const SigmaFit f = sigma_search(a, v);
  for (Index j = 0; j < 9; ++j) EXPECT_LE(f.l1_error, (a - (a(j) / v(j)) * v).cwiseAbs().sum() + 1e-12);
}

TEST(SigmaSearch, Errors) {
  EXPECT_THROW(sigma_search(Vector::Ones(3), Vector::Ones(2) / std::sqrt(2.0)), DimensionError);
  EXPECT_THROW(sigma_search(Vector::Ones(3), Vector::Ones(3)), ContractViolation);
}

TEST(UpdateV, OrthonormalAndFloor) {
  const Matrix a = gaussian(10, 3, 5);
  Vector s(3);
  s << 3.0, 2.0, 1.0;
  EXPECT_LT(orthonormality_residual(update_v(a, s)), 1e-10);
  s(2) = 1e-14;
  EXPECT_THROW(update_v(a, s), DegenerateInputError);
}

TEST(PerfMetric, ZeroForExactFactorization) {
  const CompactSvd s = compact_svd(gaussian(4, 9, 6), 4);
  const Matrix x = s.reconstruct();
  EXPECT_NEAR(perf_metric(s.u, x, s.sigma, s.v), 0.0, 1e-12);
}

TEST(L1cSvd, RecoversNoiselessRankOne) {
  const Matrix x = gaussian(6, 1, 7) * gaussian(1, 25, 8);
  const double sigma = compact_svd(x, 1).sigma(0);
  const L1cSvdResult r = l1_csvd(x, 1);
  EXPECT_NEAR(r.sigma(0), sigma, 1e-10 * sigma);
  EXPECT_LT((r.reconstruct() - x).norm(), 1e-10 * x.norm());
  EXPECT_NEAR(r.final_mp(), 0.0, 1e-12);
}

TEST(L1cSvd, HigherRankFitIsCloseButNotExact) {
  // U is an L1 basis of the column space, not the singular basis, so U^T X
  // generally has no exact sigma V^T factorization.
  const CompactSvd truth = compact_svd(gaussian(6, 3, 7) * gaussian(3, 25, 8), 3);
  const L1cSvdResult r = l1_csvd(truth.reconstruct(), 3);
  EXPECT_LT(r.final_mp(), 0.2);
  EXPECT_LT((r.sigma - truth.sigma).norm(), 0.1 * truth.sigma.norm());
}

TEST(L1cSvd, OutputContract) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = gaussian(5, 20, 20 + seed);
    L1cSvdOptions opts;
    opts.seed = seed;
    const L1cSvdResult r = l1_csvd(x, 3, opts);
    EXPECT_LT(orthonormality_residual(r.v), 1e-10);
    EXPECT_LT(orthonormality_residual(r.u), 1e-10);
    for (Index i = 0; i < 3; ++i) EXPECT_GT(r.sigma(i), 0.0);
    for (Index i = 1; i < 3; ++i) EXPECT_GE(r.sigma(i - 1), r.sigma(i));
    ASSERT_FALSE(r.mp_trace.empty());
    EXPECT_NEAR(r.final_mp(), perf_metric(r.u, x, r.sigma, r.v), 1e-10);
  }
}

TEST(L1cSvd, BasisKeptUpToPermutationAndSign) {
  const Matrix x = gaussian(6, 30, 40);
  const Matrix u0 = l1pca_greedy(x, 3).q;
  const L1cSvdResult r = l1_csvd(x, 3);
  const Matrix overlap = (u0.transpose() * r.u).cwiseAbs();
  for (Index c = 0; c < 3; ++c) EXPECT_NEAR(overlap.col(c).maxCoeff(), 1.0, 1e-10);
}

TEST(L1cSvd, SeedDeterminism) {
  const Matrix x = gaussian(8, 50, 1);
  L1cSvdOptions opts;
  opts.seed = 12;
  const L1cSvdResult a = l1_csvd(x, 5, opts);
  const L1cSvdResult b = l1_csvd(x, 5, opts);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.v, b.v);
}

TEST(L1cSvd, ResistsColumnOutlier) {
  const CompactSvd truth = compact_svd(gaussian(8, 2, 2) * gaussian(2, 60, 3), 2);
  Matrix x = truth.reconstruct();
  x.col(5) += 40.0 * unit(8, 9);
  const Vector robust = l1_csvd(x, 2).sigma;
  const Vector plain = compact_svd(x, 2).sigma;
  EXPECT_LT((robust - truth.sigma).norm(), (plain - truth.sigma).norm());
}

TEST(L1cSvd, VInitShapeChecked) {
  L1cSvdOptions opts;
  opts.v_init = Matrix::Identity(3, 2);
  EXPECT_THROW(l1_csvd(gaussian(4, 10, 1), 2, opts), DimensionError);
}
