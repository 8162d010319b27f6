#include <gtest/gtest.h>

#include <sstream>

#include "l1csvd/classifier.hpp"
#include "oracles.hpp"

using namespace l1csvd;
using namespace l1csvd::vowel;

namespace {

Matrix gaussian(Index r, Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

const char* kTiny =
    "Speaker_Number\tFeature_0\tFeature_1\ttarget\n"
    "0\t1.0\t2.0\t0\n"
    "1\t1.5\t2.5\t0\n"
    "0\t-1.0\t0.5\t1\n"
    "1\t-2.0\t0.0\t1\n";

}  // namespace

TEST(Loader, ParsesTabSeparatedAndExcludesColumns) {
  std::istringstream in(kTiny);
  LoadOptions opts;
  opts.exclude_columns = {"Speaker_Number"};
  opts.min_class_size = 2;
  const LabeledDataset ds = load_pmlb(in, opts);
  EXPECT_EQ(ds.features.rows(), 2);
  EXPECT_EQ(ds.features.cols(), 4);
  EXPECT_EQ(ds.class_names.size(), 2U);
  EXPECT_EQ(ds.features(1, 2), 0.5);
  EXPECT_EQ(ds.labels[3], 1);
}

TEST(Loader, CommaSeparatedAlsoAccepted) {
  std::string text = kTiny;
  std::replace(text.begin(), text.end(), '\t', ',');
  std::istringstream in(text);
  LoadOptions opts;
  opts.min_class_size = 2;
  EXPECT_EQ(load_pmlb(in, opts).features.rows(), 3);
}

TEST(Loader, MissingTargetAndBadValue) {
  std::istringstream no_target("a\tb\n1\t2\n");
  EXPECT_THROW(load_pmlb(no_target), IngestionError);
  std::istringstream bad("a\ttarget\nx\t0\n");
  EXPECT_THROW(load_pmlb(bad), IngestionError);
}

TEST(Loader, SmallClassesRejected) {
  std::istringstream in(kTiny);
  LoadOptions opts;
  opts.min_class_size = 3;
  EXPECT_THROW(load_pmlb(in, opts), IngestionError);
}

TEST(Loader, BundledVowelData) {
  const LabeledDataset ds = load_pmlb_vowel(L1CSVD_DATA_DIR "/vowel.tsv");
  EXPECT_EQ(ds.features.rows(), 11);
  EXPECT_EQ(ds.features.cols(), 990);
  EXPECT_EQ(ds.class_names.size(), 11U);
}

TEST(Split, StratifiedAndDisjoint) {
  const LabeledDataset ds = load_pmlb_vowel(L1CSVD_DATA_DIR "/vowel.tsv");
  const TrainTestSplit s = split_dataset(ds, 75, 15, 4);
  ASSERT_EQ(s.train.size(), 11U);
  for (const auto& block : s.train) EXPECT_EQ(block.cols(), 75);
  EXPECT_EQ(s.test.cols(), 165);
  const TrainTestSplit again = split_dataset(ds, 75, 15, 4);
  EXPECT_EQ(s.test, again.test);
  EXPECT_THROW(split_dataset(ds, 80, 15, 4), DimensionError);
}

TEST(Median, MatchesOracle) {
  const Matrix x = gaussian(4, 8, 1);
  EXPECT_LT((column_median(x) - oracle::column_median(x)).norm(), 1e-15);
  const Matrix y = gaussian(3, 7, 2);
  EXPECT_LT((column_median(y) - oracle::column_median(y)).norm(), 1e-15);
}

TEST(Median, RobustToFewCorruptedColumns) {
  const Matrix x = gaussian(5, 75, 3);
  const Matrix c = corrupt_training(x, 3, 25.0, 8);
  Vector iqr(5);
  for (Index r = 0; r < 5; ++r) {
    std::vector<double> row(x.row(r).begin(), x.row(r).end());
    std::sort(row.begin(), row.end());
    iqr(r) = row[56] - row[18];
  }
  const Vector shift = (column_median(c) - column_median(x)).cwiseAbs();
  for (Index r = 0; r < 5; ++r) EXPECT_LT(shift(r), iqr(r));
}

TEST(Corruption, TouchesExactlyCountColumns) {
  const Matrix x = gaussian(4, 20, 5);
  std::vector<Index> chosen;
  const Matrix c = corrupt_training(x, 3, 25.0, 6, &chosen);
  ASSERT_EQ(chosen.size(), 3U);
  int changed = 0;
  for (Index j = 0; j < 20; ++j) changed += (c.col(j) - x.col(j)).norm() > 0.0;
  EXPECT_EQ(changed, 3);
}

TEST(Mahalanobis, InvariantToPermutationAndSign) {
  const Matrix x = gaussian(4, 30, 7);
  ClassModel m = train_class(x, TrainMethod::Svd, 3);
  const Vector y = gaussian(4, 1, 8);
  const double d = mahalanobis(y, m);
  ClassModel p = m;
  p.u.col(0) = -m.u.col(2);
  p.u.col(2) = m.u.col(0);
  p.sigma(0) = m.sigma(2);
  p.sigma(2) = m.sigma(0);
  EXPECT_NEAR(mahalanobis(y, p), d, 1e-12);
}

TEST(Mahalanobis, HandComputed) {
  ClassModel m;
  m.median = Vector::Zero(2);
  m.u = Matrix::Identity(2, 2);
  m.sigma = Vector::Constant(2, 2.0);
  m.n_train = 4;
  Vector y(2);
  y << 3.0, 4.0;
  // sqrt(n) / sigma = 1, so the distance is ||y||.
  EXPECT_NEAR(mahalanobis(y, m), 5.0, 1e-15);
}

TEST(Classify, PicksNearestAndBreaksTiesLow) {
  ClassModel a, b;
  a.label = 0;
  b.label = 1;
  for (ClassModel* m : {&a, &b}) {
    m->u = Matrix::Identity(2, 2);
    m->sigma = Vector::Ones(2);
    m->n_train = 1;
  }
  a.median = Vector::Zero(2);
  b.median = Vector::Constant(2, 10.0);
  EXPECT_EQ(classify(Vector::Constant(2, 9.0), {a, b}), 1);
  EXPECT_EQ(classify(Vector::Constant(2, 5.0), {b, a}), 0);
}

TEST(Experiment, ReproducibleAndShaped) {
  const LabeledDataset ds = load_pmlb_vowel(L1CSVD_DATA_DIR "/vowel.tsv");
  const TrainTestSplit split = split_dataset(ds, 75, 15, 1);
  VowelConfig cfg;
  cfg.trials = 2;
  const std::vector<TrainMethod> methods{TrainMethod::Svd, TrainMethod::L1cSvd};
  const VowelReport a = run_vowel_experiment(split, cfg, methods);
  const VowelReport b = run_vowel_experiment(split, cfg, methods);
  ASSERT_EQ(a.records.size(), 4U);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].accuracy, b.records[i].accuracy);
  EXPECT_EQ(a.sv_profiles.size(), 11U);
}

TEST(Experiment, ZeroTrials) {
  const LabeledDataset ds = load_pmlb_vowel(L1CSVD_DATA_DIR "/vowel.tsv");
  VowelConfig cfg;
  cfg.trials = 0;
  const VowelReport r = run_vowel_experiment(split_dataset(ds, 75, 15, 1), cfg, {TrainMethod::Svd});
  EXPECT_TRUE(r.records.empty());
}
