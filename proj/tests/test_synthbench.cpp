#include <gtest/gtest.h>

#include <set>

#include "l1csvd/synthbench.hpp"

using namespace l1csvd;
using namespace l1csvd::synth;

TEST(Synth, EnergiesMatchConfiguredRatios) {
  SyntheticConfig cfg;
  cfg.p_o = 0.3;
  cfg.osr_db = 5.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const SyntheticInstance inst = generate_instance(cfg, trial_seed(cfg, t));
    const double sig = inst.sigma0.squaredNorm();
    EXPECT_NEAR(inst.noise.squaredNorm() / sig, 0.1, 1e-9);
    if (inst.corrupted_columns() > 0) EXPECT_NEAR(inst.outliers.squaredNorm() / sig, std::pow(10.0, 0.5), 1e-9);
  }
}

TEST(Synth, SnrAsWrittenInvertsRatio) {
  SyntheticConfig cfg;
  cfg.snr_as_written = true;
  EXPECT_NEAR(noise_to_signal(cfg), 10.0, 1e-12);
  cfg.snr_as_written = false;
  EXPECT_NEAR(noise_to_signal(cfg), 0.1, 1e-12);
}

TEST(Synth, CleanSvdErrorIsZeroWithoutNoiseOrOutliers) {
  SyntheticConfig cfg;
  cfg.snr_db = std::numeric_limits<double>::infinity();
  cfg.p_o = 0.0;
  const SyntheticInstance inst = generate_instance(cfg, 3);
  EXPECT_EQ(inst.noise.norm(), 0.0);
  EXPECT_EQ(inst.outliers.norm(), 0.0);
  const Vector clean = compact_svd(inst.x_clean, cfg.k).sigma;
  EXPECT_EQ(r_sv(clean, clean), 0.0);
  EXPECT_LT(r_sv(compact_svd(inst.x_corrupted, cfg.k).sigma, inst.sigma0), 1e-12);
}

TEST(Synth, SingularValuesInRangeAndSorted) {
  SyntheticConfig cfg;
  const SyntheticInstance inst = generate_instance(cfg, 11);
  for (Index i = 0; i < cfg.k; ++i) {
    EXPECT_GE(inst.sigma0(i), cfg.sv_log_low);
    EXPECT_LE(inst.sigma0(i), cfg.sv_log_high);
    if (i) EXPECT_GE(inst.sigma0(i - 1), inst.sigma0(i));
  }
}

TEST(Synth, OutliersOnlyInFlaggedColumns) {
  SyntheticConfig cfg;
  cfg.p_o = 0.5;
  const SyntheticInstance inst = generate_instance(cfg, 2);
  for (Index c = 0; c < cfg.n; ++c) {
    if (!inst.gamma[c]) {
      EXPECT_EQ(inst.outliers.col(c).norm(), 0.0);
    }
  }
}

TEST(Synth, RsvDefinition) {
  Vector est(2), ref(2);
  est << 3.0, 4.0;
  ref << 3.0, 2.0;
  EXPECT_NEAR(r_sv(est, ref), 2.0 / std::sqrt(13.0), 1e-15);
  EXPECT_NEAR(r_sv_i(est, ref, 2), 1.0, 1e-15);
  EXPECT_NEAR(r_sv_i(est, ref, 1), 0.0, 1e-15);
}

TEST(Synth, ConfigValidation) {
  SyntheticConfig cfg;
  cfg.k = 11;
  EXPECT_THROW(cfg.validate(), DimensionError);
  cfg = {};
  cfg.p_o = 1.5;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.trials = -1;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Sweep, RowCountAndOrdering) {
  SyntheticConfig cfg;
  cfg.trials = 3;
  const std::vector<double> grid{-10.0, 0.0};
  const auto rep = run_sweep(cfg, grid, all_sv_methods());
  ASSERT_EQ(rep.records.size(), all_sv_methods().size() * grid.size() * 3);
  EXPECT_EQ(rep.records.front().method, SvMethod::Svd);
  EXPECT_EQ(rep.records[3].osr_db, 0.0);
  for (const auto& r : rep.records) EXPECT_TRUE(r.ok()) << r.error;
}

TEST(Sweep, ZeroTrialsGivesEmptyReport) {
  SyntheticConfig cfg;
  cfg.trials = 0;
  const auto rep = run_sweep(cfg, {0.0}, {SvMethod::Svd});
  EXPECT_TRUE(rep.records.empty());
  EXPECT_EQ(rep.summary(SvMethod::Svd, 0).count, 0);
}

TEST(Sweep, ParallelMatchesSerial) {
  SyntheticConfig cfg;
  cfg.trials = 4;
  const auto a = run_sweep(cfg, {0.0, 5.0}, all_sv_methods(), 1);
  const auto b = run_sweep(cfg, {0.0, 5.0}, all_sv_methods(), 3);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].r_sv, b.records[i].r_sv);
}

TEST(Sweep, DroppingAMethodKeepsOthersUnchanged) {
  SyntheticConfig cfg;
  cfg.trials = 3;
  const auto all = run_sweep(cfg, {5.0}, {SvMethod::Svd, SvMethod::L1cSvd});
  const auto one = run_sweep(cfg, {5.0}, {SvMethod::L1cSvd});
  for (int t = 0; t < 3; ++t) EXPECT_EQ(all.records[3 + t].r_sv, one.records[t].r_sv);
}

TEST(Sweep, SummaryStatistics) {
  std::vector<TrialRecord> rows(3);
  rows[0].r_sv = 1.0;
  rows[1].r_sv = 3.0;
  rows[2].error = "boom";
  for (auto& r : rows) r.r_sv_i = {0.5};
  std::vector<const TrialRecord*> ptrs{&rows[0], &rows[1], &rows[2]};
  const Summary s = summarize(ptrs, 1);
  EXPECT_EQ(s.count, 2);
  EXPECT_EQ(s.failures, 1);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.median, 2.0);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(2.0));
}

TEST(Sweep, MethodNames) {
  for (auto m : all_sv_methods()) EXPECT_EQ(parse_sv_method(to_string(m)), m);
  EXPECT_THROW(parse_sv_method("pca"), ContractViolation);
}
