#pragma once

// Subspace Bayesian classifier on tabular data (PMLB layout): per-class median
// and compact decomposition, Mahalanobis scoring along the class singular
// vectors, and a corruption study comparing SVD, RPCA and L1-cSVD training.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "l1csvd/csv.hpp"
#include "l1csvd/errors.hpp"
#include "l1csvd/l1csvd.hpp"
#include "l1csvd/matrix_core.hpp"
#include "l1csvd/parallel.hpp"
#include "l1csvd/random.hpp"
#include "l1csvd/rpca.hpp"

namespace l1csvd::vowel {

struct LabeledDataset {
  Matrix features;                      ///< D x N, one sample per column
  std::vector<int> labels;              ///< class index 0..C-1 per column
  std::vector<std::string> class_names; ///< original target value per class index
  std::vector<std::string> feature_names;

  [[nodiscard]] int classes() const { return static_cast<int>(class_names.size()); }
  [[nodiscard]] Index dims() const { return features.rows(); }
  [[nodiscard]] Index samples() const { return features.cols(); }
};

struct LoadOptions {
  /// Feature columns to drop by header name.
  std::vector<std::string> exclude_columns;
  /// Every class must have at least this many samples.
  int min_class_size = 90;
};

/// Columns the vowel experiment drops: bookkeeping fields, not measurements.
inline LoadOptions vowel_load_options() {
  LoadOptions o;
  o.exclude_columns = {"Train_or_Test", "Speaker_Number"};
  return o;
}

/// Reads a delimited text file (tab or comma) whose header row contains a
/// `target` column. All other non-excluded columns must be numeric.
inline LabeledDataset load_pmlb(std::istream& in, const LoadOptions& opts = {}) {
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("dataset: empty input");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split(trim(line), delim);

  int target = -1;
  std::vector<int> keep;
  LabeledDataset ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(trim(header[c]));
    if (name == "target") {
      target = static_cast<int>(c);
    } else if (std::find(opts.exclude_columns.begin(), opts.exclude_columns.end(), name) ==
               opts.exclude_columns.end()) {
      keep.push_back(static_cast<int>(c));
      ds.feature_names.push_back(name);
    }
  }
  if (target < 0) throw IngestionError("dataset: header has no 'target' column");
  if (keep.empty()) throw IngestionError("dataset: no feature columns");

  std::vector<std::vector<double>> cols;
  std::vector<std::string> raw_labels;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, delim);
    if (fields.size() != header.size()) {
      throw IngestionError("dataset row " + std::to_string(row_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> sample;
    for (std::size_t f = 0; f < keep.size(); ++f) {
      double v = 0.0;
      if (!parse_double(fields[keep[f]], v)) {
        throw IngestionError("dataset row " + std::to_string(row_no) + ": non-numeric value '" +
                             std::string(trim(fields[keep[f]])) + "' in column " + ds.feature_names[f]);
      }
      sample.push_back(v);
    }
    const std::string label(trim(fields[target]));
    if (label.empty()) throw IngestionError("dataset row " + std::to_string(row_no) + ": empty target");
    cols.push_back(std::move(sample));
    raw_labels.push_back(label);
  }
  if (cols.empty()) throw IngestionError("dataset: no rows");

  // Class order: numeric targets sort numerically, otherwise lexically.
  std::vector<std::string> names(raw_labels);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    double v;
    return parse_double(s, v);
  });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      double x = 0, y = 0;
      parse_double(a, x);
      parse_double(b, y);
      return x < y;
    });
  }
  ds.class_names = names;

  ds.features.resize(static_cast<Index>(keep.size()), static_cast<Index>(cols.size()));
  ds.labels.resize(cols.size());
  std::vector<int> counts(names.size(), 0);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t f = 0; f < keep.size(); ++f) ds.features(static_cast<Index>(f), static_cast<Index>(j)) = cols[j][f];
    const int cls = static_cast<int>(std::find(names.begin(), names.end(), raw_labels[j]) - names.begin());
    ds.labels[j] = cls;
    ++counts[cls];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < opts.min_class_size) {
      throw IngestionError("dataset: class '" + names[c] + "' has " + std::to_string(counts[c]) +
                           " samples, need at least " + std::to_string(opts.min_class_size));
    }
  }
  return ds;
}

inline LabeledDataset load_pmlb(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path);
  return load_pmlb(in, opts);
}

/// The vowel dataset with bookkeeping columns removed.
inline LabeledDataset load_pmlb_vowel(const std::string& path) { return load_pmlb(path, vowel_load_options()); }

struct TrainTestSplit {
  std::vector<Matrix> train;  ///< one D x n_train block per class
  Matrix test;                ///< D x (C * n_test)
  std::vector<int> test_labels;
};

/// Per-class stratified split: a seeded shuffle of each class, the first
/// `n_train` columns for training and the next `n_test` for testing.
inline TrainTestSplit split_dataset(const LabeledDataset& ds, int n_train, int n_test, std::uint64_t seed) {
  TrainTestSplit out;
  const int c_count = ds.classes();
  out.test.resize(ds.dims(), static_cast<Index>(c_count) * n_test);
  Index test_col = 0;
  for (int c = 0; c < c_count; ++c) {
    std::vector<Index> idx;
    for (std::size_t j = 0; j < ds.labels.size(); ++j)
      if (ds.labels[j] == c) idx.push_back(static_cast<Index>(j));
    if (static_cast<int>(idx.size()) < n_train + n_test) {
      throw DimensionError("split: class " + ds.class_names[c] + " has too few samples");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    Matrix block(ds.dims(), n_train);
    for (int j = 0; j < n_train; ++j) block.col(j) = ds.features.col(idx[j]);
    out.train.push_back(std::move(block));
    for (int j = 0; j < n_test; ++j) {
      out.test.col(test_col++) = ds.features.col(idx[n_train + j]);
      out.test_labels.push_back(c);
    }
  }
  return out;
}

/// Adds zero-mean Gaussian noise of per-entry power power_factor * mean(x^2)
/// to `count` distinct randomly chosen columns.
inline Matrix corrupt_training(const Matrix& x, int count, double power_factor, std::uint64_t seed,
                               std::vector<Index>* chosen = nullptr) {
  if (count < 0 || count > x.cols()) throw DimensionError("corrupt_training: count outside [0, columns]");
  Matrix out = x;
  if (count == 0) return out;
  Rng rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(x.cols()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  const double sd = std::sqrt(power_factor * x.squaredNorm() / static_cast<double>(x.size()));
  for (Index c : idx)
    for (Index r = 0; r < x.rows(); ++r) out(r, c) += sd * rng.normal();
  if (chosen) *chosen = idx;
  return out;
}

enum class TrainMethod { Svd, Rpca, L1cSvd };

inline const char* to_string(TrainMethod m) {
  switch (m) {
    case TrainMethod::Svd: return "svd";
    case TrainMethod::Rpca: return "rpca";
    case TrainMethod::L1cSvd: return "l1csvd";
  }
  return "?";
}

inline TrainMethod parse_train_method(const std::string& s) {
  if (s == "svd") return TrainMethod::Svd;
  if (s == "rpca") return TrainMethod::Rpca;
  if (s == "l1csvd") return TrainMethod::L1cSvd;
  throw ContractViolation("unknown training method '" + s + "'");
}

struct ClassModel {
  int label = 0;
  Vector median;
  Matrix u;
  Vector sigma;
  Index n_train = 0;
};

/// Coordinate-wise median of the columns.
inline Vector column_median(const Matrix& x) {
  Vector m(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < x.cols(); ++c) row[c] = x(r, c);
    std::sort(row.begin(), row.end());
    const std::size_t mid = row.size() / 2;
    m(r) = row.size() % 2 ? row[mid] : 0.5 * (row[mid - 1] + row[mid]);
  }
  return m;
}

/// Median plus a rank-k decomposition of the (uncentered) class matrix.
inline ClassModel train_class(const Matrix& x_class, TrainMethod method, Index k, int label = 0,
                              std::uint64_t seed = 0) {
  if (x_class.cols() < k) throw DimensionError("train_class: fewer columns than components");
  ClassModel model;
  model.label = label;
  model.n_train = x_class.cols();
  model.median = column_median(x_class);
  switch (method) {
    case TrainMethod::Svd: {
      auto s = compact_svd(x_class, k);
      model.u = std::move(s.u);
      model.sigma = std::move(s.sigma);
      break;
    }
    case TrainMethod::Rpca: {
      auto s = rpca_svd(x_class, k);
      model.u = std::move(s.u);
      model.sigma = std::move(s.sigma);
      break;
    }
    case TrainMethod::L1cSvd: {
      L1cSvdOptions opts;
      opts.seed = seed;
      auto r = l1_csvd(x_class, k, opts);
      model.u = std::move(r.u);
      model.sigma = std::move(r.sigma);
      break;
    }
  }
  return model;
}

/// sqrt(sum_j (u_j^T (y - m) / (sigma_j / sqrt(n_train)))^2).
inline double mahalanobis(const Vector& y, const ClassModel& model) {
  if (y.size() != model.median.size() || model.u.rows() != y.size()) {
    throw DimensionError("mahalanobis: dimension mismatch");
  }
  if (model.sigma.size() == 0 || (model.sigma.array() <= 0.0).any()) {
    throw DegenerateInputError("mahalanobis: non-positive singular value");
  }
  const Vector proj = model.u.transpose() * (y - model.median);
  const double root_n = std::sqrt(static_cast<double>(model.n_train));
  return (proj.array() * root_n / model.sigma.array()).matrix().norm();
}

/// Label of the model with the smallest distance; ties go to the lowest label.
inline int classify(const Vector& y, const std::vector<ClassModel>& models) {
  if (models.empty()) throw ContractViolation("classify: no models");
  int best_label = std::numeric_limits<int>::max();
  double best = std::numeric_limits<double>::infinity();
  for (const ClassModel& m : models) {
    const double d = mahalanobis(y, m);
    if (d < best || (d == best && m.label < best_label)) {
      best = d;
      best_label = m.label;
    }
  }
  return best_label;
}

inline std::vector<ClassModel> train_all(const std::vector<Matrix>& blocks, TrainMethod method, Index k,
                                         std::uint64_t seed) {
  std::vector<ClassModel> models;
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    models.push_back(train_class(blocks[c], method, k, static_cast<int>(c), derive_seed(seed, c)));
  }
  return models;
}

inline double accuracy(const std::vector<ClassModel>& models, const Matrix& test, const std::vector<int>& labels) {
  if (labels.empty()) return 0.0;
  int hits = 0;
  for (Index j = 0; j < test.cols(); ++j) hits += classify(test.col(j), models) == labels[j];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

struct VowelConfig {
  int n_train = 75;
  int n_test = 15;
  int corrupt_count = 3;
  double power_factor = 25.0;
  /// Components per class; <= 0 means all D.
  Index components = 0;
  int trials = 200;
  std::uint64_t seed = 1;
};

struct AccuracyRecord {
  int trial = 0;
  TrainMethod method = TrainMethod::Svd;
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

/// Singular values of one class under each training route, for one
/// corruption realization.
struct SvProfile {
  int label = 0;
  Vector clean_svd;
  std::map<TrainMethod, Vector> corrupted;
};

struct VowelReport {
  VowelConfig config;
  std::vector<TrainMethod> methods;
  /// Ordered by trial, then method.
  std::vector<AccuracyRecord> records;
  /// Accuracy of each method trained on uncorrupted data.
  std::map<TrainMethod, double> clean_accuracy;
  std::vector<SvProfile> sv_profiles;

  [[nodiscard]] double mean_accuracy(TrainMethod m) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : records)
      if (r.method == m && r.error.empty()) {
        sum += r.accuracy;
        ++n;
      }
    return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
  }
};

inline std::uint64_t corruption_seed(std::uint64_t seed, int trial, int cls) {
  return derive_seed(derive_seed(derive_seed(seed, "corruption"), static_cast<std::uint64_t>(trial)),
                     static_cast<std::uint64_t>(cls));
}

/// Repeated corruption study. Each trial corrupts every class's training block
/// independently, trains one model set per method and scores the test split.
inline VowelReport run_vowel_experiment(const TrainTestSplit& split, const VowelConfig& cfg,
                                        const std::vector<TrainMethod>& methods, unsigned jobs = 1) {
  if (cfg.trials < 0) throw ContractViolation("vowel: trials must be >= 0");
  if (split.train.empty()) throw ContractViolation("vowel: no classes");
  const Index k = cfg.components > 0 ? cfg.components : split.train.front().rows();

  VowelReport report;
  report.config = cfg;
  report.methods = methods;
  const std::uint64_t solver_root = derive_seed(cfg.seed, "solver-init");
  for (TrainMethod m : methods) {
    report.clean_accuracy[m] =
        accuracy(train_all(split.train, m, k, derive_seed(solver_root, to_string(m))), split.test, split.test_labels);
  }
  if (std::find(methods.begin(), methods.end(), TrainMethod::Svd) == methods.end()) {
    report.clean_accuracy[TrainMethod::Svd] =
        accuracy(train_all(split.train, TrainMethod::Svd, k, 0), split.test, split.test_labels);
  }

  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  report.records.resize(n_trials * methods.size());
  parallel_for(n_trials, jobs, [&](std::size_t t) {
    std::vector<Matrix> corrupted;
    for (std::size_t c = 0; c < split.train.size(); ++c) {
      corrupted.push_back(corrupt_training(split.train[c], cfg.corrupt_count, cfg.power_factor,
                                           corruption_seed(cfg.seed, static_cast<int>(t), static_cast<int>(c))));
    }
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      AccuracyRecord& rec = report.records[t * methods.size() + mi];
      rec.trial = static_cast<int>(t);
      rec.method = methods[mi];
      try {
        const auto seed = derive_seed(derive_seed(solver_root, to_string(methods[mi])), t);
        rec.accuracy = accuracy(train_all(corrupted, methods[mi], k, seed), split.test, split.test_labels);
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
    }
  });

  if (cfg.trials > 0) {
    for (std::size_t c = 0; c < split.train.size(); ++c) {
      SvProfile p;
      p.label = static_cast<int>(c);
      p.clean_svd = compact_svd(split.train[c], k).sigma;
      const Matrix corrupted = corrupt_training(split.train[c], cfg.corrupt_count, cfg.power_factor,
                                                corruption_seed(cfg.seed, 0, static_cast<int>(c)));
      for (TrainMethod m : {TrainMethod::Svd, TrainMethod::Rpca, TrainMethod::L1cSvd}) {
        try {
          p.corrupted[m] = train_class(corrupted, m, k, p.label, derive_seed(solver_root, c)).sigma;
        } catch (const std::exception&) {
          p.corrupted[m] = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
        }
      }
      report.sv_profiles.push_back(std::move(p));
    }
  }
  return report;
}

}  // namespace l1csvd::vowel
