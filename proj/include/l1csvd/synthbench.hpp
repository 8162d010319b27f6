#pragma once

// Synthetic singular-value benchmark.
//
// Instances follow X = U0 diag(sigma0) V0^T + N + (Gamma o R_o S_o): a rank-K
// signal on a fixed subspace, Gaussian noise, and whole-column outliers drawn
// from a fixed K_o-dimensional subspace with per-column probability P_o.
// Noise and outliers are rescaled after drawing so that their energies hit
// the configured SNR / OSR exactly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "l1csvd/errors.hpp"
#include "l1csvd/l1csvd.hpp"
#include "l1csvd/l1pca.hpp"
#include "l1csvd/matrix_core.hpp"
#include "l1csvd/parallel.hpp"
#include "l1csvd/random.hpp"
#include "l1csvd/rpca.hpp"

namespace l1csvd::synth {

struct SyntheticConfig {
  Index d = 10;
  Index n = 50;
  Index k = 4;
  Index k_o = 4;
  double p_o = 0.04;
  /// Signal-to-noise power ratio in dB; +inf disables noise.
  double snr_db = 10.0;
  double osr_db = 0.0;
  double sv_log_low = 1.0;
  double sv_log_high = 10.0;
  int trials = 200;
  std::uint64_t seed = 1;
  /// Use noise/signal = 10^(snr_db/10) instead of the conventional inverse.
  bool snr_as_written = false;

  void validate() const {
    if (d < 1 || n < 1 || k < 1 || k_o < 1) throw DimensionError("synthetic config: dimensions must be positive");
    if (!(k <= d && d <= n)) throw DimensionError("synthetic config: need k <= d <= n");
    if (k_o > d) throw DimensionError("synthetic config: need k_o <= d");
    if (!(p_o >= 0.0 && p_o <= 1.0)) throw ContractViolation("synthetic config: p_o must lie in [0, 1]");
    if (!(sv_log_low > 0.0 && sv_log_low < sv_log_high)) {
      throw ContractViolation("synthetic config: need 0 < sv_log_low < sv_log_high");
    }
    if (trials < 0) throw ContractViolation("synthetic config: trials must be >= 0");
    if (std::isnan(snr_db) || !std::isfinite(osr_db)) throw ContractViolation("synthetic config: bad SNR/OSR");
  }
};

struct SyntheticInstance {
  Matrix x_clean;
  Matrix noise;
  Matrix outliers;
  Matrix x_corrupted;
  Matrix u0;
  Matrix v0;
  Vector sigma0;
  std::vector<std::uint8_t> gamma;  ///< 1 for corrupted columns
  Matrix r_o;
  Matrix s_o;

  [[nodiscard]] Index corrupted_columns() const {
    return std::count(gamma.begin(), gamma.end(), std::uint8_t{1});
  }
};

/// Subspaces that stay fixed for a whole experiment (depend on cfg.seed only).
inline Matrix experiment_signal_basis(const SyntheticConfig& cfg) {
  return random_orthonormal(cfg.d, cfg.k, derive_seed(cfg.seed, "signal-subspace"));
}
inline Matrix experiment_outlier_basis(const SyntheticConfig& cfg) {
  return random_orthonormal(cfg.d, cfg.k_o, derive_seed(cfg.seed, "outlier-subspace"));
}

/// Seed of trial `trial`. Independent of the OSR so that all points of a
/// sweep share signal, noise and outlier support (common random numbers).
inline std::uint64_t trial_seed(const SyntheticConfig& cfg, std::uint64_t trial) {
  return derive_seed(derive_seed(cfg.seed, "generation"), trial);
}

/// Noise power divided by signal power for the configured SNR.
inline double noise_to_signal(const SyntheticConfig& cfg) {
  if (std::isinf(cfg.snr_db)) return cfg.snr_db > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  const double ratio = std::pow(10.0, cfg.snr_db / 10.0);
  return cfg.snr_as_written ? ratio : 1.0 / ratio;
}

inline SyntheticInstance generate_instance(const SyntheticConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  SyntheticInstance inst;
  inst.u0 = experiment_signal_basis(cfg);
  inst.r_o = experiment_outlier_basis(cfg);
  inst.v0 = random_orthonormal(cfg.n, cfg.k, rng.engine()());

  inst.sigma0.resize(cfg.k);
  const double lo = std::log(cfg.sv_log_low);
  const double hi = std::log(cfg.sv_log_high);
  for (Index i = 0; i < cfg.k; ++i) inst.sigma0(i) = std::exp(rng.uniform(lo, hi));
  std::sort(inst.sigma0.begin(), inst.sigma0.end(), std::greater<>());
  inst.x_clean = inst.u0 * inst.sigma0.asDiagonal() * inst.v0.transpose();
  const double signal_energy = inst.sigma0.squaredNorm();

  // Every stream is drawn regardless of the configuration so that toggling
  // noise or outliers does not shift the others.
  inst.noise.resize(cfg.d, cfg.n);
  for (Index i = 0; i < inst.noise.size(); ++i) inst.noise(i) = rng.normal();
  inst.gamma.assign(static_cast<std::size_t>(cfg.n), 0);
  for (Index c = 0; c < cfg.n; ++c) inst.gamma[c] = rng.bernoulli(cfg.p_o) ? 1 : 0;
  inst.s_o.resize(cfg.k_o, cfg.n);
  for (Index i = 0; i < inst.s_o.size(); ++i) inst.s_o(i) = rng.normal();

  const double nsr = noise_to_signal(cfg);
  if (nsr == 0.0) {
    inst.noise.setZero();
  } else {
    inst.noise *= std::sqrt(nsr * signal_energy) / inst.noise.norm();
  }

  inst.outliers = inst.r_o * inst.s_o;
  for (Index c = 0; c < cfg.n; ++c) {
    if (!inst.gamma[c]) inst.outliers.col(c).setZero();
  }
  const double raw = inst.outliers.norm();
  if (raw > 0.0) {
    const double target = std::sqrt(std::pow(10.0, cfg.osr_db / 10.0) * signal_energy);
    const double scale = target / raw;
    inst.outliers *= scale;
    inst.s_o *= scale;
  }

  inst.x_corrupted = inst.x_clean + inst.noise + inst.outliers;
  return inst;
}

/// ||est - clean||_2 / ||clean||_2.
inline double r_sv(const Vector& sigma_est, const Vector& sigma_clean) {
  if (sigma_est.size() != sigma_clean.size()) throw DimensionError("r_sv: length mismatch");
  const double den = sigma_clean.norm();
  if (den == 0.0) throw DegenerateInputError("r_sv: clean singular values are zero");
  return (sigma_est - sigma_clean).norm() / den;
}

/// (est_i - clean_i)^2 / clean_i^2 for 1-based i.
inline double r_sv_i(const Vector& sigma_est, const Vector& sigma_clean, Index i) {
  if (sigma_est.size() != sigma_clean.size()) throw DimensionError("r_sv_i: length mismatch");
  if (i < 1 || i > sigma_clean.size()) throw DimensionError("r_sv_i: index out of range");
  const double c = sigma_clean(i - 1);
  if (c == 0.0) throw DegenerateInputError("r_sv_i: clean singular value is zero");
  const double diff = sigma_est(i - 1) - c;
  return diff * diff / (c * c);
}

enum class SvMethod { Svd, L1PcaProject, L1cSvd, Rpca };

inline const char* to_string(SvMethod m) {
  switch (m) {
    case SvMethod::Svd: return "svd";
    case SvMethod::L1PcaProject: return "l1pca";
    case SvMethod::L1cSvd: return "l1csvd";
    case SvMethod::Rpca: return "rpca";
  }
  return "?";
}

inline SvMethod parse_sv_method(const std::string& s) {
  if (s == "svd") return SvMethod::Svd;
  if (s == "l1pca" || s == "l1pca-project") return SvMethod::L1PcaProject;
  if (s == "l1csvd") return SvMethod::L1cSvd;
  if (s == "rpca") return SvMethod::Rpca;
  throw ContractViolation("unknown method '" + s + "'");
}

inline const std::vector<SvMethod>& all_sv_methods() {
  static const std::vector<SvMethod> all{SvMethod::Svd, SvMethod::L1PcaProject, SvMethod::L1cSvd,
                                         SvMethod::Rpca};
  return all;
}

/// Top-k singular values of x as estimated by `method`.
inline Vector estimate_sigma(SvMethod method, const Matrix& x, Index k, std::uint64_t seed) {
  switch (method) {
    case SvMethod::Svd: return compact_svd(x, k).sigma;
    case SvMethod::L1PcaProject: {
      const Matrix q = l1pca_greedy(x, k).q;
      return compact_svd(q * (q.transpose() * x), k).sigma;
    }
    case SvMethod::L1cSvd: {
      L1cSvdOptions opts;
      opts.seed = seed;
      return l1_csvd(x, k, opts).sigma;
    }
    case SvMethod::Rpca: return rpca_svd(x, k).sigma;
  }
  throw ContractViolation("estimate_sigma: unknown method");
}

struct TrialRecord {
  SvMethod method = SvMethod::Svd;
  double osr_db = 0.0;
  int trial = 0;
  double r_sv = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> r_sv_i;
  double wall_ms = 0.0;
  std::string error;  ///< empty on success

  [[nodiscard]] bool ok() const { return error.empty(); }
};

struct Summary {
  int count = 0;
  int failures = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  std::vector<double> mean_r_sv_i;
};

struct ExperimentReport {
  SyntheticConfig config;
  std::vector<double> osr_grid;
  std::vector<SvMethod> methods;
  /// Ordered by method, then OSR grid position, then trial.
  std::vector<TrialRecord> records;
  /// aggregates[method index][osr index]
  std::vector<std::vector<Summary>> aggregates;

  [[nodiscard]] const Summary& summary(SvMethod m, std::size_t osr_index) const {
    const auto it = std::find(methods.begin(), methods.end(), m);
    if (it == methods.end()) throw ContractViolation("report: method not in sweep");
    return aggregates[static_cast<std::size_t>(it - methods.begin())].at(osr_index);
  }
};

inline Summary summarize(const std::vector<const TrialRecord*>& rows, Index k) {
  Summary s;
  s.mean_r_sv_i.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<double> values;
  for (const TrialRecord* r : rows) {
    if (!r->ok()) {
      ++s.failures;
      continue;
    }
    values.push_back(r->r_sv);
    for (std::size_t i = 0; i < s.mean_r_sv_i.size(); ++i) s.mean_r_sv_i[i] += r->r_sv_i[i];
  }
  s.count = static_cast<int>(values.size());
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.median = s.std = nan;
    std::fill(s.mean_r_sv_i.begin(), s.mean_r_sv_i.end(), nan);
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  for (double& m : s.mean_r_sv_i) m /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

/// Monte-Carlo sweep over an OSR grid. Each (OSR, trial) cell generates one
/// instance and evaluates every method on it; a failing method is recorded
/// with its error message and the sweep continues.
inline ExperimentReport run_sweep(const SyntheticConfig& cfg, const std::vector<double>& osr_grid,
                                  const std::vector<SvMethod>& methods, unsigned jobs = 1) {
  cfg.validate();
  if (osr_grid.empty() || methods.empty()) throw ContractViolation("run_sweep: empty OSR grid or method list");

  ExperimentReport report;
  report.config = cfg;
  report.osr_grid = osr_grid;
  report.methods = methods;
  const std::size_t n_methods = methods.size();
  const std::size_t n_osr = osr_grid.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  report.records.resize(n_methods * n_osr * n_trials);

  const std::uint64_t solver_root = derive_seed(cfg.seed, "solver-init");
  parallel_for(n_osr * n_trials, jobs, [&](std::size_t cell) {
    const std::size_t oi = cell / n_trials;
    const std::size_t t = cell % n_trials;
    SyntheticConfig point = cfg;
    point.osr_db = osr_grid[oi];
    const SyntheticInstance inst = generate_instance(point, trial_seed(cfg, t));
    const Vector clean = compact_svd(inst.x_clean, cfg.k).sigma;

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      TrialRecord& rec = report.records[(mi * n_osr + oi) * n_trials + t];
      rec.method = methods[mi];
      rec.osr_db = point.osr_db;
      rec.trial = static_cast<int>(t);
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::uint64_t seed = derive_seed(derive_seed(solver_root, to_string(methods[mi])), t);
        const Vector est = estimate_sigma(methods[mi], inst.x_corrupted, cfg.k, seed);
        rec.r_sv = r_sv(est, clean);
        rec.r_sv_i.resize(static_cast<std::size_t>(cfg.k));
        for (Index i = 1; i <= cfg.k; ++i) rec.r_sv_i[i - 1] = r_sv_i(est, clean, i);
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.r_sv = std::numeric_limits<double>::quiet_NaN();
        rec.r_sv_i.assign(static_cast<std::size_t>(cfg.k), std::numeric_limits<double>::quiet_NaN());
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });

  report.aggregates.assign(n_methods, std::vector<Summary>(n_osr));
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    for (std::size_t oi = 0; oi < n_osr; ++oi) {
      std::vector<const TrialRecord*> rows;
      for (std::size_t t = 0; t < n_trials; ++t) rows.push_back(&report.records[(mi * n_osr + oi) * n_trials + t]);
      report.aggregates[mi][oi] = summarize(rows, cfg.k);
    }
  }
  return report;
}

}  // namespace l1csvd::synth
