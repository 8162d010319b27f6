#pragma once

// Direction-of-arrival estimation on a half-wavelength uniform linear array.
// Snapshots are realified, reduced to K columns (U_K Sigma_K) by SVD or
// L1-cSVD, and a group-sparse spatial spectrum is recovered with a monotone
// accelerated proximal gradient solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "l1csvd/errors.hpp"
#include "l1csvd/l1csvd.hpp"
#include "l1csvd/matrix_core.hpp"
#include "l1csvd/random.hpp"

namespace l1csvd::doa {

using Complex = std::complex<double>;

/// Integer-degree grid lo, lo+step, ..., excluding hi.
inline std::vector<double> angle_grid(double lo = -90.0, double hi = 90.0, double step = 1.0) {
  std::vector<double> g;
  for (double a = lo; a < hi - 1e-9; a += step) g.push_back(a);
  return g;
}

struct ArrayConfig {
  Index m_sensors = 8;
  Index t_snapshots = 200;
  std::vector<double> grid_deg = angle_grid();
  /// Per-source SNR in dB; +inf disables noise.
  double snr_db = 10.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (m_sensors < 1 || t_snapshots < 1) throw DimensionError("array config: sizes must be positive");
    if (grid_deg.empty()) throw ContractViolation("array config: empty grid");
    for (std::size_t i = 0; i < grid_deg.size(); ++i) {
      if (grid_deg[i] < -90.0 || grid_deg[i] > 90.0) throw ContractViolation("array config: grid outside [-90, 90]");
      if (i && !(grid_deg[i] > grid_deg[i - 1])) throw ContractViolation("array config: grid not increasing");
    }
  }
};

struct JammerSpec {
  double doa_deg = 0.0;
  Index corrupted_snapshots = 10;
  /// Jammer power relative to the unit power of one source.
  double power_factor = 20.0;
};

struct SpatialSpectrum {
  std::vector<double> angles;
  std::vector<double> power;
};

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

/// a_m(theta) = exp(-j m pi sin(theta)), m = 0..M-1.
inline Eigen::VectorXcd steering(Index m_sensors, double theta_deg) {
  Eigen::VectorXcd a(m_sensors);
  const double phase = std::numbers::pi * std::sin(deg2rad(theta_deg));
  for (Index m = 0; m < m_sensors; ++m) a(m) = std::polar(1.0, -static_cast<double>(m) * phase);
  return a;
}

inline ComplexMatrix manifold(const ArrayConfig& cfg) {
  cfg.validate();
  ComplexMatrix a(cfg.m_sensors, static_cast<Index>(cfg.grid_deg.size()));
  for (std::size_t k = 0; k < cfg.grid_deg.size(); ++k) a.col(static_cast<Index>(k)) = steering(cfg.m_sensors, cfg.grid_deg[k]);
  return a;
}

/// Real dictionary for complex coefficients: [[Re A, -Im A], [Im A, Re A]].
/// realify(A s) = D [Re s; Im s], so column k and k + N_theta belong to the
/// same angle.
inline Matrix realified_dictionary(const ComplexMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix d(2 * m, 2 * n);
  d.topLeftCorner(m, n) = a.real();
  d.topRightCorner(m, n) = -a.imag();
  d.bottomLeftCorner(m, n) = a.imag();
  d.bottomRightCorner(m, n) = a.real();
  return d;
}

struct ReceivedSignal {
  ComplexMatrix y;         ///< total received data, M x T
  ComplexMatrix signal;    ///< A S part
  ComplexMatrix noise;
  ComplexMatrix jamming;
  std::vector<std::vector<Index>> jammed_snapshots;  ///< per jammer
};

inline Complex complex_normal(Rng& rng, double power) {
  const double s = std::sqrt(power / 2.0);
  const double re = rng.normal();
  const double im = rng.normal();
  return {s * re, s * im};
}

/// Y = A S + N (+ jammers). Sources have unit-power circular Gaussian
/// amplitudes; noise power per sensor is 10^(-snr/10). Each jammer hits
/// `corrupted_snapshots` distinct snapshots chosen at random. Source, noise
/// and jammer draws use separate substreams of cfg.seed, so the jammer-free
/// scene is the same realization with the jamming term removed.
inline ReceivedSignal simulate_received(const ArrayConfig& cfg, const std::vector<double>& source_doas,
                                        const std::vector<JammerSpec>& jammers) {
  cfg.validate();
  const Index m = cfg.m_sensors;
  const Index t = cfg.t_snapshots;
  for (double d : source_doas)
    if (d < -90.0 || d > 90.0) throw ContractViolation("simulate_received: source DOA outside [-90, 90]");

  ReceivedSignal out;
  out.signal = ComplexMatrix::Zero(m, t);
  out.noise = ComplexMatrix::Zero(m, t);
  out.jamming = ComplexMatrix::Zero(m, t);

  Rng src(derive_seed(cfg.seed, "sources"));
  for (double d : source_doas) {
    const Eigen::VectorXcd a = steering(m, d);
    for (Index s = 0; s < t; ++s) out.signal.col(s) += a * complex_normal(src, 1.0);
  }

  if (!std::isinf(cfg.snr_db)) {
    Rng noise(derive_seed(cfg.seed, "noise"));
    const double power = std::pow(10.0, -cfg.snr_db / 10.0);
    for (Index s = 0; s < t; ++s)
      for (Index r = 0; r < m; ++r) out.noise(r, s) = complex_normal(noise, power);
  }

  Rng jam(derive_seed(cfg.seed, "jammers"));
  for (const JammerSpec& j : jammers) {
    if (j.corrupted_snapshots < 0 || j.corrupted_snapshots > t) {
      throw DimensionError("simulate_received: jammer snapshot count outside [0, T]");
    }
    std::vector<Index> idx(static_cast<std::size_t>(t));
    for (Index s = 0; s < t; ++s) idx[s] = s;
    std::shuffle(idx.begin(), idx.end(), jam.engine());
    idx.resize(static_cast<std::size_t>(j.corrupted_snapshots));
    std::sort(idx.begin(), idx.end());
    const Eigen::VectorXcd a = steering(m, j.doa_deg);
    for (Index s : idx) out.jamming.col(s) += a * complex_normal(jam, j.power_factor);
    out.jammed_snapshots.push_back(std::move(idx));
  }

  out.y = out.signal + out.noise + out.jamming;
  return out;
}

enum class Reduction { Svd, L1cSvd };

inline const char* to_string(Reduction r) { return r == Reduction::Svd ? "svd" : "l1csvd"; }

/// U_K Sigma_K of the chosen decomposition of realified data (2M x T -> 2M x K).
inline Matrix reduce(const Matrix& y_real, Index k, Reduction method, std::uint64_t seed = 0) {
  if (k < 1 || k > y_real.rows()) throw DimensionError("reduce: k outside [1, 2M]");
  if (method == Reduction::Svd) {
    const CompactSvd s = compact_svd(y_real, k);
    return s.u * s.sigma.asDiagonal();
  }
  L1cSvdOptions opts;
  opts.seed = seed;
  const L1cSvdResult r = l1_csvd(y_real, k, opts);
  return r.u * r.sigma.asDiagonal();
}

struct GroupLassoOptions {
  /// Explicit lambda; otherwise lambda_fraction * lambda_max.
  std::optional<double> lambda;
  double lambda_fraction = 0.3;
  int max_iter = 5000;
  double tol = 1e-8;
};

struct SpectrumResult {
  SpatialSpectrum spectrum;
  Matrix solution;  ///< dictionary-column x K coefficients
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};

namespace detail {

/// Groups are angle k -> dictionary columns {k, k + n_angles, ...}.
inline Index group_width(const Matrix& dict, std::size_t n_angles) {
  if (n_angles == 0 || dict.cols() % static_cast<Index>(n_angles) != 0) {
    throw DimensionError("group_sparse_spectrum: dictionary columns must be a multiple of the angle count");
  }
  return dict.cols() / static_cast<Index>(n_angles);
}

inline Vector group_norms(const Matrix& s, Index n_angles, Index width) {
  Vector g = Vector::Zero(n_angles);
  for (Index w = 0; w < width; ++w) g += s.middleRows(w * n_angles, n_angles).rowwise().squaredNorm();
  return g.cwiseSqrt();
}

inline void group_shrink(Matrix& s, Index n_angles, Index width, double tau) {
  const Vector norms = group_norms(s, n_angles, width);
  for (Index k = 0; k < n_angles; ++k) {
    const double scale = norms(k) > tau ? 1.0 - tau / norms(k) : 0.0;
    for (Index w = 0; w < width; ++w) s.row(w * n_angles + k) *= scale;
  }
}

}  // namespace detail

/// Smallest lambda for which the all-zero solution is optimal.
inline double group_lambda_max(const Matrix& y_sv, const Matrix& dict, std::size_t n_angles) {
  const Index width = detail::group_width(dict, n_angles);
  return detail::group_norms(dict.transpose() * y_sv, static_cast<Index>(n_angles), width).maxCoeff();
}

/// min_S 1/2 ||Y - D S||_F^2 + lambda * sum_k ||S_group(k)||_F by monotone
/// FISTA with step 1/||D||_2^2. The spectrum is the per-angle group norm of
/// the solution, normalized to a peak of 1.
inline SpectrumResult group_sparse_spectrum(const Matrix& y_sv, const Matrix& dict,
                                            const std::vector<double>& angles,
                                            const GroupLassoOptions& opts = {}) {
  if (dict.rows() != y_sv.rows()) throw DimensionError("group_sparse_spectrum: row mismatch");
  const Index n_angles = static_cast<Index>(angles.size());
  const Index width = detail::group_width(dict, angles.size());

  SpectrumResult res;
  res.lambda = opts.lambda.value_or(opts.lambda_fraction * group_lambda_max(y_sv, dict, angles.size()));
  if (!(res.lambda > 0.0)) throw ContractViolation("group_sparse_spectrum: lambda must be positive");

  const double lip = std::pow(spectral_norm(dict), 2);
  const double step = 1.0 / lip;
  const Matrix gram = dict.transpose() * dict;
  const Matrix dty = dict.transpose() * y_sv;
  const double yy = y_sv.squaredNorm();

  auto objective = [&](const Matrix& s) {
    // 1/2 ||Y - D S||^2 expanded with the cached Gram matrix.
    const double fit = 0.5 * (yy - 2.0 * (dty.array() * s.array()).sum() + (s.array() * (gram * s).array()).sum());
    return std::max(fit, 0.0) + res.lambda * detail::group_norms(s, n_angles, width).sum();
  };

  Matrix s = Matrix::Zero(dict.cols(), y_sv.cols());
  Matrix z = s;
  double t = 1.0;
  double f = objective(s);
  res.objective_trace.push_back(f);

  for (int it = 0; it < opts.max_iter; ++it) {
    Matrix cand = z - step * (gram * z - dty);
    detail::group_shrink(cand, n_angles, width, res.lambda * step);
    const double f_cand = objective(cand);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    ++res.iterations;
    if (f_cand <= f) {
      const double rel = (f - f_cand) / std::max(f, 1e-300);
      Matrix prev = s;
      s = cand;
      z = s + ((t - 1.0) / t_next) * (s - prev);
      f = f_cand;
      t = t_next;
      res.objective_trace.push_back(f);
      if (rel < opts.tol) {
        res.converged = true;
        break;
      }
    } else {
      // Rejected step: keep s, extrapolate towards the candidate.
      z = s + (t / t_next) * (cand - s);
      t = t_next;
      res.objective_trace.push_back(f);
    }
  }

  res.solution = s;
  res.spectrum.angles = angles;
  const Vector g = detail::group_norms(s, n_angles, width);
  const double peak = g.maxCoeff();
  res.spectrum.power.resize(angles.size());
  for (Index k = 0; k < n_angles; ++k) res.spectrum.power[k] = peak > 0.0 ? g(k) / peak : 0.0;
  return res;
}

/// Angles of the `count` largest local maxima (plateaus count once).
inline std::vector<double> spectrum_peaks(const SpatialSpectrum& sp, std::size_t count) {
  std::vector<std::pair<double, double>> peaks;
  const std::size_t n = sp.power.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = sp.power[i];
    if (p <= 0.0) continue;
    const bool left = i == 0 || p > sp.power[i - 1];
    const bool right = i + 1 == n || p >= sp.power[i + 1];
    if (left && right) peaks.emplace_back(p, sp.angles[i]);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> out;
  for (std::size_t i = 0; i < std::min(count, peaks.size()); ++i) out.push_back(peaks[i].second);
  return out;
}

/// Spectrum value at the grid point nearest to `deg`.
inline double power_at(const SpatialSpectrum& sp, double deg) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sp.angles.size(); ++i)
    if (std::abs(sp.angles[i] - deg) < std::abs(sp.angles[best] - deg)) best = i;
  return sp.power.at(best);
}

struct DoaScenario {
  ArrayConfig array;
  std::vector<double> sources{-45.0, 0.0, 60.0};
  std::vector<JammerSpec> jammers{{-30.0, 10, 20.0}, {30.0, 10, 20.0}, {50.0, 10, 20.0}};
  Index k = 3;
  GroupLassoOptions solver;
};

struct DoaReport {
  std::vector<double> angles;
  SpectrumResult no_jam;   ///< jammer-free data, SVD reduction
  SpectrumResult svd;      ///< jammed data, SVD reduction
  SpectrumResult l1csvd;   ///< jammed data, L1-cSVD reduction
};

/// The three spectra: clean scene with SVD reduction, and the jammed scene
/// with SVD and with L1-cSVD reduction.
inline DoaReport run_doa(const DoaScenario& sc) {
  const ComplexMatrix a = manifold(sc.array);
  const Matrix dict = realified_dictionary(a);
  const ReceivedSignal rx = simulate_received(sc.array, sc.sources, sc.jammers);
  const Matrix clean = realify(rx.signal + rx.noise);
  const Matrix jammed = realify(rx.y);
  const std::uint64_t solver_seed = derive_seed(sc.array.seed, "solver-init");

  DoaReport rep;
  rep.angles = sc.array.grid_deg;
  rep.no_jam = group_sparse_spectrum(reduce(clean, sc.k, Reduction::Svd), dict, rep.angles, sc.solver);
  rep.svd = group_sparse_spectrum(reduce(jammed, sc.k, Reduction::Svd), dict, rep.angles, sc.solver);
  rep.l1csvd = group_sparse_spectrum(reduce(jammed, sc.k, Reduction::L1cSvd, solver_seed), dict, rep.angles, sc.solver);
  return rep;
}

}  // namespace l1csvd::doa
