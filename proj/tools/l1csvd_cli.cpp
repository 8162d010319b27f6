// l1csvd: batch front end for decomposition and the experiment drivers.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "l1csvd/classifier.hpp"
#include "l1csvd/csv.hpp"
#include "l1csvd/doa.hpp"
#include "l1csvd/l1csvd.hpp"
#include "l1csvd/rpca.hpp"
#include "l1csvd/synthbench.hpp"
#include "run_config.hpp"

#ifndef L1CSVD_DEFAULT_VOWEL
#define L1CSVD_DEFAULT_VOWEL "data/vowel.tsv"
#endif

namespace fs = std::filesystem;
using namespace l1csvd;
using cli::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;

/// Options of one subcommand, with a record of how to echo each bound value.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* opt(const std::string& name, T& var, const std::string& help) {
    echo_.emplace_back(name, [&var] { return cli::echo_value(var); });
    return app_->add_option("--" + name, var, help)->capture_default_str();
  }

  template <class T>
  CLI::Option* list(const std::string& name, std::vector<T>& var, const std::string& help) {
    return opt(name, var, help)->delimiter(',');
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    echo_.emplace_back(name, [&var] { return Json(var); });
    flags_.push_back(name);
    return app_->add_flag("--" + name, var, help);
  }

  [[nodiscard]] Json echo() const {
    Json j = Json::object();
    for (const auto& [name, fn] : echo_) j[name] = fn();
    return j;
  }

  [[nodiscard]] const std::vector<std::string>& flags() const { return flags_; }
  [[nodiscard]] CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<Json()>>> echo_;
  std::vector<std::string> flags_;
};

struct Common {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out_dir = ".";
  std::string config;
  bool timing = false;
};

void add_common(Params& p, Common& c) {
  p.opt("seed", c.seed, "Master seed");
  p.opt("jobs", c.jobs, "Worker threads for trial-level parallelism")->check(CLI::Range(1u, 256u));
  p.opt("out-dir", c.out_dir, "Output directory");
  p.flag("timing", c.timing, "Record wall-clock times (outputs are then not byte-stable)");
  p.app()->add_option("--config", c.config, "Config file (key = value lines or JSON manifest)");
}

std::string join_path(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

void write_manifest(const std::string& path, const std::string& command, const Params& p, Json results,
                    const std::vector<std::string>& outputs, double wall_ms) {
  Json m = Json::object();
  m["schema"] = 1;
  m["command"] = command;
  m["config"] = p.echo();
  m["outputs"] = outputs;
  m["results"] = std::move(results);
  m["wall_ms"] = cli::echo_value(wall_ms);
  auto out = open_out(path);
  out << m.dump(2) << '\n';
  finish(out, path);
}

double elapsed_ms(std::chrono::steady_clock::time_point start, bool timing) {
  if (!timing) return 0.0;
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string input;
  Index k = 1;
  std::string method = "l1csvd";
  std::string solver = "greedy";
  int max_iter = 500;
  double tol = 1e-9;
  std::string prefix = "decompose";
};

int run_decompose(const DecomposeArgs& a, const Common& c, const Params& p) {
  const auto start = std::chrono::steady_clock::now();
  const Matrix x = read_matrix_csv(a.input);
  Json results = Json::object();
  results["rows"] = x.rows();
  results["cols"] = x.cols();
  Matrix u, v;
  Vector sigma;
  if (a.method == "svd") {
    const CompactSvd s = compact_svd(x, a.k);
    u = s.u;
    sigma = s.sigma;
    v = s.v;
  } else if (a.method == "l1csvd") {
    L1cSvdOptions opts;
    opts.pca_solver = parse_l1pca_solver(a.solver);
    opts.max_outer_iter = a.max_iter;
    opts.tol = a.tol;
    opts.seed = derive_seed(c.seed, "solver-init");
    const L1cSvdResult r = l1_csvd(x, a.k, opts);
    u = r.u;
    sigma = r.sigma;
    v = r.v;
    results["mp"] = cli::echo_value(r.final_mp());
    results["mp_trace"] = cli::echo_value(r.mp_trace);
    results["iterations"] = r.iterations;
    results["converged"] = r.converged;
    results["l1pca_metric"] = cli::echo_value(r.l1pca_metric);
    results["descent_violations"] = r.descent_violations;
  } else if (a.method == "rpca") {
    RpcaOptions opts;
    opts.max_iter = a.max_iter;
    const RpcaResult r = rpca_pcp(x, opts);
    const CompactSvd s = compact_svd(r.l, a.k);
    u = s.u;
    sigma = s.sigma;
    v = s.v;
    results["lambda"] = cli::echo_value(r.lambda);
    results["iterations"] = r.iterations;
    results["converged"] = r.converged;
    results["low_rank"] = r.rank;
  } else {
    throw ContractViolation("unknown method '" + a.method + "' (expected svd, l1csvd or rpca)");
  }
  results["sigma"] = cli::echo_value(std::vector<double>(sigma.data(), sigma.data() + sigma.size()));

  fs::create_directories(c.out_dir);
  const std::vector<std::string> names{a.prefix + "_u.csv", a.prefix + "_sigma.csv", a.prefix + "_v.csv"};
  write_matrix_csv(join_path(c.out_dir, names[0]), u);
  write_matrix_csv(join_path(c.out_dir, names[1]), Matrix(sigma));
  write_matrix_csv(join_path(c.out_dir, names[2]), v);
  write_manifest(join_path(c.out_dir, a.prefix + "_manifest.json"), "decompose", p, results, names,
                 elapsed_ms(start, c.timing));
  return kExitOk;
}

// ----------------------------------------------------------------- bench-sv

struct BenchArgs {
  Index d = 10, n = 50, k = 4, k_o = 4;
  double p_o = 0.04;
  double snr_db = 10.0;
  double sv_log_low = 1.0, sv_log_high = 10.0;
  int trials = 200;
  std::vector<double> osr_grid{-10, -5, 0, 5, 10, 15};
  std::vector<std::string> methods{"svd", "l1pca", "l1csvd", "rpca"};
  bool snr_as_written = false;
};

int run_bench(const BenchArgs& a, const Common& c, const Params& p) {
  const auto start = std::chrono::steady_clock::now();
  synth::SyntheticConfig cfg;
  cfg.d = a.d;
  cfg.n = a.n;
  cfg.k = a.k;
  cfg.k_o = a.k_o;
  cfg.p_o = a.p_o;
  cfg.snr_db = a.snr_db;
  cfg.sv_log_low = a.sv_log_low;
  cfg.sv_log_high = a.sv_log_high;
  cfg.trials = a.trials;
  cfg.seed = c.seed;
  cfg.snr_as_written = a.snr_as_written;
  std::vector<synth::SvMethod> methods;
  for (const auto& m : a.methods) methods.push_back(synth::parse_sv_method(m));

  const synth::ExperimentReport rep = synth::run_sweep(cfg, a.osr_grid, methods, c.jobs);

  fs::create_directories(c.out_dir);
  const std::string trials_path = join_path(c.out_dir, "bench_sv.csv");
  auto out = open_out(trials_path);
  out << "# schema=1\nmethod,osr_db,trial,r_sv";
  for (Index i = 1; i <= cfg.k; ++i) out << ",r_sv_" << i;
  out << ",wall_ms,error\n";
  int failures = 0;
  for (const auto& r : rep.records) {
    failures += !r.ok();
    out << synth::to_string(r.method) << ',' << fmt(r.osr_db) << ',' << r.trial << ',' << fmt(r.r_sv);
    for (double e : r.r_sv_i) out << ',' << fmt(e);
    out << ',' << fmt(c.timing ? r.wall_ms : 0.0) << ',';
    if (!r.ok()) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << msg;
      std::cerr << "trial failure: " << synth::to_string(r.method) << " osr=" << fmt(r.osr_db)
                << " trial=" << r.trial << ": " << r.error << '\n';
    }
    out << '\n';
  }
  finish(out, trials_path);

  const std::string summary_path = join_path(c.out_dir, "bench_sv_summary.csv");
  auto sum = open_out(summary_path);
  sum << "# schema=1\nmethod,osr_db,count,failures,mean,median,std";
  for (Index i = 1; i <= cfg.k; ++i) sum << ",mean_r_sv_" << i;
  sum << '\n';
  Json agg = Json::array();
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t oi = 0; oi < a.osr_grid.size(); ++oi) {
      const synth::Summary& s = rep.aggregates[mi][oi];
      sum << synth::to_string(methods[mi]) << ',' << fmt(a.osr_grid[oi]) << ',' << s.count << ',' << s.failures
          << ',' << fmt(s.mean) << ',' << fmt(s.median) << ',' << fmt(s.std);
      for (double e : s.mean_r_sv_i) sum << ',' << fmt(e);
      sum << '\n';
      agg.push_back({{"method", synth::to_string(methods[mi])},
                     {"osr_db", cli::echo_value(a.osr_grid[oi])},
                     {"count", s.count},
                     {"failures", s.failures},
                     {"mean_r_sv", cli::echo_value(s.mean)}});
    }
  }
  finish(sum, summary_path);

  Json results = {{"records", rep.records.size()}, {"failures", failures}, {"summary", agg}};
  write_manifest(join_path(c.out_dir, "bench_sv_manifest.json"), "bench-sv", p, results,
                 {"bench_sv.csv", "bench_sv_summary.csv"}, elapsed_ms(start, c.timing));
  const bool total_failure = !rep.records.empty() && failures == static_cast<int>(rep.records.size());
  if (total_failure) std::cerr << "error: every trial failed\n";
  return total_failure ? kExitFailure : kExitOk;
}

// -------------------------------------------------------------- convergence

struct ConvergenceArgs {
  Index d = 8, n = 50, k = 5;
  int inits = 4;
  int max_iter = 500;
  double tol = 1e-9;
};

int run_convergence(const ConvergenceArgs& a, const Common& c, const Params& p) {
  const auto start = std::chrono::steady_clock::now();
  if (a.d < 1 || a.n < 1 || a.k < 1 || a.k > std::min(a.d, a.n)) {
    throw DimensionError("convergence: need 1 <= k <= min(d, n)");
  }
  if (a.inits < 0) throw ContractViolation("convergence: inits must be >= 0");
  Rng rng(derive_seed(c.seed, "data"));
  Matrix x(a.d, a.n);
  for (Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  L1PcaOptions pca;
  const Matrix u = l1pca(x, a.k, L1PcaSolver::Greedy, pca).q;

  fs::create_directories(c.out_dir);
  const std::string path = join_path(c.out_dir, "convergence.csv");
  auto out = open_out(path);
  out << "# schema=1\ninit,iteration,mp\n";
  Json runs = Json::array();
  int failures = 0;
  const std::uint64_t init_root = derive_seed(c.seed, "v-init");
  for (int i = 0; i < a.inits; ++i) {
    L1cSvdOptions opts;
    opts.max_outer_iter = a.max_iter;
    opts.tol = a.tol;
    opts.v_init = random_orthonormal(a.n, a.k, derive_seed(init_root, static_cast<std::uint64_t>(i)));
    try {
      const L1cSvdResult r = l1_csvd_from_basis(x, u, opts);
      for (std::size_t t = 0; t < r.mp_trace.size(); ++t) out << i << ',' << t + 1 << ',' << fmt(r.mp_trace[t]) << '\n';
      runs.push_back({{"init", i},
                      {"final_mp", cli::echo_value(r.final_mp())},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"descent_violations", r.descent_violations}});
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "init " << i << " failed: " << e.what() << '\n';
      runs.push_back({{"init", i}, {"error", e.what()}});
    }
  }
  finish(out, path);
  write_manifest(join_path(c.out_dir, "convergence_manifest.json"), "convergence", p, {{"runs", runs}},
                 {"convergence.csv"}, elapsed_ms(start, c.timing));
  return a.inits > 0 && failures == a.inits ? kExitFailure : kExitOk;
}

// -------------------------------------------------------------------- vowel

struct VowelArgs {
  std::string dataset = L1CSVD_DEFAULT_VOWEL;
  int n_train = 75, n_test = 15, corrupt_count = 3;
  double power_factor = 25.0;
  Index components = 0;
  int trials = 200;
  std::vector<std::string> methods{"svd", "rpca", "l1csvd"};
};

int run_vowel(const VowelArgs& a, const Common& c, const Params& p) {
  const auto start = std::chrono::steady_clock::now();
  const vowel::LabeledDataset ds = vowel::load_pmlb_vowel(a.dataset);
  const vowel::TrainTestSplit split = vowel::split_dataset(ds, a.n_train, a.n_test, derive_seed(c.seed, "split"));
  vowel::VowelConfig cfg;
  cfg.n_train = a.n_train;
  cfg.n_test = a.n_test;
  cfg.corrupt_count = a.corrupt_count;
  cfg.power_factor = a.power_factor;
  cfg.components = a.components;
  cfg.trials = a.trials;
  cfg.seed = c.seed;
  std::vector<vowel::TrainMethod> methods;
  for (const auto& m : a.methods) methods.push_back(vowel::parse_train_method(m));
  const vowel::VowelReport rep = vowel::run_vowel_experiment(split, cfg, methods, c.jobs);

  fs::create_directories(c.out_dir);
  const std::string acc_path = join_path(c.out_dir, "vowel.csv");
  auto out = open_out(acc_path);
  out << "# schema=1\ntrial,method,accuracy\n";
  int failures = 0;
  for (const auto& r : rep.records) {
    out << r.trial << ',' << vowel::to_string(r.method) << ',' << fmt(r.accuracy) << '\n';
    if (!r.error.empty()) {
      ++failures;
      std::cerr << "trial failure: " << vowel::to_string(r.method) << " trial=" << r.trial << ": " << r.error << '\n';
    }
  }
  finish(out, acc_path);

  const std::string sv_path = join_path(c.out_dir, "vowel_sv.csv");
  auto sv = open_out(sv_path);
  sv << "# schema=1\nclass,index,clean_svd,svd,rpca,l1csvd\n";
  for (const auto& prof : rep.sv_profiles) {
    for (Index i = 0; i < prof.clean_svd.size(); ++i) {
      sv << ds.class_names.at(static_cast<std::size_t>(prof.label)) << ',' << i + 1 << ',' << fmt(prof.clean_svd[i]);
      for (auto m : {vowel::TrainMethod::Svd, vowel::TrainMethod::Rpca, vowel::TrainMethod::L1cSvd}) {
        sv << ',' << fmt(prof.corrupted.at(m)[i]);
      }
      sv << '\n';
    }
  }
  finish(sv, sv_path);

  Json clean = Json::object(), mean = Json::object();
  for (const auto& [m, acc] : rep.clean_accuracy) clean[vowel::to_string(m)] = cli::echo_value(acc);
  for (auto m : methods) mean[vowel::to_string(m)] = cli::echo_value(rep.mean_accuracy(m));
  Json results = {{"samples", ds.features.cols()},
                  {"features", ds.features.rows()},
                  {"classes", ds.class_names.size()},
                  {"clean_accuracy", clean},
                  {"mean_corrupted_accuracy", mean},
                  {"failures", failures}};
  write_manifest(join_path(c.out_dir, "vowel_manifest.json"), "vowel", p, results, {"vowel.csv", "vowel_sv.csv"},
                 elapsed_ms(start, c.timing));
  const bool total_failure = !rep.records.empty() && failures == static_cast<int>(rep.records.size());
  return total_failure ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------- doa

struct DoaArgs {
  Index sensors = 8, snapshots = 200;
  double snr_db = 10.0;
  std::vector<double> sources{-45.0, 0.0, 60.0};
  std::vector<double> jammers{-30.0, 30.0, 50.0};
  Index jam_snapshots = 10;
  double jam_power = 20.0;
  Index k = 3;
  double lambda_fraction = 0.3;
  int max_iter = 5000;
  double tol = 1e-8;
};

int run_doa_cmd(const DoaArgs& a, const Common& c, const Params& p) {
  const auto start = std::chrono::steady_clock::now();
  doa::DoaScenario sc;
  sc.array.m_sensors = a.sensors;
  sc.array.t_snapshots = a.snapshots;
  sc.array.snr_db = a.snr_db;
  sc.array.seed = c.seed;
  sc.sources = a.sources;
  sc.jammers.clear();
  for (double j : a.jammers) sc.jammers.push_back({j, a.jam_snapshots, a.jam_power});
  sc.k = a.k;
  sc.solver.lambda_fraction = a.lambda_fraction;
  sc.solver.max_iter = a.max_iter;
  sc.solver.tol = a.tol;
  const doa::DoaReport rep = doa::run_doa(sc);

  fs::create_directories(c.out_dir);
  const std::string path = join_path(c.out_dir, "doa.csv");
  auto out = open_out(path);
  out << "# schema=1\nangle_deg,power_no_jam,power_svd,power_l1csvd\n";
  for (std::size_t i = 0; i < rep.angles.size(); ++i) {
    out << fmt(rep.angles[i]) << ',' << fmt(rep.no_jam.spectrum.power[i]) << ',' << fmt(rep.svd.spectrum.power[i])
        << ',' << fmt(rep.l1csvd.spectrum.power[i]) << '\n';
  }
  finish(out, path);

  const std::size_t n_peaks = a.sources.size();
  auto spectrum_json = [&](const doa::SpectrumResult& s) {
    return Json{{"peaks", cli::echo_value(doa::spectrum_peaks(s.spectrum, n_peaks))},
                {"lambda", cli::echo_value(s.lambda)},
                {"iterations", s.iterations},
                {"converged", s.converged}};
  };
  Json results = {{"no_jam", spectrum_json(rep.no_jam)},
                  {"svd", spectrum_json(rep.svd)},
                  {"l1csvd", spectrum_json(rep.l1csvd)}};
  write_manifest(join_path(c.out_dir, "doa_manifest.json"), "doa", p, results, {"doa.csv"},
                 elapsed_ms(start, c.timing));
  return kExitOk;
}

/// Locates the subcommand and any --config value in raw argv.
struct Prescan {
  std::string subcommand;
  std::size_t sub_index = 0;
  std::string config;
};

Prescan prescan(const std::vector<std::string>& args) {
  Prescan ps;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (ps.subcommand.empty() && !a.empty() && a[0] != '-') {
      ps.subcommand = a;
      ps.sub_index = i;
    } else if (a == "--config" && i + 1 < args.size()) {
      ps.config = args[i + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      ps.config = a.substr(9);
    }
  }
  return ps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L1-norm compact SVD: decomposition and experiment drivers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "l1csvd 1.0");

  Common common;
  DecomposeArgs dec;
  BenchArgs bench;
  ConvergenceArgs conv;
  VowelArgs vow;
  DoaArgs doa_args;

  auto* dec_app = app.add_subcommand("decompose", "Factor a CSV matrix into U, sigma, V");
  Params dec_p(dec_app);
  dec_p.opt("input", dec.input, "Input matrix CSV (rows x cols, no header)")->required();
  dec_p.opt("k", dec.k, "Number of components")->required();
  dec_p.opt("method", dec.method, "svd, l1csvd or rpca")->check(CLI::IsMember({"svd", "l1csvd", "rpca"}));
  dec_p.opt("solver", dec.solver, "L1-PCA solver for l1csvd: greedy, joint, bitflip, exhaustive");
  dec_p.opt("max-iter", dec.max_iter, "Outer iteration cap");
  dec_p.opt("tol", dec.tol, "Relative M_P change for convergence");
  dec_p.opt("prefix", dec.prefix, "Output file prefix");
  add_common(dec_p, common);

  auto* bench_app = app.add_subcommand("bench-sv", "Singular-value estimation sweep over outlier power");
  Params bench_p(bench_app);
  bench_p.opt("d", bench.d, "Rows");
  bench_p.opt("n", bench.n, "Columns");
  bench_p.opt("k", bench.k, "Signal rank");
  bench_p.opt("k-o", bench.k_o, "Outlier subspace rank");
  bench_p.opt("p-o", bench.p_o, "Column corruption probability");
  bench_p.opt("snr-db", bench.snr_db, "Signal-to-noise ratio in dB (inf disables noise)");
  bench_p.opt("sv-log-low", bench.sv_log_low, "Lower end of the log-uniform singular value range");
  bench_p.opt("sv-log-high", bench.sv_log_high, "Upper end of the log-uniform singular value range");
  bench_p.opt("trials", bench.trials, "Trials per OSR point");
  bench_p.list("osr-grid", bench.osr_grid, "Comma-separated OSR values in dB");
  bench_p.list("methods", bench.methods, "Comma-separated subset of svd,l1pca,l1csvd,rpca");
  bench_p.flag("snr-as-written", bench.snr_as_written, "Use noise/signal = 10^(snr/10)");
  add_common(bench_p, common);

  auto* conv_app = app.add_subcommand("convergence", "M_P traces from several random V starts");
  Params conv_p(conv_app);
  conv_p.opt("d", conv.d, "Rows");
  conv_p.opt("n", conv.n, "Columns");
  conv_p.opt("k", conv.k, "Components");
  conv_p.opt("inits", conv.inits, "Number of random V initializations");
  conv_p.opt("max-iter", conv.max_iter, "Outer iteration cap");
  conv_p.opt("tol", conv.tol, "Relative M_P change for convergence");
  add_common(conv_p, common);

  auto* vowel_app = app.add_subcommand("vowel", "Subspace classifier under training-set corruption");
  Params vowel_p(vowel_app);
  vowel_p.opt("dataset", vow.dataset, "PMLB vowel table (tab or comma separated)");
  vowel_p.opt("n-train", vow.n_train, "Training samples per class");
  vowel_p.opt("n-test", vow.n_test, "Test samples per class");
  vowel_p.opt("corrupt-count", vow.corrupt_count, "Corrupted training columns per class");
  vowel_p.opt("power-factor", vow.power_factor, "Corruption power relative to the average entry power");
  vowel_p.opt("components", vow.components, "Components per class (0 = all)");
  vowel_p.opt("trials", vow.trials, "Corruption realizations");
  vowel_p.list("methods", vow.methods, "Comma-separated subset of svd,rpca,l1csvd");
  add_common(vowel_p, common);

  auto* doa_app = app.add_subcommand("doa", "Group-sparse DOA spectra with and without jammers");
  Params doa_p(doa_app);
  doa_p.opt("sensors", doa_args.sensors, "Array elements");
  doa_p.opt("snapshots", doa_args.snapshots, "Snapshots");
  doa_p.opt("snr-db", doa_args.snr_db, "Per-source SNR in dB");
  doa_p.list("sources", doa_args.sources, "Source directions in degrees");
  doa_p.list("jammers", doa_args.jammers, "Jammer directions in degrees");
  doa_p.opt("jam-snapshots", doa_args.jam_snapshots, "Snapshots hit by each jammer");
  doa_p.opt("jam-power", doa_args.jam_power, "Jammer power relative to one source");
  doa_p.opt("k", doa_args.k, "Reduced dimension");
  doa_p.opt("lambda-fraction", doa_args.lambda_fraction, "Group-lasso weight as a fraction of lambda_max");
  doa_p.opt("max-iter", doa_args.max_iter, "Solver iteration cap");
  doa_p.opt("tol", doa_args.tol, "Solver relative tolerance");
  add_common(doa_p, common);

  const std::map<std::string, Params*> params{{"decompose", &dec_p},
                                              {"bench-sv", &bench_p},
                                              {"convergence", &conv_p},
                                              {"vowel", &vowel_p},
                                              {"doa", &doa_p}};

  std::vector<std::string> args(argv, argv + argc);
  try {
    const Prescan ps = prescan(args);
    if (!ps.config.empty() && params.count(ps.subcommand)) {
      const cli::ConfigMap cfg = cli::load_config_file(ps.config);
      const std::vector<std::string> user(args.begin() + static_cast<long>(ps.sub_index) + 1, args.end());
      const auto extra = cli::config_tokens(cfg, user, params.at(ps.subcommand)->flags());
      args.insert(args.begin() + static_cast<long>(ps.sub_index) + 1, extra.begin(), extra.end());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (dec_app->parsed()) return run_decompose(dec, common, dec_p);
    if (bench_app->parsed()) return run_bench(bench, common, bench_p);
    if (conv_app->parsed()) return run_convergence(conv, common, conv_p);
    if (vowel_app->parsed()) return run_vowel(vow, common, vowel_p);
    if (doa_app->parsed()) return run_doa_cmd(doa_args, common, doa_p);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
