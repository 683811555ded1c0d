#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randpoly/config.hpp"
#include "randpoly/csv.hpp"

namespace randpoly::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NumericalError:
    case ErrorKind::EnvelopeTooLoose:
      return kNumerical;
    case ErrorKind::IoError:
      return kIo;
    default:
      return kConfig;
  }
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

struct Options {
  std::string config;
  std::string out;
  unsigned threads = default_threads();
  int dim = 2;
  double beta = 0.0;
  double omega = 1.0;
  double n = 1e6;
  double gamma_coef = 4.0;
  std::string column = "mean";
  std::string in;
  bool self_test = false;
  bool uniform_control = false;
};

/// A --config file is either a config or a manifest written by an earlier
/// run; in the latter case the echoed config is used.
inline RunConfig read_run_config(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::ConfigError, "--config is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("version")) doc = doc.at("config");
  RunConfig rc = parse_config(doc);
  apply_seed_override(rc);
  return rc;
}

class Run {
 public:
  Run(std::string command, const Options& opt, std::ostream& out) : command_(std::move(command)), opt_(opt), out_(out) {
    started_ = utc_now();
  }

  RunConfig& config() { return rc_; }
  bool has_config() const { return has_config_; }

  void load() {
    rc_ = read_run_config(opt_.config);
    if (!opt_.out.empty()) rc_.out = opt_.out;
    has_config_ = true;
  }

  std::filesystem::path out_dir() {
    const std::string dir = rc_.out.empty() ? opt_.out : rc_.out;
    if (dir.empty()) throw Error(ErrorKind::ConfigError, "no output directory: set 'out' or pass --out");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create '" + dir + "': " + ec.message());
    dir_ = dir;
    return dir_;
  }

  void write(const std::string& name, const std::string& content) {
    csv::write_atomic(out_dir() / name, content);
    outputs_.push_back(name);
  }

  /// Manifest is written last so its presence marks a complete run.
  void finish(int status, const std::string& error = {}) {
    if (dir_.empty()) return;
    json m = {{"version", kVersion},    {"command", command_},      {"started", started_},
              {"finished", utc_now()},  {"exit_status", status},    {"outputs", outputs_}};
    if (has_config_) {
      m["config"] = to_json(rc_);
      m["seed"] = rc_.seed;
    }
    if (!error.empty()) m["error"] = error;
    csv::write_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

  std::ostream& out() { return out_; }
  const Options& opt() const { return opt_; }

 private:
  std::string command_;
  const Options& opt_;
  std::ostream& out_;
  RunConfig rc_;
  bool has_config_ = false;
  std::string started_;
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
};

template <int D>
void cmd_rhs(Run& run) {
  const auto cfg = build_experiment<D>(run.config(), run.opt().threads);
  const auto rule = sphere_rule<D>(cfg.quad_m);
  const double v = limit_rhs<D>(cfg.mode, cfg.body, cfg.q, cfg.rho ? &*cfg.rho : nullptr, cfg.lambda, rule);
  run.out() << csv::format(v) << "\n";
}

template <int D>
void cmd_simulate(Run& run) {
  const auto cfg = build_experiment<D>(run.config(), run.opt().threads);
  run.out_dir();
  const auto res = run_experiment(cfg);
  run.write("trials.csv", csv::trials_csv(res.records));
  run.write("summary.csv", csv::summary_csv(res.summary));
  if (!res.failures.empty()) {
    std::string s = "n,seed,trial,role,message\n";
    for (const auto& f : res.failures) {
      s += std::to_string(f.n) + ',' + std::to_string(f.key.seed) + ',' + std::to_string(f.key.trial) + ',' +
           std::to_string(static_cast<int>(f.key.role)) + ",\"" + f.message + "\"\n";
    }
    run.write("failures.csv", s);
  }
  run.out() << "n,trials,mean,ci_half,scaled_mean\n";
  for (const auto& r : res.summary) {
    run.out() << r.n << ',' << r.trials << ',' << csv::format(r.mean) << ',' << csv::format(r.ci_half) << ','
              << csv::format(r.scaled_mean) << "\n";
  }
}

template <int D>
void cmd_efron_stein(Run& run) {
  const auto cfg = build_experiment<D>(run.config(), run.opt().threads);
  run.out_dir();
  std::vector<TrialRecord> records;
  const auto rows = efron_stein_check(cfg, &records);
  std::string s = "n,trials,es_bound,es_ci,direct_var,var_ci,min_delta\n";
  for (const auto& r : rows) {
    s += std::to_string(r.n) + ',' + std::to_string(r.trials) + ',' + csv::format(r.es_bound) + ',' + csv::format(r.es_ci) +
         ',' + csv::format(r.direct_var) + ',' + csv::format(r.var_ci) + ',' + csv::format(r.min_delta) + '\n';
  }
  run.write("trials.csv", csv::trials_csv(records));
  run.write("efron_stein.csv", s);
  run.out() << s;
}

template <int D>
void cmd_duality(Run& run) {
  const auto cfg = build_experiment<D>(run.config(), run.opt().threads);
  run.out_dir();
  const auto variant = run.opt().self_test         ? DualityVariant::SelfTest
                       : run.opt().uniform_control ? DualityVariant::UniformControl
                                                   : DualityVariant::Standard;
  const std::size_t n = cfg.n_grid.front();
  const auto res = duality_test<D>(cfg.body, cfg.q, n, cfg.trials, cfg.seed, variant, cfg.quad_m, cfg.threads);
  std::string s = "trial,arm_a,arm_b\n";
  for (std::size_t k = 0; k < res.arm_a.size(); ++k) {
    s += std::to_string(k) + ',' + csv::format(res.arm_a[k]) + ',' + csv::format(res.arm_b[k]) + '\n';
  }
  run.write("duality.csv", s);
  run.out() << "n " << n << "\nstatistic " << csv::format(res.statistic) << "\ncritical " << csv::format(res.critical)
            << "\ndecision " << (res.reject ? "reject" : "accept") << "\n";
}

template <int D>
void cmd_miss(Run& run) {
  const auto cfg = build_experiment<D>(run.config(), run.opt().threads);
  if (!cfg.rho) throw Error(ErrorKind::ConfigError, "miss needs 'rho'");
  run.out_dir();
  double gamma1 = 0.0;
  const auto rows = miss_probability<D>(*cfg.rho, cfg.n_grid, cfg.trials, cfg.seed, cfg.threads, &gamma1);
  std::string s = "n,trials,misses,probability,ci_half,bound\n";
  for (const auto& r : rows) {
    s += std::to_string(r.n) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.misses) + ',' +
         csv::format(r.probability) + ',' + csv::format(r.ci_half) + ',' + csv::format(r.bound) + '\n';
  }
  run.write("miss.csv", s);
  run.out() << "gamma1 " << csv::format(gamma1) << "\n" << s;
}

template <int D>
void cmd_lln_trace(Run& run) {
  const auto cfg = build_experiment<D>(run.config(), run.opt().threads);
  run.out_dir();
  const auto trace = lln_trace(cfg);
  std::string s = "n,difference,scaled\n";
  for (const auto& p : trace) s += std::to_string(p.n) + ',' + csv::format(p.difference) + ',' + csv::format(p.scaled) + '\n';
  run.write("trace.csv", s);
  run.out() << s;
}

#define RANDPOLY_DIM_DISPATCH(fn, run)                         \
  do {                                                         \
    if ((run).config().dim == 2) {                             \
      fn<2>(run);                                              \
    } else {                                                   \
      fn<3>(run);                                              \
    }                                                          \
  } while (0)

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Random polytope simulation and verification", "randpoly"};
  app.require_subcommand(1);

  auto add_threads = [&](CLI::App* c) { c->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber); };
  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", opt.config, "JSON config or manifest")->required();
    c->add_option("--out", opt.out, "Output directory");
    add_threads(c);
  };

  auto* constant = app.add_subcommand("constant", "Print the volume constant c_d");
  constant->add_option("--dim", opt.dim, "Dimension")->check(CLI::Range(2, 3));
  auto* rhs = app.add_subcommand("rhs", "Print the limit constant for a config");
  add_config(rhs);
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo experiment");
  add_config(simulate);
  auto* regress = app.add_subcommand("regress", "Fit a log-log slope to a summary CSV");
  regress->add_option("--in", opt.in, "Summary CSV")->required();
  regress->add_option("--column", opt.column, "mean or var");
  auto* es = app.add_subcommand("efron-stein", "Compare the jackknife bound with the variance");
  add_config(es);
  auto* duality = app.add_subcommand("duality", "Two-sample KS test of the polarity transfer");
  add_config(duality);
  duality->add_flag("--self-test", opt.self_test, "Feed arm A to both arms");
  duality->add_flag("--uniform-control", opt.uniform_control, "Use a uniform arm-B density");
  auto* miss = app.add_subcommand("miss", "Probability that the hull misses the origin");
  add_config(miss);
  auto* gamma = app.add_subcommand("gamma-check", "Compare the truncated integral with its asymptote");
  gamma->add_option("--beta", opt.beta, "Exponent beta >= 0")->check(CLI::NonNegativeNumber);
  gamma->add_option("--omega", opt.omega, "Coefficient omega > 0");
  gamma->add_option("--dim", opt.dim, "Dimension")->check(CLI::Range(2, 3));
  gamma->add_option("--n", opt.n, "Sample size n");
  gamma->add_option("--gamma-coef", opt.gamma_coef, "Cutoff coefficient gamma");
  auto* trace = app.add_subcommand("lln-trace", "Scaled difference along one nested sample");
  add_config(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return kConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run(sub->get_name(), opt, out);
  try {
    if (sub == constant) {
      out << std::setprecision(16) << c_d_constant(opt.dim) << "\n";
    } else if (sub == regress) {
      const auto table = csv::read(opt.in);
      const std::string col = opt.column == "variance" ? "var" : opt.column;
      if (col != "mean" && col != "var") throw Error(ErrorKind::ConfigError, "--column must be mean or var");
      const auto n = table.column("n");
      const auto y = table.column(col);
      const auto r = stats::fit_log_log(n, y);
      out << std::fixed << std::setprecision(6) << "slope " << r.slope << "\nintercept " << r.intercept
          << "\nslope_stderr " << r.slope_stderr << "\nr_squared " << r.r_squared << "\n";
    } else if (sub == gamma) {
      const auto g = gamma_lemma_check(opt.beta, opt.omega, opt.dim, opt.n, opt.gamma_coef);
      out << "g " << csv::format(g.g) << "\nintegral " << csv::format(g.integral) << "\nasymptote "
          << csv::format(g.asymptote) << "\nratio " << csv::format(g.ratio) << "\n";
    } else {
      run.load();
      if (sub == rhs) RANDPOLY_DIM_DISPATCH(cmd_rhs, run);
      else if (sub == simulate) RANDPOLY_DIM_DISPATCH(cmd_simulate, run);
      else if (sub == es) RANDPOLY_DIM_DISPATCH(cmd_efron_stein, run);
      else if (sub == duality) RANDPOLY_DIM_DISPATCH(cmd_duality, run);
      else if (sub == miss) RANDPOLY_DIM_DISPATCH(cmd_miss, run);
      else if (sub == trace) RANDPOLY_DIM_DISPATCH(cmd_lln_trace, run);
      run.finish(kOk);
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const int code = exit_code(e.kind());
    try {
      run.finish(code, e.what());
    } catch (const Error&) {
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

#undef RANDPOLY_DIM_DISPATCH

}  // namespace randpoly::cli
