#include "lobvol/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "lobvol/errors.hpp"
#include "lobvol/hausman.hpp"
#include "lobvol/io.hpp"
#include "lobvol/montecarlo.hpp"
#include "lobvol/qmle.hpp"
#include "lobvol/simulator.hpp"

namespace lobvol {

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return 1;
    case ErrorCode::InsufficientData:
    case ErrorCode::InvalidSeries:
    case ErrorCode::MissingCovariate:
    case ErrorCode::ParseError:
    case ErrorCode::EmptyFile: return 2;
    default: return 3;
  }
}

struct DataArgs {
  std::string path;
  std::string model = "roll";
  std::string config;
  bool raw_price = false;
  std::string session_start;
  std::string session_end;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("data", a.path, "Tick CSV: time,price[,I,V,D,S,QD,OFI]")->required();
  cmd->add_option("--model", a.model, "Noise model, e.g. roll, signed-spread, roll+ofi");
  cmd->add_option("--config", a.config, "INI file with [test] and [bounds] sections");
  cmd->add_flag("--raw-price", a.raw_price, "Price column holds raw prices; take logs");
  cmd->add_option("--session-start", a.session_start, "Drop rows before this time (s or HH:MM:SS)");
  cmd->add_option("--session-end", a.session_end, "Drop rows after this time (s or HH:MM:SS)");
}

struct Loaded {
  TickSeries series;
  NoiseModel model;
  TestConfig test;
};

Loaded load(const DataArgs& a, std::ostream& err) {
  LoadOptions lo;
  lo.raw_price = a.raw_price;
  if (!a.session_start.empty()) lo.session_start = parse_clock(a.session_start);
  if (!a.session_end.empty()) lo.session_end = parse_clock(a.session_end);
  LoadReport rep = load_ticks(a.path, lo);
  if (rep.duplicates_dropped > 0) {
    err << "warning: dropped " << rep.duplicates_dropped << " duplicate-timestamp rows\n";
  }
  if (rep.trimmed > 0) err << "note: " << rep.trimmed << " rows outside the session window\n";
  Loaded l{std::move(rep.series), NoiseModel::from_name(a.model), {}};
  if (!a.config.empty()) l.test = test_from_config(load_config(a.config));
  return l;
}

int parse_stat(const std::string& s, const TickSeries& series) {
  if (s == "auto") return auto_variant(series);
  try {
    const int v = std::stoi(s);
    if (v >= 1 && v <= 5) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, "--stat must be 1..5 or auto");
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
  return os.str();
}

std::string flags(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volatility estimation and residual-noise tests for tick data"};
  app.require_subcommand(1);

  DataArgs fit_args;
  std::string variant = "err";
  std::string space = "small";
  auto* fit = app.add_subcommand("fit", "Fit a likelihood. CSV: variant,model,n,sigma2,a2,loglik,iterations,converged,bounds_hit,theta");
  add_data_options(fit, fit_args);
  fit->add_option("--variant", variant, "exp | err | null")->check(CLI::IsMember({"exp", "err", "null"}));
  fit->add_option("--space", space, "a^2 domain: small | large")->check(CLI::IsMember({"small", "large"}));

  DataArgs test_args;
  std::string stat = "auto";
  double level = 0.05;
  auto* test = app.add_subcommand("test", "Residual-noise Hausman test. CSV: stat,statistic,p_value,level,reject,sigma2_exp,sigma2_err,v_hat,n,warnings");
  add_data_options(test, test_args);
  test->add_option("--stat", stat, "Variance estimator 1..5 or auto");
  test->add_option("--level", level, "Test level");

  DataArgs sel_args;
  auto* sel = app.add_subcommand("select", "Volatility selection sequence. CSV: provenance,estimate,stage1_statistic,stage1_reject,stage2_statistic,stage2_reject");
  add_data_options(sel, sel_args);
  sel->add_option("--stat", stat, "Variance estimator 1..5 or auto");
  sel->add_option("--level", level, "Test level");

  DataArgs gof_args;
  auto* gof = app.add_subcommand("gof", "Proportion of noise variance explained. CSV: model,pi_v,explained_var,residual_var,clamped,a2");
  add_data_options(gof, gof_args);

  std::string sim_config;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "Simulate one day and write it as tick CSV");
  sim->add_option("--config", sim_config, "INI file with a [scenario] section");
  sim->add_option("--seed", sim_seed, "Override the scenario seed");
  sim->add_option("-o,--output", sim_out, "Output file (default stdout)");

  std::string kind;
  std::string study_config;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  auto* study = app.add_subcommand("study", "Monte Carlo study. rejection CSV: vol,noise,a2,model,freq,stat,value,mc_stderr,n_ok,n_fail; estimator CSV: vol,a2,model,freq,estimator,bias,stdev,rmse,n_ok,n_fail");
  study->add_option("kind", kind, "rejection | estimator")->required()->check(CLI::IsMember({"rejection", "estimator"}));
  study->add_option("--config", study_config, "INI file with [scenario], [test], [study] sections");
  study->add_option("--replications", reps, "Override study.replications");
  study->add_option("--threads", threads, "Worker threads (default LOBVOL_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  out << std::setprecision(12);
  try {
    if (*fit) {
      const Loaded l = load(fit_args, err);
      const NoiseSpace ns = space == "large" ? NoiseSpace::LargeNoise : NoiseSpace::SmallTest;
      FitResult r;
      if (variant == "exp") {
        r = fit_exp(l.series, l.model, l.test.fit);
      } else if (variant == "err") {
        r = fit_err(l.series, l.model, ns, l.test.fit);
      } else {
        r = fit_null(l.series, ns, l.test.fit);
      }
      out << "variant,model,n,sigma2,a2,loglik,iterations,converged,bounds_hit,theta\n"
          << variant << ',' << (variant == "null" ? "null" : l.model.name()) << ','
          << l.series.num_returns() << ',' << r.sigma2 << ',' << (r.a2 ? join({*r.a2}) : "")
          << ',' << r.loglik << ',' << r.iterations << ',' << r.converged << ','
          << flags(r.bounds_hit) << ',' << join(r.theta) << '\n';
      err << "sigma2 = " << r.sigma2 << " (annualized)";
      if (r.a2) err << ", a2 = " << *r.a2;
      err << ", loglik = " << r.loglik << '\n';
    } else if (*test) {
      const Loaded l = load(test_args, err);
      const TestReport r = run_test(l.series, l.model, parse_stat(stat, l.series), level, l.test);
      std::string warn;
      for (const auto& w : r.warnings) warn += (warn.empty() ? "" : ";") + w;
      out << "stat,statistic,p_value,level,reject,sigma2_exp,sigma2_err,v_hat,n,warnings\n"
          << 'S' << r.avar_variant << ',' << r.statistic << ',' << r.p_value << ',' << r.level << ','
          << r.reject << ',' << r.sigma2_exp << ',' << r.sigma2_err << ',' << r.v_hat << ',' << r.n
          << ',' << warn << '\n';
      err << "S" << r.avar_variant << " = " << r.statistic << ", p = " << r.p_value << ": "
          << (r.reject ? "reject" : "do not reject") << " no residual noise at level " << level << '\n';
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    } else if (*sel) {
      const Loaded l = load(sel_args, err);
      const SequenceResult r = select_volatility(l.series, l.model, parse_stat(stat, l.series), level, l.test);
      out << "provenance,estimate,stage1_statistic,stage1_reject,stage2_statistic,stage2_reject\n"
          << to_string(r.provenance) << ',' << r.chosen_estimate << ',' << r.stage1.statistic << ','
          << r.stage1.reject << ',';
      if (r.stage2) out << r.stage2->statistic << ',' << r.stage2->reject;
      else out << ',';
      out << '\n';
      err << "volatility " << r.chosen_estimate << " from " << to_string(r.provenance) << '\n';
    } else if (*gof) {
      const Loaded l = load(gof_args, err);
      const FitResult f = fit_err(l.series, l.model, NoiseSpace::SmallTest, l.test.fit);
      const PiV p = pi_v_hat(l.series, l.model, f);
      out << "model,pi_v,explained_var,residual_var,clamped,a2\n"
          << l.model.name() << ',' << p.pi_v << ',' << p.explained_var << ',' << p.residual_var << ','
          << p.clamped << ',' << *f.a2 << '\n';
      err << "proportion of noise variance explained: " << std::fixed << std::setprecision(2)
          << 100.0 * p.pi_v << " %\n";
    } else if (*sim) {
      ScenarioConfig sc = sim_config.empty() ? ScenarioConfig{} : scenario_from_config(load_config(sim_config));
      if (sim_seed) sc.seed = *sim_seed;
      const Simulation s = simulate_scenario(sc);
      if (sim_out.empty()) {
        write_ticks(out, s.series);
      } else {
        std::ofstream f(sim_out);
        if (!f) throw Error(ErrorCode::ParseError, "cannot write " + sim_out);
        write_ticks(f, s.series);
      }
      err << "N = " << s.series.num_returns() << ", sigma2_bar0 = " << s.truth.sigma2_bar0
          << ", jump QV = " << s.truth.jump_qv << ", realized a2 = " << s.truth.realized_a2 << '\n';
    } else if (*study) {
      StudyConfig sc = study_config.empty() ? StudyConfig{} : study_from_config(load_config(study_config));
      if (reps) sc.replications = *reps;
      if (threads) sc.threads = *threads;
      if (kind == "rejection") {
        write_csv(out, rejection_study(sc));
      } else {
        write_csv(out, estimator_study(sc));
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lobvol
