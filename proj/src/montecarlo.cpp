#include "lobvol/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "lobvol/errors.hpp"

namespace lobvol {

std::string to_string(Frequency f) {
  switch (f) {
    case Frequency::Tick: return "tick";
    case Frequency::Sec1: return "1s";
    case Frequency::Sec15: return "15s";
    case Frequency::Sec30: return "30s";
  }
  return "?";
}

std::string to_string(VolRegime v) {
  switch (v) {
    case VolRegime::Constant: return "constant";
    case VolRegime::SvNoJump: return "sv";
    case VolRegime::SvJump: return "sv-jump";
  }
  return "?";
}

std::string to_string(NoiseRegime r) {
  switch (r) {
    case NoiseRegime::H0: return "H0";
    case NoiseRegime::H1: return "H1";
    case NoiseRegime::H2: return "H2";
  }
  return "?";
}

Frequency frequency_from_name(const std::string& s) {
  for (Frequency f : {Frequency::Tick, Frequency::Sec1, Frequency::Sec15, Frequency::Sec30}) {
    if (s == to_string(f)) return f;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown frequency '" + s + "'");
}

VolRegime vol_regime_from_name(const std::string& s) {
  for (VolRegime v : {VolRegime::Constant, VolRegime::SvNoJump, VolRegime::SvJump}) {
    if (s == to_string(v)) return v;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown volatility regime '" + s + "'");
}

NoiseRegime noise_regime_from_name(const std::string& s) {
  for (NoiseRegime r : {NoiseRegime::H0, NoiseRegime::H1, NoiseRegime::H2}) {
    if (s == to_string(r)) return r;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown noise regime '" + s + "'");
}

std::string NoiseLevel::label() const {
  if (mix) return "mix";
  std::ostringstream os;
  os << a2;
  return os.str();
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOBVOL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t m, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned w = static_cast<unsigned>(std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(m, 1)));
  if (w <= 1) {
    for (std::size_t i = 0; i < m; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned k = 0; k < w; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < m; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ScenarioConfig cell_scenario(const StudyConfig& cfg, VolRegime vol, const NoiseLevel& level,
                             ModelKind model, Frequency freq, std::size_t rep) {
  ScenarioConfig s = ScenarioConfig::make(vol);
  s.horizon = cfg.base.horizon;
  s.sigma2 = cfg.base.sigma2;
  s.fine_steps = cfg.base.fine_steps;
  s.info = cfg.base.info;
  s.info.model = model;
  s.times = cfg.base.times;
  switch (freq) {
    case Frequency::Tick: s.times.irregular = true; break;
    case Frequency::Sec1: s.times.irregular = false; s.times.n = 23400; break;
    case Frequency::Sec15: s.times.irregular = false; s.times.n = 1560; break;
    case Frequency::Sec30: s.times.irregular = false; s.times.n = 780; break;
  }
  double a2 = level.a2;
  if (level.mix) a2 = rep % 2 == 0 ? 0.0 : cfg.mix_a2;
  s.noise = cfg.base.noise;
  s.noise.a2 = a2;
  s.noise.regime = a2 > 0.0 ? cfg.noise : NoiseRegime::H0;
  // Common random numbers across cells: the seed depends on the replication only.
  s.seed = splitmix64(cfg.seed ^ static_cast<std::uint64_t>(rep));
  return s;
}

namespace {

std::vector<int> stats_for(const StudyConfig& cfg, Frequency f) {
  if (!cfg.stats.empty()) return cfg.stats;
  if (f == Frequency::Tick) return {1, 2};
  return {3, 4, 5};
}

void check_failures(std::size_t fails, std::size_t m, const std::string& cell) {
  if (fails > 0 && 100 * fails >= m) {
    throw Error(ErrorCode::StudyDegenerate, std::to_string(fails) + " of " + std::to_string(m) +
                                                " replications failed in cell " + cell);
  }
}

template <class Fn>
void for_each_cell(const StudyConfig& cfg, Fn&& fn) {
  for (VolRegime v : cfg.vol)
    for (const NoiseLevel& lv : cfg.levels)
      for (ModelKind mk : cfg.models)
        for (Frequency f : cfg.freqs) fn(v, lv, mk, f);
}

}  // namespace

std::vector<RejectionRow> rejection_study(const StudyConfig& cfg) {
  if (cfg.replications < 1) throw Error(ErrorCode::InvalidConfig, "replications must be >= 1");
  std::vector<RejectionRow> rows;
  for_each_cell(cfg, [&](VolRegime v, const NoiseLevel& lv, ModelKind mk, Frequency f) {
    const auto stats = stats_for(cfg, f);
    const std::size_t m = cfg.replications;
    // -1 marks a failed replication; otherwise 0/1 per statistic.
    std::vector<std::vector<int>> outcome(m, std::vector<int>(stats.size(), -1));
    const NoiseModel model = NoiseModel::make(mk);
    parallel_for(m, cfg.threads, [&](std::size_t rep) {
      try {
        const auto sim = simulate_scenario(cell_scenario(cfg, v, lv, mk, f, rep));
        const TestRun run = run_test_full(sim.series, model, stats.front(), cfg.level, cfg.test);
        const auto xhat = efficient_price(sim.series, model, run.exp.theta).values;
        std::vector<double> dx(xhat.size() - 1);
        const auto& src = cfg.test.raw_returns ? sim.series.prices : xhat;
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = src[i + 1] - src[i];
        std::vector<int> out(stats.size());
        for (std::size_t k = 0; k < stats.size(); ++k) {
          const double vh = avar_hat(stats[k], dx, sim.series.times, sim.series.horizon,
                                     run.exp.sigma2, cfg.test.truncation);
          out[k] = hausman(run.exp.sigma2, run.err.sigma2, dx.size(), vh, cfg.level).reject ? 1 : 0;
        }
        outcome[rep] = out;
      } catch (const Error&) {
        // counted below
      }
    });
    std::size_t fails = 0;
    for (const auto& o : outcome) fails += o[0] < 0 ? 1 : 0;
    const std::string cell = to_string(v) + "/" + lv.label() + "/" + to_string(mk) + "/" + to_string(f);
    check_failures(fails, m, cell);
    for (std::size_t k = 0; k < stats.size(); ++k) {
      RejectionRow row{to_string(v), lv.a2 > 0.0 || lv.mix ? to_string(cfg.noise) : "H0",
                       lv.label(), to_string(mk), to_string(f), stats[k]};
      std::size_t rej = 0;
      for (const auto& o : outcome) {
        if (o[k] >= 0) {
          ++row.n_ok;
          rej += static_cast<std::size_t>(o[k]);
        }
      }
      row.n_fail = fails;
      if (row.n_ok > 0) {
        row.fraction = static_cast<double>(rej) / static_cast<double>(row.n_ok);
        row.mc_stderr = std::sqrt(row.fraction * (1.0 - row.fraction) / static_cast<double>(row.n_ok));
      }
      rows.push_back(row);
    }
  });
  return rows;
}

std::vector<EstimatorRow> estimator_study(const StudyConfig& cfg) {
  if (cfg.replications < 1) throw Error(ErrorCode::InvalidConfig, "replications must be >= 1");
  static const std::vector<std::string> names = {"S", "QMLEexp", "QMLEerr", "E-QMLE", "QMLE", "RV"};
  std::vector<EstimatorRow> rows;
  for_each_cell(cfg, [&](VolRegime v, const NoiseLevel& lv, ModelKind mk, Frequency f) {
    const std::size_t m = cfg.replications;
    std::vector<std::vector<double>> err(m);
    const NoiseModel model = NoiseModel::make(mk);
    parallel_for(m, cfg.threads, [&](std::size_t rep) {
      try {
        const auto sim = simulate_scenario(cell_scenario(cfg, v, lv, mk, f, rep));
        const double truth = sim.truth.sigma2_bar0;
        const int stat = cfg.stats.empty() ? auto_variant(sim.series) : cfg.stats.front();
        const SequenceResult seq = select_volatility(sim.series, model, stat, cfg.level, cfg.test);
        const double s_exp = seq.exp.sigma2;
        const double s_err = seq.err.sigma2;
        TickSeries xs = sim.series;
        xs.prices = efficient_price(sim.series, model, seq.exp.theta).values;
        const double e_qmle = fit_null(xs, NoiseSpace::LargeNoise, cfg.test.fit).sigma2;
        const double qmle = fit_null(sim.series, NoiseSpace::LargeNoise, cfg.test.fit).sigma2;
        const double rv = realized_variance(sim.series.prices) / sim.series.horizon;
        err[rep] = {seq.chosen_estimate - truth, s_exp - truth, s_err - truth,
                    e_qmle - truth,          qmle - truth,  rv - truth};
      } catch (const Error&) {
        err[rep].clear();
      }
    });
    std::size_t fails = 0;
    for (const auto& e : err) fails += e.empty() ? 1 : 0;
    const std::string cell = to_string(v) + "/" + lv.label() + "/" + to_string(mk) + "/" + to_string(f);
    check_failures(fails, m, cell);
    for (std::size_t k = 0; k < names.size(); ++k) {
      EstimatorRow row{to_string(v), lv.label(), to_string(mk), to_string(f), names[k]};
      double sum = 0.0;
      double sq = 0.0;
      for (const auto& e : err) {
        if (e.empty()) continue;
        ++row.n_ok;
        sum += e[k];
        sq += e[k] * e[k];
      }
      row.n_fail = fails;
      if (row.n_ok > 0) {
        const double n = static_cast<double>(row.n_ok);
        row.bias = sum / n;
        row.rmse = std::sqrt(sq / n);
        row.stdev = n > 1 ? std::sqrt(std::max(sq - n * row.bias * row.bias, 0.0) / (n - 1.0)) : 0.0;
      }
      rows.push_back(row);
    }
  });
  return rows;
}

void write_csv(std::ostream& os, const std::vector<RejectionRow>& rows) {
  os << "vol,noise,a2,model,freq,stat,value,mc_stderr,n_ok,n_fail\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.vol << ',' << r.noise << ',' << r.level << ',' << r.model << ',' << r.freq << ",S"
       << r.stat << ',' << r.fraction << ',' << r.mc_stderr << ',' << r.n_ok << ',' << r.n_fail
       << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<EstimatorRow>& rows) {
  os << "vol,a2,model,freq,estimator,bias,stdev,rmse,n_ok,n_fail\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.vol << ',' << r.level << ',' << r.model << ',' << r.freq << ',' << r.estimator << ','
       << r.bias << ',' << r.stdev << ',' << r.rmse << ',' << r.n_ok << ',' << r.n_fail << '\n';
  }
}

}  // namespace lobvol
