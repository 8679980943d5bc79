// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobvol/core_data.hpp"
#include "lobvol/likelihood.hpp"
#include "lobvol/montecarlo.hpp"
#include "lobvol/qmle.hpp"
#include "lobvol/simulator.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lobvol;
using namespace lobvol::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.push_back(std::string(ok ? "ok   " : "MISS ") + buf);
    pass = pass && ok;
  }
};

const RejectionRow& row(const std::vector<RejectionRow>& rows, ModelKind m, int stat) {
  for (const auto& r : rows) {
    if (r.model == to_string(m) && r.stat == stat) return r;
  }
  throw std::runtime_error("missing row");
}

Outcome ac1_size() {
  Outcome o;
  StudyConfig cfg;
  cfg.models = {ModelKind::Roll, ModelKind::SignedSpread};
  cfg.stats = {1};
  cfg.replications = 500;
  cfg.seed = 101;
  const auto rows = rejection_study(cfg);
  for (ModelKind m : cfg.models) {
    const auto& r = row(rows, m, 1);
    o.check(std::fabs(r.fraction - 0.05) <= 0.03, "%s S1 H0 tick: %.3f (se %.3f, target 0.05 +/- 0.03, %zu failed)",
            r.model.c_str(), r.fraction, r.mc_stderr, r.n_fail);
  }
  return o;
}

Outcome ac2_power() {
  Outcome o;
  StudyConfig tick;
  tick.levels = {NoiseLevel{1e-9}};
  tick.models = {ModelKind::Roll, ModelKind::SignedSpread};
  tick.stats = {1, 2};
  tick.replications = 200;
  tick.seed = 202;
  const auto rows = rejection_study(tick);
  for (ModelKind m : tick.models) {
    for (int s : {1, 2}) {
      const auto& r = row(rows, m, s);
      o.check(r.fraction >= 0.97, "%s S%d H1 a2=1e-9 tick: %.3f (>= 0.97)", r.model.c_str(), s, r.fraction);
    }
  }
  StudyConfig sparse;
  sparse.levels = {NoiseLevel{1e-7}};
  sparse.freqs = {Frequency::Sec30};
  sparse.stats = {3};
  sparse.replications = 200;
  sparse.seed = 203;
  const auto& r = rejection_study(sparse).front();
  o.check(r.fraction >= 0.90, "roll S3 H1 a2=1e-7 30s: %.3f (>= 0.90)", r.fraction);
  return o;
}

Outcome ac3_h2() {
  Outcome o;
  StudyConfig cfg;
  cfg.levels = {NoiseLevel{1e-8}};
  cfg.noise = NoiseRegime::H2;
  cfg.models = {ModelKind::Roll, ModelKind::SignedSpread};
  cfg.freqs = {Frequency::Sec15};
  cfg.stats = {3};
  cfg.replications = 500;
  cfg.seed = 303;
  const auto rows = rejection_study(cfg);
  const std::map<ModelKind, double> target = {{ModelKind::Roll, 0.43}, {ModelKind::SignedSpread, 0.40}};
  for (const auto& [m, t] : target) {
    const auto& r = row(rows, m, 3);
    o.check(std::fabs(r.fraction - t) <= 0.10, "%s S3 H2 a2=1e-8 15s: %.3f (se %.3f, target %.2f +/- 0.10)",
            r.model.c_str(), r.fraction, r.mc_stderr, t);
  }
  return o;
}

Outcome ac4_estimators() {
  Outcome o;
  StudyConfig cfg;
  cfg.vol = {VolRegime::SvNoJump};
  cfg.freqs = {Frequency::Sec1};
  cfg.levels = {NoiseLevel{0.0}, NoiseLevel{0.0, true}};
  cfg.replications = 500;
  cfg.seed = 404;
  std::map<std::string, std::map<std::string, EstimatorRow>> t;
  for (const auto& r : estimator_study(cfg)) t[r.level][r.estimator] = r;
  const double ratio = t["0"]["QMLEerr"].stdev / t["0"]["QMLEexp"].stdev;
  o.check(ratio >= 1.5 && ratio <= 2.0, "eps=0 stdev QMLEerr / QMLEexp: %.3f (in [1.5, 2.0])", ratio);
  auto& mix = t["mix"];
  const double best = std::min(mix["QMLEexp"].rmse, mix["QMLEerr"].rmse);
  o.check(mix["S"].rmse <= 1.15 * best, "mix RMSE S %.3g vs best QMLE %.3g (ratio %.3f <= 1.15)",
          mix["S"].rmse, best, mix["S"].rmse / best);
  return o;
}

TickSeries roll_ticks(std::size_t n, std::uint64_t seed) {
  auto s = brownian_series(n, 1.0 / 252.0, 0.1, seed);
  std::mt19937_64 rng(seed ^ 0xabcdef);
  std::bernoulli_distribution b(0.5);
  s.covariates.sign.emplace();
  for (std::size_t i = 0; i <= n; ++i) {
    const double sign = b(rng) ? 1.0 : -1.0;
    s.covariates.sign->push_back(sign);
    s.prices[i] += 1e-4 * sign;
  }
  return s;
}

Outcome ac5_oracles() {
  Outcome o;
  std::mt19937_64 rng(505);
  KernelErrors worst;
  for (std::size_t n = 1; n <= 60; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto [s, a2] = random_kernel(rng);
      const auto e = kernel_errors(n, s, a2, rng);
      worst.coeff_rel = std::max(worst.coeff_rel, e.coeff_rel);
      worst.quad_rel = std::max(worst.quad_rel, e.quad_rel);
      worst.logdet_abs = std::max(worst.logdet_abs, e.logdet_abs);
    }
  }
  o.check(worst.coeff_rel <= 1e-8, "closed-form inverse vs dense: %.2e (<= 1e-8)", worst.coeff_rel);
  o.check(worst.quad_rel <= 1e-9, "quadform vs dense: %.2e (<= 1e-9)", worst.quad_rel);
  o.check(worst.logdet_abs <= 1e-9, "logdet vs dense: %.2e (<= 1e-9)", worst.logdet_abs);

  double lik = 0.0, bypart = 0.0, sigma = 0.0;
  const auto roll = NoiseModel::make(ModelKind::Roll);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = roll_ticks(50 + 20 * rep, 5000 + rep);
    const std::vector<double> th{0.9e-4 + 1e-6 * rep};
    const double le = loglik_exp(s, roll, 0.1, th);
    lik = std::max(lik, std::fabs(loglik_err(s, roll, 0.1, th, 0.0) - le) / std::fabs(le));
    const auto [direct, sides] = bypart_errors(1 + rep % 30, rng);
    bypart = std::max({bypart, direct, sides});
    const auto f = fit_exp(s, roll);
    const auto x = efficient_price(s, roll, f.theta).values;
    const double rv = realized_variance(x) / s.horizon;
    sigma = std::max(sigma, std::fabs(f.sigma2 - rv) / rv);
  }
  o.check(lik <= 1e-12, "l_err(a2 = 0) vs l_exp: %.2e relative (<= 1e-12)", lik);
  o.check(bypart <= 1e-12, "by-part summation identity: %.2e (<= 1e-12)", bypart);
  o.check(sigma <= 1e-10, "sigma2_exp vs RV of estimated price / T: %.2e (<= 1e-10)", sigma);
  return o;
}

Outcome ac6_clt() {
  Outcome o;
  const std::size_t m = 1000;
  const auto roll = NoiseModel::make(ModelKind::Roll);

  std::vector<double> z(m);
  parallel_for(m, 0, [&](std::size_t rep) {
    auto c = ScenarioConfig::make(VolRegime::Constant);
    c.seed = splitmix64(601 ^ rep);
    const auto sim = simulate_scenario(c);
    const auto f = fit_exp(sim.series, roll);
    const double T = sim.series.horizon;
    const double n = static_cast<double>(sim.series.num_returns());
    const double rv = realized_variance(efficient_price(sim.series, roll, f.theta).values) / T;
    z[rep] = std::sqrt(n) * (rv - sim.truth.sigma2_bar0) / std::sqrt(2.0 * sim.truth.quarticity / T);
  });
  const double p = ks_pvalue(z, normal_cdf);
  o.check(p > 0.01, "RV of estimated price, studentized: KS p = %.3f (> 0.01), mean %.3f, var %.3f", p,
          mean(z), variance(z));

  const double a2 = 1e-6, a0 = std::sqrt(a2);
  std::vector<double> es(m), ea(m);
  double target_s = 0.0;
  std::size_t n_ret = 0;
  parallel_for(m, 0, [&](std::size_t rep) {
    auto c = ScenarioConfig::make(VolRegime::Constant);
    c.noise.regime = NoiseRegime::H1;
    c.noise.a2 = a2;
    c.seed = splitmix64(602 ^ rep);
    const auto sim = simulate_scenario(c);
    const auto f = fit_err(sim.series, roll, NoiseSpace::LargeNoise);
    const double n = static_cast<double>(sim.series.num_returns());
    es[rep] = std::pow(n, 0.25) * (f.sigma2 - sim.truth.sigma2_bar0);
    ea[rep] = std::sqrt(n) * (*f.a2 - a2);
    if (rep == 0) {
      const double T = sim.series.horizon, s0 = std::sqrt(sim.truth.sigma2_bar0);
      target_s = 5.0 * a0 * sim.truth.quarticity / (std::pow(T, 1.5) * s0) + 3.0 * a0 * std::pow(s0, 3) / std::sqrt(T);
      n_ret = sim.series.num_returns();
    }
  });
  const double vs = variance(es), va = variance(ea), target_a = 2.0 * a2 * a2;
  o.check(std::fabs(vs / target_s - 1.0) <= 0.2, "large noise sigma2_err: var %.4g vs %.4g (ratio %.3f, N = %zu)",
          vs, target_s, vs / target_s, n_ret);
  o.check(std::fabs(va / target_a - 1.0) <= 0.2, "large noise a2_err: var %.4g vs %.4g (ratio %.3f)", va,
          target_a, va / target_a);
  return o;
}

Outcome ac7_pi_v() {
  Outcome o;
  const std::size_t days = 200;
  std::vector<double> spread(days), roll(days);
  parallel_for(days, 0, [&](std::size_t rep) {
    auto c = ScenarioConfig::make(VolRegime::Constant);
    c.times.irregular = true;
    c.seed = splitmix64(701 ^ rep);
    c.info.model = ModelKind::SignedSpread;
    auto sim = simulate_scenario(c);
    auto m = NoiseModel::make(ModelKind::SignedSpread);
    spread[rep] = pi_v_hat(sim.series, m, fit_err(sim.series, m)).pi_v;
    c.info.model = ModelKind::Roll;
    c.noise.regime = NoiseRegime::H1;
    c.noise.a2 = 1e-9;
    sim = simulate_scenario(c);
    m = NoiseModel::make(ModelKind::Roll);
    roll[rep] = pi_v_hat(sim.series, m, fit_err(sim.series, m)).pi_v;
  });
  const double share = std::count_if(spread.begin(), spread.end(), [](double p) { return p > 0.98; }) /
                       static_cast<double>(days);
  o.check(share >= 0.90, "signed spread, a2 = 0: pi_V > 0.98 on %.1f%% of days (>= 90%%), median %.4f",
          100.0 * share, median(spread));
  const double med = median(roll);
  o.check(std::fabs(med - 10.0 / 11.0) <= 0.03, "roll, a2 = 1e-9: median pi_V %.4f vs 10/11 = %.4f (+/- 0.03)",
          med, 10.0 / 11.0);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 test size, constant vol, tick data", ac1_size},
      {"AC2 test power", ac2_power},
      {"AC3 robustness to H2 noise", ac3_h2},
      {"AC4 estimator comparison", ac4_estimators},
      {"AC5 oracle equivalence", ac5_oracles},
      {"AC6 CLT shape", ac6_clt},
      {"AC7 pi_V goodness of fit", ac7_pi_v},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.check(false, "error: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.0f s)\n", o.pass ? "PASS" : "FAIL", name, secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
