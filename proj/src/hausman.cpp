#include "lobvol/hausman.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "lobvol/errors.hpp"

namespace lobvol {

double chi2_1_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::cdf(boost::math::chi_squared(1.0), x);
}

double chi2_1_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::OutOfBounds, "probability must lie in (0, 1)");
  return boost::math::quantile(boost::math::chi_squared(1.0), p);
}

TestReport hausman(double sigma2_exp, double sigma2_err, std::size_t n, double v_hat, double level) {
  if (!(v_hat > 0.0) || !std::isfinite(v_hat)) {
    throw Error(ErrorCode::DegenerateVariance, "variance estimate must be positive");
  }
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::OutOfBounds, "level must lie in (0, 1)");
  TestReport r;
  const double diff = sigma2_exp - sigma2_err;
  r.statistic = static_cast<double>(n) * diff * diff / v_hat;
  r.level = level;
  r.sigma2_exp = sigma2_exp;
  r.sigma2_err = sigma2_err;
  r.v_hat = v_hat;
  r.n = n;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(1.0), r.statistic));
  r.reject = r.statistic > chi2_1_quantile(1.0 - level);
  return r;
}

bool is_regular_grid(const std::vector<double>& times, double tolerance) {
  if (times.size() < 3) return true;
  const double mean = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - mean) > tolerance * mean) return false;
  }
  return true;
}

int auto_variant(const TickSeries& series) { return is_regular_grid(series.times) ? 5 : 2; }

double avar_hat(int variant, std::span<const double> dx, std::span<const double> times,
                double horizon, double sigma2_exp, const TruncationConfig& cfg) {
  const double sigma_exp = std::sqrt(std::max(sigma2_exp, 0.0));
  switch (variant) {
    case 1: return v1(dx, horizon);
    case 2: return v2(dx, times, horizon, sigma_exp, cfg);
    case 3: return v3(sigma2_exp);
    case 4: return v4(dx, horizon);
    case 5: return v5(dx, horizon, sigma_exp, cfg);
    default: break;
  }
  throw Error(ErrorCode::InvalidConfig, "statistic must be 1..5, got " + std::to_string(variant));
}

namespace {

std::vector<double> diffs(const std::vector<double>& path) {
  std::vector<double> d(path.empty() ? 0 : path.size() - 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = path[i + 1] - path[i];
  return d;
}

std::vector<double> test_returns(const TickSeries& series, const NoiseModel& model,
                                 const FitResult& exp, bool raw) {
  if (raw) return diffs(series.prices);
  return diffs(efficient_price(series, model, exp.theta).values);
}

void check_variant(int variant) {
  if (variant < 1 || variant > 5) {
    throw Error(ErrorCode::InvalidConfig, "statistic must be 1..5, got " + std::to_string(variant));
  }
}

}  // namespace

TestRun run_test_full(const TickSeries& series, const NoiseModel& model, int variant, double level,
                      const TestConfig& cfg) {
  check_variant(variant);
  TestRun run;
  run.exp = fit_exp(series, model, cfg.fit);
  run.err = fit_err(series, model, cfg.space, cfg.fit);
  const auto dx = test_returns(series, model, run.exp, cfg.raw_returns);
  const double v = avar_hat(variant, dx, series.times, series.horizon, run.exp.sigma2, cfg.truncation);
  run.report = hausman(run.exp.sigma2, run.err.sigma2, series.num_returns(), v, level);
  run.report.avar_variant = variant;
  if (variant >= 3 && !is_regular_grid(series.times)) run.report.warnings.push_back("GridNotRegular");
  return run;
}

TestReport run_test(const TickSeries& series, const NoiseModel& model, int variant, double level,
                    const TestConfig& cfg) {
  return run_test_full(series, model, variant, level, cfg).report;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::RvRaw: return "RV_raw";
    case Provenance::QmleErr: return "QMLE_err";
    case Provenance::QmleExp: return "QMLE_exp";
  }
  return "?";
}

SequenceResult select_volatility(const TickSeries& series, const NoiseModel& model, int variant,
                                 double level, const TestConfig& cfg) {
  const TestRun run = run_test_full(series, model, variant, level, cfg);
  const double rv = realized_variance(series.prices) / series.horizon;
  // The raw-data comparison takes V^ from raw returns, where it is consistent
  // when no noise at all is present.
  const auto raw = diffs(series.prices);
  const double v_raw = avar_hat(variant, raw, series.times, series.horizon, rv, cfg.truncation);

  SequenceResult out;
  out.exp = run.exp;
  out.err = run.err;
  out.stage1 = hausman(rv, run.err.sigma2, series.num_returns(), v_raw, level);
  out.stage1.avar_variant = variant;
  if (!out.stage1.reject) {
    out.chosen_estimate = rv;
    out.provenance = Provenance::RvRaw;
    return out;
  }
  out.stage2 = run.report;
  if (run.report.reject) {
    out.chosen_estimate = run.err.sigma2;
    out.provenance = Provenance::QmleErr;
  } else {
    out.chosen_estimate = run.exp.sigma2;
    out.provenance = Provenance::QmleExp;
  }
  return out;
}

}  // namespace lobvol
