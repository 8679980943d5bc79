#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lobvol/avar.hpp"
#include "lobvol/core_data.hpp"
#include "lobvol/noise_models.hpp"
#include "lobvol/qmle.hpp"

namespace lobvol {

double chi2_1_cdf(double x);
// Quantile c with chi2_1_cdf(c) = p.
double chi2_1_quantile(double p);

struct TestReport {
  double statistic = 0.0;
  int avar_variant = 0;  // 0 when V^ was supplied directly
  double p_value = 1.0;
  double level = 0.05;
  bool reject = false;
  double sigma2_exp = 0.0;
  double sigma2_err = 0.0;
  double v_hat = 0.0;
  std::size_t n = 0;
  std::vector<std::string> warnings;
};

// S = N (sigma2_exp - sigma2_err)^2 / v_hat against the chi2(1) quantile.
TestReport hausman(double sigma2_exp, double sigma2_err, std::size_t n, double v_hat, double level);

struct TestConfig {
  TruncationConfig truncation;
  // Compute V^ on raw returns instead of estimated-price returns.
  bool raw_returns = false;
  FitOptions fit;
  NoiseSpace space = NoiseSpace::SmallTest;
};

// True when every spacing lies within 1% of the mean spacing.
bool is_regular_grid(const std::vector<double>& times, double tolerance = 0.01);

// Variant 2 on irregular grids, 5 on regular ones.
int auto_variant(const TickSeries& series);

// Estimator V^_variant on the given returns.
double avar_hat(int variant, std::span<const double> dx, std::span<const double> times,
                double horizon, double sigma2_exp, const TruncationConfig& cfg);

struct TestRun {
  TestReport report;
  FitResult exp;
  FitResult err;
};

TestRun run_test_full(const TickSeries& series, const NoiseModel& model, int variant, double level,
                      const TestConfig& cfg = {});
TestReport run_test(const TickSeries& series, const NoiseModel& model, int variant, double level,
                    const TestConfig& cfg = {});

enum class Provenance { RvRaw, QmleErr, QmleExp };
std::string to_string(Provenance p);

struct SequenceResult {
  double chosen_estimate = 0.0;
  Provenance provenance = Provenance::RvRaw;
  TestReport stage1;  // realized variance against sigma2_err
  std::optional<TestReport> stage2;  // residual-noise test
  FitResult exp;
  FitResult err;
};

SequenceResult select_volatility(const TickSeries& series, const NoiseModel& model, int variant,
                                 double level, const TestConfig& cfg = {});

}  // namespace lobvol
