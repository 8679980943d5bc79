#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lobvol {

// Limit-order-book variables that can feed the explicative part of the noise.
enum class Covariate { Sign, Volume, Duration, Spread, Depth, Ofi };

std::string covariate_name(Covariate c);

// Covariate values at a single tick. Missing columns stay empty.
struct LobRecord {
  std::optional<double> sign;
  std::optional<double> volume;
  std::optional<double> duration;
  std::optional<double> spread;
  std::optional<double> depth;
  std::optional<double> ofi;

  std::optional<double> get(Covariate c) const;
};

// Column storage for the per-tick covariates; every present column has one
// entry per observation.
struct Covariates {
  std::optional<std::vector<double>> sign;      // I_i in {-1, +1}
  std::optional<std::vector<double>> volume;    // V_i >= 0
  std::optional<std::vector<double>> duration;  // D_i > 0 (years)
  std::optional<std::vector<double>> spread;    // S_i > 0
  std::optional<std::vector<double>> depth;     // QD_i >= 0
  std::optional<std::vector<double>> ofi;       // OFI_i

  const std::optional<std::vector<double>>& column(Covariate c) const;
  std::optional<std::vector<double>>& column(Covariate c);
  bool has(Covariate c) const { return column(c).has_value(); }
  LobRecord at(std::size_t i) const;
};

// Observed log-prices Z_{t_i} at annualized times t_i in [0, T].
struct TickSeries {
  std::vector<double> times;
  std::vector<double> prices;
  Covariates covariates;
  double horizon = 0.0;

  std::size_t size() const { return prices.size(); }
  // Number of returns N.
  std::size_t num_returns() const { return prices.empty() ? 0 : prices.size() - 1; }
};

struct ReturnSeries {
  std::vector<double> values;  // Y_i = Z_{t_i} - Z_{t_{i-1}}, i = 1..N
  double mean_spacing = 0.0;   // Delta_N = T / N
};

enum class ViolationRule {
  TooFewObservations,
  LengthMismatch,
  NonPositiveHorizon,
  NegativeStartTime,
  TimeBeyondHorizon,
  NonMonotoneTime,
  NonFiniteValue,
  CovariateLength,
  InvalidTradeSign,
  NegativeVolume,
  NonPositiveDuration,
  NonPositiveSpread,
  NegativeDepth,
};

struct Violation {
  ViolationRule rule;
  std::size_t index;

  bool operator==(const Violation&) const = default;
};

std::string to_string(const Violation& v);

// Empty iff every TickSeries invariant holds.
std::vector<Violation> validate(const TickSeries& series);

// Throws Error(InsufficientData) with fewer than two observations and
// Error(InvalidSeries) when validate() reports anything.
ReturnSeries returns(const TickSeries& series);

// Realized variance sum of squared first differences.
double realized_variance(const std::vector<double>& path);

}  // namespace lobvol
