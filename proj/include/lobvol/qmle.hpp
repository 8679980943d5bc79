#pragma once

#include <optional>
#include <vector>

#include "lobvol/core_data.hpp"
#include "lobvol/errors.hpp"
#include "lobvol/noise_models.hpp"

namespace lobvol {

enum class FitVariant { Exp, Err, Null };

// Domain for a^2 in the residual-noise likelihood.
enum class NoiseSpace {
  SmallTest,   // extended space around 0 used by the tests; a^2 may go negative
  LargeNoise,  // a^2 in [a2_lo, a2_hi] with a2_lo > 0
};

struct FitBounds {
  double sigma2_lo = 1e-6;
  double sigma2_hi = 10.0;
  double a2_lo = 1e-14;
  double a2_hi = 1e-4;
  // SmallTest lower limit: a^2 >= -small_margin * sigma^2 * Delta_N.
  double small_margin = 0.125;
};

struct FitOptions {
  FitBounds bounds;
  // Warm start from a previous optimum; narrows the search around it.
  std::optional<double> sigma2_start;
  std::optional<std::vector<double>> theta_start;
  std::optional<double> a2_start;
  int grid_points = 64;
};

struct FitResult {
  FitVariant variant = FitVariant::Exp;
  double sigma2 = 0.0;
  std::vector<double> theta;
  std::optional<double> a2;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  // One flag per coordinate, ordered (sigma2, theta..., a2).
  std::vector<bool> bounds_hit;
};

// Raised when the optimizer stops without meeting its tolerance; best() holds
// the last iterate.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, FitResult best)
      : Error(ErrorCode::NoConvergence, what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

FitResult fit_exp(const TickSeries& series, const NoiseModel& model, const FitOptions& opts = {});
FitResult fit_err(const TickSeries& series, const NoiseModel& model,
                  NoiseSpace space = NoiseSpace::SmallTest, const FitOptions& opts = {});
// No-information QMLE (phi = 0).
FitResult fit_null(const TickSeries& series, NoiseSpace space = NoiseSpace::LargeNoise,
                   const FitOptions& opts = {});

struct EfficientPricePath {
  std::vector<double> times;
  std::vector<double> values;  // X^_{t_i} = Z_{t_i} - phi(Q_i, theta^)
};

EfficientPricePath efficient_price(const TickSeries& series, const NoiseModel& model,
                                   std::span<const double> theta);

struct PiV {
  double pi_v = 0.0;
  double explained_var = 0.0;  // mean of phi(Q_i, theta^)^2
  double residual_var = 0.0;   // a^2 after clamping at 0
  bool clamped = false;        // a^2 was negative
};

// Proportion of the noise variance explained by phi; throws Undefined when
// both parts vanish.
PiV pi_v_hat(const TickSeries& series, const NoiseModel& model, const FitResult& fit);

}  // namespace lobvol
