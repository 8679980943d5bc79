#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lobvol/core_data.hpp"
#include "lobvol/noise_models.hpp"

namespace lobvol {

enum class VolRegime { Constant, SvNoJump, SvJump };
enum class NoiseRegime { H0, H1, H2 };

struct PriceConfig {
  double drift = 0.03;
  bool jumps = false;
  double jump_size = 0.0;       // 0 means sqrt(T * sigma2_bar)
  double jumps_per_horizon = 1.0;  // Poisson mean over [0, T]
};

// U-shaped intraday factor with one downward jump at a uniform time.
struct SeasonalityConfig {
  bool enabled = false;
  double C = 0.75;
  double A = 0.25;
  double D = 0.89;
  double a = 10.0;
  double c = 10.0;
  double beta = 0.5;  // relative size of the volatility jump
};

// Square-root variance factor.
struct SvConfig {
  bool enabled = false;
  double alpha = 5.0;
  double sigma2_bar = 0.1;
  double delta = 0.4;
  double leverage = -0.75;
};

struct TimesConfig {
  bool irregular = false;
  std::size_t n = 23400;  // regular grid size
  double beta1 = -0.84;
  double beta2 = -0.26;
  double beta3 = -0.39;
  double mean_step = 0.0;  // mean of U_i in years; 0 means T / 46800
};

struct InfoConfig {
  ModelKind model = ModelKind::Roll;
  double sign_autocorr = 0.3;
  double spread_mean = 1.25e-4;
  double spread_var = 1e-10;
  double spread_corr = 0.6;
  std::vector<double> theta0;  // empty means the model default
};

struct NoiseConfig {
  NoiseRegime regime = NoiseRegime::H0;
  double a2 = 0.0;
  // H2 takes sign(Delta X) over the last sign_seconds (of a 23,400 s day)
  // before t_i, capped at the observation return; 0 uses the observation
  // return itself.
  double sign_seconds = 1.0;
};

struct ScenarioConfig {
  double horizon = 1.0 / 252.0;
  double sigma2 = 0.1;  // level for constant volatility
  std::size_t fine_steps = 234000;  // latent grid when volatility moves
  std::uint64_t seed = 1;
  PriceConfig price;
  SeasonalityConfig seasonality;
  SvConfig sv;
  TimesConfig times;
  InfoConfig info;
  NoiseConfig noise;

  // Volatility blocks preset to one of the three simulation designs.
  static ScenarioConfig make(VolRegime regime);
  // Throws InvalidConfig on inadmissible values.
  void check() const;
  // 2 alpha sigma2_bar > delta^2.
  bool feller() const { return 2.0 * sv.alpha * sv.sigma2_bar > sv.delta * sv.delta; }
};

struct GroundTruth {
  std::vector<double> efficient;  // X at the observation times
  std::vector<double> noise;      // epsilon at the observation times
  double integrated_variance = 0.0;
  double jump_qv = 0.0;
  double quadratic_variation = 0.0;
  double sigma2_bar0 = 0.0;  // quadratic_variation / T
  double quarticity = 0.0;   // integral of sigma^4
  double min_sv_variance = 0.0;  // smallest sigma^2_SV visited on the latent grid
  std::vector<double> jump_times;
  double vol_jump_time = 0.0;
  std::vector<double> theta0;
  double realized_a2 = 0.0;
};

struct Simulation {
  TickSeries series;
  GroundTruth truth;
};

Simulation simulate_scenario(const ScenarioConfig& cfg);

// sigma_{t,U}: the U-shaped factor, cut by beta times its value at tau from tau on.
double seasonal_factor(double t, double tau, double horizon, const SeasonalityConfig& s);
// alpha_t, the deterministic spacing shape of the irregular grid.
double arrival_alpha(double t, double horizon, const TimesConfig& cfg);
std::vector<double> simulate_times(const ScenarioConfig& cfg, std::mt19937_64& rng);
Covariates simulate_info(const ScenarioConfig& cfg, const std::vector<double>& times,
                         std::mt19937_64& rng);
// dx holds the efficient returns, one per observation after the first.
std::vector<double> simulate_noise(const NoiseConfig& cfg, const std::vector<double>& signs,
                                   const std::vector<double>& dx, std::mt19937_64& rng);

std::vector<double> default_theta(ModelKind model);

// Seed scrambler used to derive independent streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace lobvol
