#include "lobvol/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "lobvol/errors.hpp"

namespace lobvol {

namespace {

constexpr double kSecondsPerDay = 23400.0;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(tag)));
}

double base_seasonal(double t, double horizon, const SeasonalityConfig& s) {
  const double x = t / horizon;
  return s.C + s.A * std::exp(-s.a * x) + s.D * std::exp(-s.c * (1.0 - x));
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

}  // namespace

double seasonal_factor(double t, double tau, double horizon, const SeasonalityConfig& s) {
  if (!s.enabled) return 1.0;
  double v = base_seasonal(t, horizon, s);
  if (t >= tau) v -= s.beta * base_seasonal(tau, horizon, s);
  return v;
}

ScenarioConfig ScenarioConfig::make(VolRegime regime) {
  ScenarioConfig cfg;
  if (regime != VolRegime::Constant) {
    cfg.seasonality.enabled = true;
    cfg.sv.enabled = true;
  }
  cfg.price.jumps = regime == VolRegime::SvJump;
  return cfg;
}

void ScenarioConfig::check() const {
  require(horizon > 0.0, "horizon must be positive");
  require(sigma2 > 0.0, "sigma2 must be positive");
  require(!sv.enabled || (sv.alpha > 0.0 && sv.sigma2_bar > 0.0 && sv.delta > 0.0),
          "volatility parameters must be positive");
  require(std::abs(sv.leverage) <= 1.0, "leverage must lie in [-1, 1]");
  require(std::abs(info.sign_autocorr) < 1.0, "sign autocorrelation must lie in (-1, 1)");
  require(std::abs(info.spread_corr) < 1.0, "spread correlation must lie in (-1, 1)");
  require(info.spread_var > 0.0 && info.spread_mean > 0.0, "spread moments must be positive");
  require(noise.a2 >= 0.0, "noise variance must be non-negative");
  require(noise.sign_seconds >= 0.0, "sign horizon must be non-negative");
  require(times.irregular || times.n >= 1, "regular grid needs at least one step");
  require(fine_steps >= 1, "latent grid needs at least one step");
  require(!price.jumps || price.jumps_per_horizon >= 0.0, "jump intensity must be non-negative");
  require(!seasonality.enabled || (seasonality.beta >= 0.0 && seasonality.beta < 1.0),
          "volatility jump size must lie in [0, 1)");
}

double arrival_alpha(double t, double horizon, const TimesConfig& c) {
  const double e1 = std::exp(c.beta1);
  const double e2 = std::exp(c.beta2);
  const double e3 = std::exp(c.beta3);
  const double x = t / horizon - e2 / (e2 + e3);
  return 1.0 / (e1 + (e2 + e3) * (e2 + e3) * x * x);
}

std::vector<double> simulate_times(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  const double T = cfg.horizon;
  std::vector<double> t;
  if (!cfg.times.irregular) {
    const std::size_t n = cfg.times.n;
    t.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n);
    return t;
  }
  const double mean = cfg.times.mean_step > 0.0 ? cfg.times.mean_step : T / (2.0 * kSecondsPerDay);
  std::exponential_distribution<double> u(1.0 / mean);
  t.reserve(static_cast<std::size_t>(2.0 * T / mean));
  t.push_back(0.0);
  for (;;) {
    const double next = t.back() + arrival_alpha(t.back(), T, cfg.times) * u(rng);
    if (next > T) break;
    if (next > t.back()) t.push_back(next);
  }
  return t;
}

Covariates simulate_info(const ScenarioConfig& cfg, const std::vector<double>& times,
                         std::mt19937_64& rng) {
  const std::size_t n = times.size();
  Covariates c;
  std::vector<double> sign(n);
  std::vector<double> spread(n);
  std::vector<double> duration(n);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution stay(0.5 * (1.0 + cfg.info.sign_autocorr));
  std::normal_distribution<double> z;
  const InfoConfig& in = cfg.info;
  const double sd = std::sqrt(in.spread_var);
  const double innov = sd * std::sqrt(1.0 - in.spread_corr * in.spread_corr);
  double s = in.spread_mean + sd * z(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      sign[i] = coin(rng) ? 1.0 : -1.0;
    } else {
      sign[i] = stay(rng) ? sign[i - 1] : -sign[i - 1];
      s = in.spread_mean + in.spread_corr * (s - in.spread_mean) + innov * z(rng);
    }
    spread[i] = std::max(s, 1e-9);
    const double d = i > 0 ? times[i] - times[i - 1] : (n > 1 ? times[1] - times[0] : cfg.horizon);
    duration[i] = std::max(d, kMinDuration);
  }
  c.sign = std::move(sign);
  c.spread = std::move(spread);
  c.duration = std::move(duration);
  return c;
}

std::vector<double> simulate_noise(const NoiseConfig& cfg, const std::vector<double>& signs,
                                   const std::vector<double>& dx, std::mt19937_64& rng) {
  const std::size_t n = signs.size();
  std::vector<double> eps(n, 0.0);
  std::normal_distribution<double> z;
  switch (cfg.regime) {
    case NoiseRegime::H0: break;
    case NoiseRegime::H1: {
      const double a = std::sqrt(cfg.a2);
      for (double& e : eps) e = a * z(rng);
      break;
    }
    case NoiseRegime::H2: {
      const double scale = std::sqrt(cfg.a2 / 3.0);
      const double nu = cfg.a2;
      for (std::size_t i = 0; i < n; ++i) {
        const double sx = i == 0 || i - 1 >= dx.size() ? 0.0 : (dx[i - 1] > 0.0) - (dx[i - 1] < 0.0);
        const double n1 = z(rng);
        const double n2 = z(rng);
        const double n3 = z(rng);
        const double n4 = z(rng);
        eps[i] = (scale + nu * n1) * (sx * std::abs(n2) + signs[i] * std::abs(n3) + n4);
      }
      break;
    }
  }
  return eps;
}

std::vector<double> default_theta(ModelKind model) {
  switch (model) {
    case ModelKind::Null: return {};
    case ModelKind::Roll: return {1e-4};
    case ModelKind::SignedSpread: return {0.8};
    default: break;
  }
  throw Error(ErrorCode::InvalidConfig, "no default parameter for model " + to_string(model));
}

Simulation simulate_scenario(const ScenarioConfig& cfg) {
  cfg.check();
  const double T = cfg.horizon;
  Simulation sim;
  GroundTruth& truth = sim.truth;
  TickSeries& series = sim.series;

  auto time_rng = stream(cfg.seed, 1);
  auto info_rng = stream(cfg.seed, 2);
  auto price_rng = stream(cfg.seed, 3);
  auto noise_rng = stream(cfg.seed, 4);

  series.horizon = T;
  series.times = simulate_times(cfg, time_rng);
  const std::size_t n_obs = series.times.size();
  series.covariates = simulate_info(cfg, series.times, info_rng);

  // Price jumps and the volatility jump time.
  std::uniform_real_distribution<double> unif(0.0, T);
  std::normal_distribution<double> z;
  truth.vol_jump_time = unif(price_rng);
  std::vector<double> jump_size;
  if (cfg.price.jumps) {
    const double level = cfg.sv.enabled ? cfg.sv.sigma2_bar : cfg.sigma2;
    const double size = cfg.price.jump_size > 0.0 ? cfg.price.jump_size : std::sqrt(T * level);
    std::poisson_distribution<int> count(cfg.price.jumps_per_horizon);
    std::bernoulli_distribution up(0.5);
    const int k = count(price_rng);
    for (int j = 0; j < k; ++j) {
      truth.jump_times.push_back(unif(price_rng));
      jump_size.push_back(up(price_rng) ? size : -size);
    }
    std::vector<std::size_t> order(jump_size.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return truth.jump_times[a] < truth.jump_times[b]; });
    std::vector<double> jt;
    std::vector<double> js;
    for (std::size_t j : order) {
      jt.push_back(truth.jump_times[j]);
      js.push_back(jump_size[j]);
    }
    truth.jump_times = std::move(jt);
    jump_size = std::move(js);
  }

  const bool moving = cfg.sv.enabled || cfg.seasonality.enabled;
  const SvConfig& sv = cfg.sv;
  double v = cfg.sigma2;
  if (sv.enabled) {
    std::gamma_distribution<double> stat(2.0 * sv.alpha * sv.sigma2_bar / (sv.delta * sv.delta),
                                         sv.delta * sv.delta / (2.0 * sv.alpha));
    v = stat(price_rng);
  }
  double y = std::sqrt(v);
  truth.min_sv_variance = v;
  const double rho = sv.leverage;
  const double rho_c = std::sqrt(1.0 - rho * rho);

  truth.efficient.assign(n_obs, 0.0);
  double x = 0.0;
  double t = 0.0;
  std::size_t next_jump = 0;
  auto step = [&](double t_next) {
    const double h = t_next - t;
    if (!(h > 0.0)) return;
    const double su = seasonal_factor(t, truth.vol_jump_time, T, cfg.seasonality);
    const double sig2 = su * su * y * y;
    const double dw = std::sqrt(h) * z(price_rng);
    x += cfg.price.drift * h + std::sqrt(sig2) * dw;
    truth.integrated_variance += sig2 * h;
    truth.quarticity += sig2 * sig2 * h;
    if (sv.enabled) {
      const double dwb = rho * dw + rho_c * std::sqrt(h) * z(price_rng);
      // Drift-implicit square-root step; stays positive when 4 alpha sigma2_bar > delta^2.
      const double b = y + 0.5 * sv.delta * dwb;
      const double c = (sv.alpha * sv.sigma2_bar - 0.25 * sv.delta * sv.delta) * h / 2.0;
      const double k = 1.0 + sv.alpha * h / 2.0;
      y = (b + std::sqrt(std::max(b * b + 4.0 * k * c, 0.0))) / (2.0 * k);
      truth.min_sv_variance = std::min(truth.min_sv_variance, y * y);
    }
    while (next_jump < jump_size.size() && truth.jump_times[next_jump] <= t_next) {
      x += jump_size[next_jump];
      truth.jump_qv += jump_size[next_jump] * jump_size[next_jump];
      ++next_jump;
    }
    t = t_next;
  };

  // Jumps before the first observation are not part of the sample.
  while (next_jump < jump_size.size() && truth.jump_times[next_jump] <= series.times[0]) ++next_jump;
  t = series.times[0];
  // Increments feeding sign(Delta X) in the H2 noise.
  const double sh = cfg.noise.sign_seconds * T / kSecondsPerDay;
  std::vector<double> sign_dx(n_obs > 0 ? n_obs - 1 : 0);
  const double fine_h = T / static_cast<double>(cfg.fine_steps);
  std::size_t k = static_cast<std::size_t>(std::floor(t / fine_h)) + 1;
  auto advance = [&](double target) {
    if (moving) {
      while (k <= cfg.fine_steps && static_cast<double>(k) * fine_h < target) {
        step(static_cast<double>(k) * fine_h);
        ++k;
      }
    }
    step(target);
  };
  for (std::size_t i = 1; i < n_obs; ++i) {
    const double target = series.times[i];
    double anchor = truth.efficient[i - 1];
    if (sh > 0.0 && target - sh > t) {
      advance(target - sh);
      anchor = x;
    }
    advance(target);
    truth.efficient[i] = x;
    sign_dx[i - 1] = x - anchor;
  }
  // Trailing jumps after the last observation are not observed either.
  truth.quadratic_variation = truth.integrated_variance + truth.jump_qv;
  truth.sigma2_bar0 = truth.quadratic_variation / T;

  truth.noise = simulate_noise(cfg.noise, *series.covariates.sign, sign_dx, noise_rng);
  double acc = 0.0;
  for (double e : truth.noise) acc += e * e;
  truth.realized_a2 = n_obs > 0 ? acc / static_cast<double>(n_obs) : 0.0;

  const NoiseModel model = NoiseModel::make(cfg.info.model);
  for (Covariate c : model.required_covariates()) {
    if (!series.covariates.has(c)) {
      throw Error(ErrorCode::InvalidConfig,
                  "the simulator does not generate column " + covariate_name(c));
    }
  }
  truth.theta0 = cfg.info.theta0.empty() ? default_theta(cfg.info.model) : cfg.info.theta0;
  series.prices = truth.efficient;
  if (!model.is_null()) {
    std::vector<Interval> wide(model.dim(), Interval{-1e6, 1e6});
    const auto p = model.with_bounds(wide).phi_path(series, truth.theta0);
    for (std::size_t i = 0; i < n_obs; ++i) series.prices[i] += p[i];
  }
  for (std::size_t i = 0; i < n_obs; ++i) series.prices[i] += truth.noise[i];
  return sim;
}

}  // namespace lobvol
