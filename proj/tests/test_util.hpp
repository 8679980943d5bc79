#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lobvol/core_data.hpp"

namespace lobvol::testing {

// Kolmogorov-Smirnov p-value of sample against a continuous CDF, using the
// asymptotic Kolmogorov law with Stephens' small-sample correction.
inline double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double root = std::sqrt(n);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  double q = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    q += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline double lag1_autocorr(const std::vector<double>& v) {
  const double m = mean(v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    den += (v[i] - m) * (v[i] - m);
    if (i > 0) num += (v[i] - m) * (v[i - 1] - m);
  }
  return num / den;
}

// Driftless Brownian log-prices on a regular grid of n returns over [0, T].
inline TickSeries brownian_series(std::size_t n, double horizon, double sigma2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  TickSeries s;
  s.horizon = horizon;
  const double dt = horizon / static_cast<double>(n);
  double x = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    s.times.push_back(dt * static_cast<double>(i));
    s.prices.push_back(x);
    x += std::sqrt(sigma2 * dt) * z(rng);
  }
  return s;
}

// Asymptotic sd of the Gaussian MLE of a^2 for returns with spectral density
// s + 2 a^2 (1 - cos l), from the Whittle information of (s, a^2).
inline double ma1_a2_sd(double s, double a2, std::size_t n) {
  const int m = 20000;
  double i11 = 0.0, i12 = 0.0, i22 = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double l = M_PI * k / m, w = (k == 0 || k == m) ? 0.5 : 1.0;
    const double d = 2.0 * (1.0 - std::cos(l)), f = s + a2 * d;
    i11 += w / (f * f);
    i12 += w * d / (f * f);
    i22 += w * d * d / (f * f);
  }
  const double c = static_cast<double>(n) / (2.0 * m);
  i11 *= c, i12 *= c, i22 *= c;
  return std::sqrt(i11 / (i11 * i22 - i12 * i12));
}

}  // namespace lobvol::testing
