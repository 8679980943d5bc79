#include "lobvol/avar.hpp"

#include <cmath>
#include <string>

#include "lobvol/errors.hpp"

namespace lobvol {

void TruncationConfig::check() const {
  if (!(omega > 0.0 && omega < 0.5)) throw Error(ErrorCode::InvalidConfig, "omega must lie in (0, 1/2)");
  if (!(alpha0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha0 must be positive");
  if (k_spot == 1) throw Error(ErrorCode::InvalidConfig, "spot window must be at least 2");
}

std::size_t TruncationConfig::window(std::size_t n) const {
  check();
  const std::size_t k =
      k_spot > 0 ? k_spot : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (k < 2 || n <= 2 * k + 2 || 4 * k >= n) {
    throw Error(ErrorCode::WindowTooLarge, "spot window " + std::to_string(k) + " too large for " +
                                               std::to_string(n) + " returns");
  }
  return k;
}

std::vector<double> thresholds(std::span<const double> times, double alpha_tilde, double omega) {
  std::vector<double> u(times.empty() ? 0 : times.size() - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = alpha_tilde * std::pow(times[i + 1] - times[i], omega);
  }
  return u;
}

double v1(std::span<const double> dx, double horizon) {
  const double n = static_cast<double>(dx.size());
  double acc = 0.0;
  for (std::size_t i = 1; i < dx.size(); ++i) acc += dx[i] * dx[i] * dx[i - 1] * dx[i - 1];
  return 4.0 * n / (horizon * horizon) * acc;
}

namespace {

void check_times(std::span<const double> dx, std::span<const double> times) {
  if (times.size() != dx.size() + 1) {
    throw Error(ErrorCode::InvalidSeries, "time grid must have one more entry than the returns");
  }
}

// (1 / (k scale)) sum_{j=i+1}^{i+k} dx_j^2 1{|dx_j| <= u_j}, with i 1-based.
double right_average(std::span<const double> dx, const std::vector<double>& u, std::size_t i,
                     std::size_t k, double scale) {
  double acc = 0.0;
  for (std::size_t j = i + 1; j <= i + k; ++j) {
    const double x = dx[j - 1];
    if (std::abs(x) <= u[j - 1]) acc += x * x;
  }
  return acc / (static_cast<double>(k) * scale);
}

// Shared shape of V2 and V5 once the continuous part is known.
double jump_part(std::span<const double> dx, const std::vector<double>& u, std::size_t k,
                 double scale) {
  const std::size_t n = dx.size();
  double acc = 0.0;
  for (std::size_t i = k + 1; i + k <= n; ++i) {
    const double x = dx[i - 1];
    if (std::abs(x) <= u[i - 1]) continue;
    acc += x * x * (right_average(dx, u, i, k, scale) + right_average(dx, u, i - k - 1, k, scale));
  }
  return acc;
}

}  // namespace

double v2(std::span<const double> dx, std::span<const double> times, double horizon,
          double sigma_exp, const TruncationConfig& cfg) {
  check_times(dx, times);
  const std::size_t n = dx.size();
  const std::size_t k = cfg.window(n);
  const double delta = horizon / static_cast<double>(n);
  const auto u = thresholds(times, cfg.alpha0 * sigma_exp, cfg.omega);
  double cont = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(dx[i]) <= u[i] && std::abs(dx[i - 1]) <= u[i - 1]) {
      cont += dx[i] * dx[i] * dx[i - 1] * dx[i - 1];
    }
  }
  return 4.0 / horizon * (cont / delta + jump_part(dx, u, k, delta));
}

double spot_sigma2alpha(std::span<const double> dx, std::span<const double> times, double horizon,
                        std::size_t i, Side side, double sigma_exp, const TruncationConfig& cfg) {
  check_times(dx, times);
  const std::size_t n = dx.size();
  const std::size_t k = cfg.window(n);
  const double delta = horizon / static_cast<double>(n);
  std::size_t start = i;
  if (side == Side::Left) {
    if (i < k + 1) throw Error(ErrorCode::WindowTooLarge, "left window starts before the sample");
    start = i - k - 1;
  }
  if (start + k > n) throw Error(ErrorCode::WindowTooLarge, "right window ends after the sample");
  const auto u = thresholds(times, cfg.alpha0 * sigma_exp, cfg.omega);
  return right_average(dx, u, start, k, delta);
}

double v3(double sigma2_exp) { return 4.0 * sigma2_exp * sigma2_exp; }

double v4(std::span<const double> dx, double horizon) {
  const double n = static_cast<double>(dx.size());
  double acc = 0.0;
  for (double x : dx) acc += x * x * x * x;
  return 4.0 * n / (3.0 * horizon * horizon) * acc;
}

double v5(std::span<const double> dx, double horizon, double sigma_exp,
          const TruncationConfig& cfg) {
  const std::size_t n = dx.size();
  const std::size_t k = cfg.window(n);
  const double delta = horizon / static_cast<double>(n);
  const std::vector<double> u(n, cfg.alpha0 * sigma_exp * std::pow(delta, cfg.omega));
  double cont = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dx[i]) <= u[i]) cont += dx[i] * dx[i] * dx[i] * dx[i];
  }
  return 4.0 / horizon * (cont / (3.0 * delta) + jump_part(dx, u, k, delta));
}

}  // namespace lobvol
