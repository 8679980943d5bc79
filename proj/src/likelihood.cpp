#include "lobvol/likelihood.hpp"

#include <cmath>
#include <string>

#include "lobvol/errors.hpp"

namespace lobvol {

MA1Kernel::MA1Kernel(std::size_t n, double s, double a2) : n_(n), s_(s), a2_(a2) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::IndefiniteKernel, "diffusion mass must be positive");
  }
  if (!(a2 > -0.25 * s) || !std::isfinite(a2)) {
    throw Error(ErrorCode::IndefiniteKernel, "noise variance below -s/4");
  }
  const double root = std::sqrt(s * (s + 4.0 * a2));
  // 1 - (root - s) / (2 a2) rewritten without cancellation; gives 0 at a2 = 0.
  phi_ = 1.0 - 2.0 * s / (root + s);
  gamma2_ = 0.5 * (2.0 * a2 + s + root);

  pivots_.resize(n);
  const double diag = s + 2.0 * a2;
  const double a4 = a2 * a2;
  double p = diag;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) p = diag - a4 / p;
    if (!(p > 0.0)) {
      throw Error(ErrorCode::IndefiniteKernel, "non-positive pivot at " + std::to_string(k));
    }
    pivots_[k] = p;
    logdet_ += std::log(p);
  }
}

std::vector<double> MA1Kernel::whiten(std::span<const double> v) const {
  if (v.size() != n_) throw Error(ErrorCode::InvalidSeries, "vector length does not match kernel");
  std::vector<double> w(n_);
  double prev = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    const double wk = k == 0 ? v[0] : v[k] + (a2_ / pivots_[k - 1]) * prev;
    w[k] = wk;
    prev = wk;
  }
  return w;
}

double MA1Kernel::quadform(std::span<const double> v) const {
  const auto w = whiten(v);
  double q = 0.0;
  for (std::size_t k = 0; k < n_; ++k) q += w[k] * w[k] / pivots_[k];
  return q;
}

double MA1Kernel::bilinear(std::span<const double> u, std::span<const double> v) const {
  const auto wu = whiten(u);
  const auto wv = whiten(v);
  double q = 0.0;
  for (std::size_t k = 0; k < n_; ++k) q += wu[k] * wv[k] / pivots_[k];
  return q;
}

std::vector<double> MA1Kernel::solve(std::span<const double> v) const {
  auto x = whiten(v);
  if (n_ == 0) return x;
  x[n_ - 1] /= pivots_[n_ - 1];
  for (std::size_t k = n_ - 1; k-- > 0;) {
    x[k] = x[k] / pivots_[k] + (a2_ / pivots_[k]) * x[k + 1];
  }
  return x;
}

double MA1Kernel::logdet() const { return logdet_; }

double omega_inv_coeff(const MA1Kernel& kernel, std::size_t i, std::size_t j) {
  const std::size_t n = kernel.size();
  if (i < 1 || j < 1 || i > n || j > n) {
    throw Error(ErrorCode::OutOfBounds, "omega index outside 1..N");
  }
  if (kernel.a2() == 0.0) return i == j ? 1.0 / kernel.s() : 0.0;
  const double f = kernel.phi_tilde();
  const double g2 = kernel.gamma2();
  const double di = static_cast<double>(i);
  const double dj = static_cast<double>(j);
  const double dn = static_cast<double>(n);
  const double d = std::abs(di - dj);
  const double num = std::pow(f, d) - std::pow(f, di + dj) - std::pow(f, 2.0 * dn - di - dj + 2.0) +
                     std::pow(f, 2.0 * dn - d + 2.0);
  return num / (g2 * (1.0 - f * f) * (1.0 - std::pow(f, 2.0 * dn + 2.0)));
}

double quadform(const MA1Kernel& kernel, std::span<const double> v) { return kernel.quadform(v); }
double logdet(const MA1Kernel& kernel) { return kernel.logdet(); }

std::vector<double> residuals(const TickSeries& series, const NoiseModel& model,
                              std::span<const double> theta) {
  auto y = returns(series).values;
  if (model.is_null()) return y;
  const auto m = mu(model, series, theta);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= m[i];
  return y;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::OutOfBounds, "sigma^2 must be positive");
  }
}

}  // namespace

double loglik_exp(const TickSeries& series, const NoiseModel& model, double sigma2,
                  std::span<const double> theta) {
  check_sigma2(sigma2);
  const auto r = residuals(series, model, theta);
  const double n = static_cast<double>(r.size());
  const double s = sigma2 * series.horizon / n;
  double rss = 0.0;
  for (double x : r) rss += x * x;
  return -0.5 * n * std::log(s) - 0.5 * n * kLog2Pi - rss / (2.0 * s);
}

double loglik_err(const TickSeries& series, const NoiseModel& model, double sigma2,
                  std::span<const double> theta, double a2) {
  check_sigma2(sigma2);
  const auto r = residuals(series, model, theta);
  const double n = static_cast<double>(r.size());
  const MA1Kernel k(r.size(), sigma2 * series.horizon / n, a2);
  return -0.5 * k.logdet() - 0.5 * n * kLog2Pi - 0.5 * k.quadform(r);
}

ByPartSides bypart_transform(std::span<const double> a, std::size_t n, std::span<const double> y,
                             std::span<const double> z) {
  if (a.size() != n * n || y.size() != n + 1 || z.size() != n + 1) {
    throw Error(ErrorCode::InvalidSeries, "bypart_transform: inconsistent sizes");
  }
  // Coefficients indexed 1..N, zero elsewhere.
  auto at = [&](std::size_t i, std::size_t j) -> double {
    if (i < 1 || j < 1 || i > n || j > n) return 0.0;
    return a[(i - 1) * n + (j - 1)];
  };
  ByPartSides out{0.0, 0.0};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      out.lhs += (y[i] - y[i - 1]) * at(i, j) * (z[j] - z[j - 1]);
    }
  }
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double dd = at(i + 1, j + 1) - at(i, j + 1) - at(i + 1, j) + at(i, j);
      out.rhs += y[i] * dd * z[j];
    }
  }
  return out;
}

}  // namespace lobvol
