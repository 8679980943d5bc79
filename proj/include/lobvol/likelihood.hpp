#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lobvol/core_data.hpp"
#include "lobvol/noise_models.hpp"

namespace lobvol {

// Covariance of the MA(1) return vector: the N x N tridiagonal Toeplitz matrix
// with s + 2a^2 on the diagonal and -a^2 next to it.
class MA1Kernel {
 public:
  // Throws IndefiniteKernel unless s > 0 and a2 > -s/4.
  MA1Kernel(std::size_t n, double s, double a2);

  std::size_t size() const { return n_; }
  double s() const { return s_; }
  double a2() const { return a2_; }
  // MA coefficient phi~ and innovation variance gamma^2 with
  // gamma^2 (1 - phi~)^2 = s and gamma^2 phi~ = a^2.
  double phi_tilde() const { return phi_; }
  double gamma2() const { return gamma2_; }

  double quadform(std::span<const double> v) const;
  // u' Omega^{-1} v.
  double bilinear(std::span<const double> u, std::span<const double> v) const;
  std::vector<double> solve(std::span<const double> v) const;
  double logdet() const;

  // Whitened vector w with v' Omega^{-1} v = sum_k w_k^2 / p_k, where p are
  // the LDL' pivots.
  std::vector<double> whiten(std::span<const double> v) const;
  const std::vector<double>& pivots() const { return pivots_; }

 private:

  std::size_t n_;
  double s_;
  double a2_;
  double phi_ = 0.0;
  double gamma2_ = 0.0;
  std::vector<double> pivots_;
  double logdet_ = 0.0;
};

// Entry (i, j), 1-based, of Omega^{-1} from its closed form. O(1) per entry;
// meant as an oracle.
double omega_inv_coeff(const MA1Kernel& kernel, std::size_t i, std::size_t j);

double quadform(const MA1Kernel& kernel, std::span<const double> v);
double logdet(const MA1Kernel& kernel);

// Ytilde(theta) = Y - mu(theta).
std::vector<double> residuals(const TickSeries& series, const NoiseModel& model,
                              std::span<const double> theta);

double loglik_exp(const TickSeries& series, const NoiseModel& model, double sigma2,
                  std::span<const double> theta);
double loglik_err(const TickSeries& series, const NoiseModel& model, double sigma2,
                  std::span<const double> theta, double a2);

struct ByPartSides {
  double lhs;  // (Delta y)' A (Delta z)
  double rhs;  // y' A_ddot z
};

// A is N x N row-major; y and z have N + 1 entries.
ByPartSides bypart_transform(std::span<const double> a, std::size_t n,
                             std::span<const double> y, std::span<const double> z);

}  // namespace lobvol
