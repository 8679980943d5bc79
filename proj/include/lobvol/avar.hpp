#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lobvol {

// Truncation and spot-window tuning shared by V2 and V5.
struct TruncationConfig {
  double omega = 0.48;   // threshold exponent, in (0, 1/2)
  double alpha0 = 4.0;   // alpha~ = alpha0 * sigma^_exp
  std::size_t k_spot = 0;  // spot window; 0 means floor(sqrt(N))

  // Throws InvalidConfig on an inadmissible omega or alpha0.
  void check() const;
  // Window for a sample of n returns; throws WindowTooLarge unless
  // n > 2k + 2 and 4k < n.
  std::size_t window(std::size_t n) const;
};

// u_i = alpha~ (t_i - t_{i-1})^omega for each return.
std::vector<double> thresholds(std::span<const double> times, double alpha_tilde, double omega);

// (4N / T^2) sum_{i>=2} dx_i^2 dx_{i-1}^2.
double v1(std::span<const double> dx, double horizon);

// Truncated bipower part plus detected jumps weighted by one-sided spot
// sigma^2 alpha estimates. times has dx.size() + 1 entries.
double v2(std::span<const double> dx, std::span<const double> times, double horizon,
          double sigma_exp, const TruncationConfig& cfg = {});

enum class Side { Right, Left };

// One-sided truncated local average around return i (1-based).
// Left at i is Right at i - k - 1.
double spot_sigma2alpha(std::span<const double> dx, std::span<const double> times, double horizon,
                        std::size_t i, Side side, double sigma_exp,
                        const TruncationConfig& cfg = {});

double v3(double sigma2_exp);

// (4n / (3 T^2)) sum dx_i^4.
double v4(std::span<const double> dx, double horizon);

// Truncated quarticity plus jump term with spot variances on windows of k.
double v5(std::span<const double> dx, double horizon, double sigma_exp,
          const TruncationConfig& cfg = {});

}  // namespace lobvol
