#include <gtest/gtest.h>

#include <numbers>

#include "lobvol/errors.hpp"
#include "lobvol/likelihood.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lobvol;
using namespace lobvol::testing;

TEST(Kernel, DiagonalCase) {
  const MA1Kernel k(7, 0.5, 0.0);
  for (std::size_t i = 1; i <= 7; ++i) {
    for (std::size_t j = 1; j <= 7; ++j) EXPECT_DOUBLE_EQ(omega_inv_coeff(k, i, j), i == j ? 2.0 : 0.0);
  }
  const std::vector<double> v{1, -2, 3, 0, 1, 1, 2};
  EXPECT_DOUBLE_EQ(quadform(k, v), 20.0 / 0.5);
  EXPECT_NEAR(logdet(k), 7.0 * std::log(0.5), 1e-14);
  EXPECT_EQ(quadform(k, std::vector<double>(7, 0.0)), 0.0);
}

TEST(Kernel, TwoByTwo) {
  const MA1Kernel k(2, 1.0, 1.0);
  EXPECT_NEAR(omega_inv_coeff(k, 1, 1), 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(omega_inv_coeff(k, 1, 2), 1.0 / 8.0, 1e-15);
  EXPECT_NEAR(logdet(k), std::log(8.0), 1e-15);
}

TEST(Kernel, Inadmissible) {
  for (auto [s, a2] : {std::pair{0.0, 0.1}, std::pair{1.0, -0.25}, std::pair{1.0, -1.0}}) {
    try {
      MA1Kernel k(5, s, a2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::IndefiniteKernel);
    }
  }
}

TEST(Kernel, DenseOracleSweep) {
  std::mt19937_64 rng(2024);
  for (std::size_t n = 1; n <= 60; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto [s, a2] = random_kernel(rng);
      const auto e = kernel_errors(n, s, a2, rng);
      ASSERT_LE(e.coeff_rel, 1e-8) << "n=" << n << " s=" << s << " a2=" << a2;
      ASSERT_LE(e.quad_rel, 1e-9) << "n=" << n;
      ASSERT_LE(e.logdet_abs, 1e-9) << "n=" << n;
      ASSERT_LE(e.solve_rel, 1e-9) << "n=" << n;
      ASSERT_LE(e.phi_gamma, 1e-12) << "n=" << n;
    }
  }
}

TEST(Kernel, LargeQuadformAgainstClosedForm) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  const std::size_t n = 200;
  const MA1Kernel k(n, 0.7, 0.4);
  std::vector<double> v(n);
  for (double& x : v) x = z(rng);
  double ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) ref += v[i] * omega_inv_coeff(k, i + 1, j + 1) * v[j];
  }
  EXPECT_NEAR(quadform(k, v), ref, 1e-9 * std::fabs(ref));
}

TEST(ByPart, Identities) {
  std::mt19937_64 rng(31);
  for (std::size_t n = 1; n <= 30; ++n) {
    const auto [direct, sides] = bypart_errors(n, rng);
    EXPECT_LE(direct, 1e-12);
    EXPECT_LE(sides, 1e-12);
  }
  std::vector<double> eye(25, 0.0);
  for (int i = 0; i < 5; ++i) eye[i * 5 + i] = 1.0;
  const std::vector<double> c(6, 2.5), y{0, 1, 3, 2, 2, 5};
  const auto flat = bypart_transform(eye, 5, c, c);
  EXPECT_EQ(flat.lhs, 0.0);
  EXPECT_NEAR(flat.rhs, 0.0, 1e-12);
  const auto id = bypart_transform(eye, 5, y, y);
  EXPECT_DOUBLE_EQ(id.lhs, 1 + 4 + 1 + 0 + 9);
  EXPECT_NEAR(id.rhs, 15.0, 1e-12);
}

namespace {

TickSeries roll_series(std::size_t n, std::uint64_t seed) {
  auto s = brownian_series(n, 1.0 / 252.0, 0.1, seed);
  std::mt19937_64 rng(seed + 1);
  std::bernoulli_distribution b(0.5);
  s.covariates.sign.emplace();
  for (std::size_t i = 0; i <= n; ++i) {
    const double sign = b(rng) ? 1.0 : -1.0;
    s.covariates.sign->push_back(sign);
    s.prices[i] += 1e-4 * sign;
  }
  return s;
}

}  // namespace

TEST(Loglik, ZeroResidual) {
  TickSeries s;
  s.horizon = 1.0;
  s.covariates.sign = std::vector<double>{1, -1, 1, 1, -1};
  for (int i = 0; i < 5; ++i) {
    s.times.push_back(i / 5.0);
    s.prices.push_back(2e-4 * (*s.covariates.sign)[i]);
  }
  const auto roll = NoiseModel::make(ModelKind::Roll);
  const std::vector<double> th{2e-4};
  const double sigma2 = 0.3;
  const double expect = -2.0 * std::log(2.0 * std::numbers::pi * sigma2 * 0.25);
  EXPECT_NEAR(loglik_exp(s, roll, sigma2, th), expect, 1e-12);
}

TEST(Loglik, DirectFormulaOracle) {
  const auto s = roll_series(100, 5);
  const auto roll = NoiseModel::make(ModelKind::Roll);
  const std::vector<double> th{0.8e-4};
  const double sigma2 = 0.12;
  const auto r = residuals(s, roll, th);
  const double d = s.horizon / 100.0;
  double ref = 0.0;
  for (double x : r) ref += -0.5 * std::log(2.0 * std::numbers::pi * sigma2 * d) - x * x / (2.0 * sigma2 * d);
  EXPECT_NEAR(loglik_exp(s, roll, sigma2, th), ref, 1e-10 * std::fabs(ref));
  EXPECT_NEAR(loglik_err(s, roll, sigma2, th, 0.0), loglik_exp(s, roll, sigma2, th),
              1e-12 * std::fabs(ref));
}

TEST(Loglik, DenseGaussianOracle) {
  const auto s = roll_series(50, 6);
  const auto roll = NoiseModel::make(ModelKind::Roll);
  const std::vector<double> th{1.1e-4};
  const double sigma2 = 0.09, a2 = 3e-9;
  const auto r = residuals(s, roll, th);
  const Eigen::MatrixXd om = dense_omega(50, sigma2 * s.horizon / 50.0, a2);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(r.data(), 50);
  const double ref = -0.5 * std::log(om.determinant()) - 25.0 * std::log(2.0 * std::numbers::pi) -
                     0.5 * v.dot(om.ldlt().solve(v));
  EXPECT_NEAR(loglik_err(s, roll, sigma2, th, a2), ref, 1e-8);
}

TEST(Loglik, NullModelUsesRawReturns) {
  const auto s = roll_series(40, 7);
  const NoiseModel null;
  const auto y = returns(s).values;
  const MA1Kernel k(40, 0.1 * s.horizon / 40.0, 2e-9);
  const double ref = -0.5 * k.logdet() - 20.0 * std::log(2.0 * std::numbers::pi) - 0.5 * k.quadform(y);
  EXPECT_NEAR(loglik_err(s, null, 0.1, {}, 2e-9), ref, 1e-10);
}

TEST(Loglik, ContinuousAcrossZeroNoise) {
  const auto s = roll_series(300, 8);
  const auto roll = NoiseModel::make(ModelKind::Roll);
  const std::vector<double> th{1e-4};
  const double l0 = loglik_err(s, roll, 0.1, th, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-12, 1e-14, 1e-16, 1e-18}) {
    const double gap = std::max(std::fabs(loglik_err(s, roll, 0.1, th, eps) - l0),
                                std::fabs(loglik_err(s, roll, 0.1, th, -eps) - l0));
    EXPECT_LE(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-6);
}
