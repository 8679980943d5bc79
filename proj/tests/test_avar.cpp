#include <gtest/gtest.h>

#include <numbers>

#include "lobvol/avar.hpp"
#include "lobvol/core_data.hpp"
#include "lobvol/errors.hpp"
#include "test_util.hpp"

using namespace lobvol;
using namespace lobvol::testing;

namespace {

constexpr double kT = 1.0 / 252.0;
constexpr double kSigma2 = 0.1;

struct Path {
  std::vector<double> dx;
  std::vector<double> times;
};

Path brownian_returns(std::size_t n, std::uint64_t seed, double jump = 0.0) {
  const auto s = brownian_series(n, kT, kSigma2, seed);
  Path p{returns(s).values, s.times};
  if (jump != 0.0) p.dx[n / 2] += jump;
  return p;
}

double sigma_exp(const std::vector<double>& dx) {
  double rv = 0.0;
  for (double x : dx) rv += x * x;
  return std::sqrt(rv / kT);
}

}  // namespace

TEST(V1, Examples) {
  EXPECT_EQ(v1(std::vector<double>(5, 0.0), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(v1(std::vector<double>{1, 1, 1}, 1.0), 24.0);
}

TEST(V1, ConstantVolatilityLimit) {
  std::vector<double> rel;
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = brownian_returns(23400, 100 + rep);
    rel.push_back(std::fabs(v1(p.dx, kT) / (4.0 * kSigma2 * kSigma2) - 1.0));
  }
  EXPECT_LT(median(rel), 0.10);
}

TEST(V1, LargeNoiseGrowsLikeNSquared) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z;
  std::vector<double> scaled;
  for (std::size_t n : {2925u, 5850u, 11700u, 23400u}) {
    auto s = brownian_series(n, kT, kSigma2, 78 + n);
    for (double& x : s.prices) x += 1e-3 * z(rng);
    const auto dx = returns(s).values;
    scaled.push_back(v1(dx, kT) / (static_cast<double>(n) * n));
  }
  for (std::size_t i = 1; i < scaled.size(); ++i) {
    EXPECT_LT(scaled[i] / scaled[i - 1], 2.0);
    EXPECT_GT(scaled[i] / scaled[i - 1], 0.5);
  }
}

TEST(V2, Zeros) {
  const auto p = brownian_returns(400, 1);
  EXPECT_EQ(v2(std::vector<double>(400, 0.0), p.times, kT, 0.3), 0.0);
}

TEST(V2, WithoutExceedancesIsV1) {
  const auto p = brownian_returns(10000, 2);
  EXPECT_NEAR(v2(p.dx, p.times, kT, 1e6), v1(p.dx, kT), 1e-12 * v1(p.dx, kT));
}

TEST(V2, AgreesWithV1OnRegularGrid) {
  const auto p = brownian_returns(23400, 3);
  const double a = v2(p.dx, p.times, kT, sigma_exp(p.dx));
  const double b = v1(p.dx, kT);
  EXPECT_NEAR(a, b, 0.05 * b);
}

TEST(V2, JumpContribution) {
  const double jump = std::sqrt(kT * kSigma2);
  const double expect = 4.0 / kT * jump * jump * 2.0 * kSigma2;
  std::vector<double> rel;
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = brownian_returns(23400, 200 + rep, jump);
    const auto q = brownian_returns(23400, 200 + rep);
    const double se = sigma_exp(p.dx);
    const double part = v2(p.dx, p.times, kT, se) - v2(q.dx, q.times, kT, se);
    rel.push_back(std::fabs(part / expect - 1.0));
  }
  EXPECT_LT(median(rel), 0.25);
}

TEST(Spot, Zeros) {
  const auto p = brownian_returns(400, 4);
  EXPECT_EQ(spot_sigma2alpha(std::vector<double>(400, 0.0), p.times, kT, 50, Side::Right, 0.3), 0.0);
}

TEST(Spot, LocalAverage) {
  const std::size_t n = 23400;
  const auto k = TruncationConfig{}.window(n);
  int inside = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = brownian_returns(n, 500 + rep);
    const double v = spot_sigma2alpha(p.dx, p.times, kT, n / 3, Side::Right, sigma_exp(p.dx));
    if (std::fabs(v - kSigma2) < 3.0 * std::sqrt(2.0 / k) * kSigma2) ++inside;
  }
  EXPECT_GE(inside, 95);
}

TEST(Spot, LeftIsShiftedRight) {
  const std::size_t n = 2500;
  const auto p = brownian_returns(n, 5);
  const std::size_t k = TruncationConfig{}.window(n);
  const double se = sigma_exp(p.dx);
  for (std::size_t i : {k + 1, n / 2, n - k}) {
    EXPECT_EQ(spot_sigma2alpha(p.dx, p.times, kT, i, Side::Left, se),
              spot_sigma2alpha(p.dx, p.times, kT, i - k - 1, Side::Right, se));
  }
}

TEST(V3, Examples) {
  EXPECT_EQ(v3(0.0), 0.0);
  EXPECT_NEAR(v3(0.1), 0.04, 1e-17);
}

TEST(V3, MatchesV1OnConstantVolatility) {
  std::vector<double> a, b;
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = brownian_returns(23400, 700 + rep);
    const double se = sigma_exp(p.dx);
    a.push_back(v3(se * se));
    b.push_back(v1(p.dx, kT));
  }
  // v1 has relative sd about sqrt(35 / N) here; the mean gap must sit well inside it.
  EXPECT_NEAR(mean(a), mean(b), 3.0 * std::sqrt(variance(b) / 50.0) + 0.01 * mean(a));
}

TEST(V4, Examples) {
  EXPECT_EQ(v4(std::vector<double>(3, 0.0), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(v4(std::vector<double>{1, 1}, 1.0), 16.0 / 3.0);
}

TEST(V4, TimeVaryingVolatility) {
  const std::size_t n = 23400;
  const double dt = kT / n;
  auto sig2 = [&](double t) { return kSigma2 * (1.0 + 0.6 * std::sin(2.0 * std::numbers::pi * t / kT)); };
  double quarticity = 0.0;
  for (std::size_t i = 0; i < n; ++i) quarticity += std::pow(sig2((i + 0.5) * dt), 2) * dt;
  const double expect = 4.0 / kT * quarticity;
  std::vector<double> rel;
  for (int rep = 0; rep < 100; ++rep) {
    std::mt19937_64 rng(900 + rep);
    std::normal_distribution<double> z;
    std::vector<double> dx(n);
    for (std::size_t i = 0; i < n; ++i) dx[i] = std::sqrt(sig2((i + 0.5) * dt) * dt) * z(rng);
    rel.push_back(std::fabs(v4(dx, kT) / expect - 1.0));
  }
  EXPECT_LT(median(rel), 0.10);
}

TEST(V5, Zeros) { EXPECT_EQ(v5(std::vector<double>(400, 0.0), kT, 0.3), 0.0); }

TEST(V5, WithoutExceedancesIsV4) {
  const auto p = brownian_returns(10000, 6);
  EXPECT_NEAR(v5(p.dx, kT, 1e6), v4(p.dx, kT), 1e-12 * v4(p.dx, kT));
}

TEST(V5, JumpContribution) {
  const double jump = std::sqrt(kT * kSigma2);
  const double expect = 4.0 / kT * jump * jump * 2.0 * kSigma2;
  std::vector<double> rel;
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = brownian_returns(23400, 1200 + rep, jump);
    const auto q = brownian_returns(23400, 1200 + rep);
    const double se = sigma_exp(p.dx);
    rel.push_back(std::fabs((v5(p.dx, kT, se) - v5(q.dx, kT, se)) / expect - 1.0));
  }
  EXPECT_LT(median(rel), 0.25);
}

TEST(Avar, NonNegative) {
  std::mt19937_64 rng(42);
  std::student_t_distribution<double> heavy(2.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 100 + rep * 7;
    std::vector<double> dx(n), times(n + 1);
    std::uniform_real_distribution<double> gap(0.1, 2.0);
    for (std::size_t i = 1; i <= n; ++i) times[i] = times[i - 1] + gap(rng);
    for (double& x : dx) x = 1e-3 * heavy(rng);
    const double T = times.back();
    const double se = sigma_exp(dx);
    EXPECT_GE(v1(dx, T), 0.0);
    EXPECT_GE(v2(dx, times, T, se), 0.0);
    EXPECT_GE(v4(dx, T), 0.0);
    EXPECT_GE(v5(dx, T, se), 0.0);
  }
}

TEST(Truncation, Window) {
  EXPECT_EQ(TruncationConfig{}.window(23400), 152u);
  TruncationConfig c;
  c.k_spot = 10;
  EXPECT_EQ(c.window(100), 10u);
  for (std::size_t n : {22u, 40u}) {
    try {
      c.window(n);
      FAIL() << n;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::WindowTooLarge);
    }
  }
  c.omega = 0.6;
  EXPECT_THROW(c.check(), Error);
}

TEST(Truncation, Thresholds) {
  const std::vector<double> t{0.0, 0.25, 1.25};
  const auto u = thresholds(t, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(u[0], 1.0);
  EXPECT_DOUBLE_EQ(u[1], 2.0);
}
