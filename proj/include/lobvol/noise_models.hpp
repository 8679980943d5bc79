#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lobvol/core_data.hpp"

namespace lobvol {

enum class ModelKind {
  Null,
  Roll,
  GlostenHarris,
  SignedTimestamp,
  SignedSpread,
  SignedQuotedDepth,
  OrderFlowImbalance,
  NLSignedSpread,
  General,
  Composite,  // user-built sum of catalogue models
};

// One additive piece of phi carrying exactly one parameter.
enum class Term {
  Sign,             // I * th
  SignVolume,       // I * V * th
  SignInvDuration,  // I * th / D
  SignHalfSpread,   // I * S * th / 2
  SignSpread,       // I * S * th
  SignDepth,        // I * QD * th
  Ofi,              // OFI * th
  NLSignedSpread,   // I * S th / (1 + S th)
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Log-price tick used for the default level-scale parameter box.
inline constexpr double kDefaultTick = 1e-4;
// Durations are floored here before inversion.
inline constexpr double kMinDuration = 1e-9;

// Parametric explicative part phi(Q_i, theta) of the microstructure noise.
// Every model is a sum of one-parameter terms, so dim() equals the number of
// terms and composition is concatenation.
class NoiseModel {
 public:
  NoiseModel() = default;  // Null model

  static NoiseModel make(ModelKind kind);
  // Accepts kebab-case names: null, roll, glosten-harris, signed-timestamp,
  // signed-spread, signed-quoted-depth, ofi, nl-signed-spread, general.
  // "a+b" composes catalogue models.
  static NoiseModel from_name(std::string_view name);
  static NoiseModel combine(const std::vector<NoiseModel>& parts);

  ModelKind kind() const { return kind_; }
  std::string name() const;
  std::size_t dim() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_linear() const;
  bool is_null() const { return terms_.empty(); }
  std::vector<Covariate> required_covariates() const;

  const std::vector<Interval>& bounds() const { return bounds_; }
  NoiseModel with_bounds(std::vector<Interval> bounds) const;
  bool in_bounds(std::span<const double> theta) const;

  // A parameter value for which phi vanishes identically.
  std::vector<double> zero_theta() const { return std::vector<double>(dim(), 0.0); }

  double phi(const LobRecord& q, std::span<const double> theta) const;
  std::vector<double> phi_grad(const LobRecord& q, std::span<const double> theta) const;

  // Throws MissingCovariate when the series lacks a column this model reads.
  void check_covariates(const TickSeries& series) const;

  // phi(Q_i, theta) for i = 0..N.
  std::vector<double> phi_path(const TickSeries& series, std::span<const double> theta) const;
  // Columns d phi / d theta_k along the series, i = 0..N.
  std::vector<std::vector<double>> grad_path(const TickSeries& series,
                                             std::span<const double> theta) const;

 private:
  NoiseModel(ModelKind kind, std::vector<Term> terms);
  void check_theta(std::span<const double> theta) const;

  ModelKind kind_ = ModelKind::Null;
  std::vector<Term> terms_;
  std::vector<Interval> bounds_;
  std::string label_;
};

std::string to_string(ModelKind kind);

double phi(const NoiseModel& model, const LobRecord& q, std::span<const double> theta);
std::vector<double> phi_grad(const NoiseModel& model, const LobRecord& q,
                             std::span<const double> theta);
// mu_i(theta) = phi(Q_i, theta) - phi(Q_{i-1}, theta), i = 1..N.
std::vector<double> mu(const NoiseModel& model, const TickSeries& series,
                       std::span<const double> theta);

}  // namespace lobvol
