#include "lobvol/core_data.hpp"

#include <cmath>
#include <utility>

#include "lobvol/errors.hpp"

namespace lobvol {

std::string covariate_name(Covariate c) {
  switch (c) {
    case Covariate::Sign: return "I";
    case Covariate::Volume: return "V";
    case Covariate::Duration: return "D";
    case Covariate::Spread: return "S";
    case Covariate::Depth: return "QD";
    case Covariate::Ofi: return "OFI";
  }
  return "?";
}

std::optional<double> LobRecord::get(Covariate c) const {
  switch (c) {
    case Covariate::Sign: return sign;
    case Covariate::Volume: return volume;
    case Covariate::Duration: return duration;
    case Covariate::Spread: return spread;
    case Covariate::Depth: return depth;
    case Covariate::Ofi: return ofi;
  }
  return std::nullopt;
}

const std::optional<std::vector<double>>& Covariates::column(Covariate c) const {
  switch (c) {
    case Covariate::Sign: return sign;
    case Covariate::Volume: return volume;
    case Covariate::Duration: return duration;
    case Covariate::Spread: return spread;
    case Covariate::Depth: return depth;
    case Covariate::Ofi: return ofi;
  }
  return sign;
}

std::optional<std::vector<double>>& Covariates::column(Covariate c) {
  return const_cast<std::optional<std::vector<double>>&>(std::as_const(*this).column(c));
}

LobRecord Covariates::at(std::size_t i) const {
  auto pick = [i](const std::optional<std::vector<double>>& col) -> std::optional<double> {
    if (!col || i >= col->size()) return std::nullopt;
    return (*col)[i];
  };
  return LobRecord{pick(sign), pick(volume), pick(duration), pick(spread), pick(depth), pick(ofi)};
}

std::string to_string(const Violation& v) {
  const char* name = "";
  switch (v.rule) {
    case ViolationRule::TooFewObservations: name = "TooFewObservations"; break;
    case ViolationRule::LengthMismatch: name = "LengthMismatch"; break;
    case ViolationRule::NonPositiveHorizon: name = "NonPositiveHorizon"; break;
    case ViolationRule::NegativeStartTime: name = "NegativeStartTime"; break;
    case ViolationRule::TimeBeyondHorizon: name = "TimeBeyondHorizon"; break;
    case ViolationRule::NonMonotoneTime: name = "NonMonotoneTime"; break;
    case ViolationRule::NonFiniteValue: name = "NonFiniteValue"; break;
    case ViolationRule::CovariateLength: name = "CovariateLength"; break;
    case ViolationRule::InvalidTradeSign: name = "InvalidTradeSign"; break;
    case ViolationRule::NegativeVolume: name = "NegativeVolume"; break;
    case ViolationRule::NonPositiveDuration: name = "NonPositiveDuration"; break;
    case ViolationRule::NonPositiveSpread: name = "NonPositiveSpread"; break;
    case ViolationRule::NegativeDepth: name = "NegativeDepth"; break;
  }
  return std::string(name) + "@" + std::to_string(v.index);
}

namespace {

void check_column(const std::optional<std::vector<double>>& col, std::size_t n, ViolationRule rule,
                  bool (*ok)(double), std::vector<Violation>& out) {
  if (!col) return;
  if (col->size() != n) {
    out.push_back({ViolationRule::CovariateLength, col->size()});
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (*col)[i];
    if (!std::isfinite(x)) {
      out.push_back({ViolationRule::NonFiniteValue, i});
    } else if (!ok(x)) {
      out.push_back({rule, i});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const TickSeries& s) {
  std::vector<Violation> out;
  const std::size_t n = s.prices.size();
  if (n < 2) out.push_back({ViolationRule::TooFewObservations, n});
  if (s.times.size() != n) out.push_back({ViolationRule::LengthMismatch, s.times.size()});
  if (!(s.horizon > 0.0)) out.push_back({ViolationRule::NonPositiveHorizon, 0});

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(s.prices[i])) out.push_back({ViolationRule::NonFiniteValue, i});
  }
  const std::size_t nt = s.times.size();
  if (nt > 0 && s.times.front() < 0.0) out.push_back({ViolationRule::NegativeStartTime, 0});
  for (std::size_t i = 1; i < nt; ++i) {
    if (!(s.times[i] > s.times[i - 1])) out.push_back({ViolationRule::NonMonotoneTime, i});
  }
  if (nt > 0 && s.horizon > 0.0 && s.times.back() > s.horizon) {
    out.push_back({ViolationRule::TimeBeyondHorizon, nt - 1});
  }

  const auto& c = s.covariates;
  check_column(c.sign, n, ViolationRule::InvalidTradeSign,
               [](double x) { return x == 1.0 || x == -1.0; }, out);
  check_column(c.volume, n, ViolationRule::NegativeVolume, [](double x) { return x >= 0.0; }, out);
  check_column(c.duration, n, ViolationRule::NonPositiveDuration,
               [](double x) { return x > 0.0; }, out);
  check_column(c.spread, n, ViolationRule::NonPositiveSpread, [](double x) { return x > 0.0; },
               out);
  check_column(c.depth, n, ViolationRule::NegativeDepth, [](double x) { return x >= 0.0; }, out);
  check_column(c.ofi, n, ViolationRule::NonFiniteValue, [](double) { return true; }, out);
  return out;
}

ReturnSeries returns(const TickSeries& series) {
  if (series.prices.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "need at least 2 observations, got " +
                                                 std::to_string(series.prices.size()));
  }
  if (auto v = validate(series); !v.empty()) {
    throw Error(ErrorCode::InvalidSeries, to_string(v.front()));
  }
  ReturnSeries r;
  const std::size_t n = series.num_returns();
  r.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.values[i] = series.prices[i + 1] - series.prices[i];
  r.mean_spacing = series.horizon / static_cast<double>(n);
  return r;
}

double realized_variance(const std::vector<double>& path) {
  double rv = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double d = path[i] - path[i - 1];
    rv += d * d;
  }
  return rv;
}

}  // namespace lobvol
