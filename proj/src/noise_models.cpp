#include "lobvol/noise_models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "lobvol/errors.hpp"

namespace lobvol {

namespace {

std::vector<Term> terms_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::Null: return {};
    case ModelKind::Roll: return {Term::Sign};
    case ModelKind::GlostenHarris: return {Term::Sign, Term::SignVolume};
    case ModelKind::SignedTimestamp: return {Term::SignInvDuration};
    case ModelKind::SignedSpread: return {Term::SignHalfSpread};
    case ModelKind::SignedQuotedDepth: return {Term::SignDepth};
    case ModelKind::OrderFlowImbalance: return {Term::Ofi};
    case ModelKind::NLSignedSpread: return {Term::NLSignedSpread};
    case ModelKind::General:
      return {Term::Sign,      Term::SignVolume, Term::SignInvDuration,
              Term::SignSpread, Term::SignDepth, Term::Ofi};
    case ModelKind::Composite: break;
  }
  throw Error(ErrorCode::InvalidConfig, "composite models are built with NoiseModel::combine");
}

Interval default_bounds(Term t) {
  // Level-scale parameters live in log-price units; the others are normalized.
  if (t == Term::Sign) return {-10.0 * kDefaultTick, 10.0 * kDefaultTick};
  return {-1.0, 1.0};
}

std::vector<Covariate> covariates_of(Term t) {
  switch (t) {
    case Term::Sign: return {Covariate::Sign};
    case Term::SignVolume: return {Covariate::Sign, Covariate::Volume};
    case Term::SignInvDuration: return {Covariate::Sign, Covariate::Duration};
    case Term::SignHalfSpread:
    case Term::SignSpread:
    case Term::NLSignedSpread: return {Covariate::Sign, Covariate::Spread};
    case Term::SignDepth: return {Covariate::Sign, Covariate::Depth};
    case Term::Ofi: return {Covariate::Ofi};
  }
  return {};
}

double need(const std::optional<double>& v, Covariate c) {
  if (!v) throw Error(ErrorCode::MissingCovariate, covariate_name(c));
  return *v;
}

// d phi_term / d theta for linear terms (independent of theta).
double linear_factor(Term t, const LobRecord& q) {
  switch (t) {
    case Term::Sign: return need(q.sign, Covariate::Sign);
    case Term::SignVolume: return need(q.sign, Covariate::Sign) * need(q.volume, Covariate::Volume);
    case Term::SignInvDuration:
      return need(q.sign, Covariate::Sign) /
             std::max(need(q.duration, Covariate::Duration), kMinDuration);
    case Term::SignHalfSpread:
      return 0.5 * need(q.sign, Covariate::Sign) * need(q.spread, Covariate::Spread);
    case Term::SignSpread: return need(q.sign, Covariate::Sign) * need(q.spread, Covariate::Spread);
    case Term::SignDepth: return need(q.sign, Covariate::Sign) * need(q.depth, Covariate::Depth);
    case Term::Ofi: return need(q.ofi, Covariate::Ofi);
    case Term::NLSignedSpread: break;
  }
  return 0.0;
}

double nl_denominator(double spread, double theta) {
  const double den = 1.0 + spread * theta;
  if (!(den > 0.0)) {
    throw Error(ErrorCode::OutOfBounds, "1 + S*theta must stay positive for NL signed spread");
  }
  return den;
}

double term_value(Term t, const LobRecord& q, double theta) {
  if (t == Term::NLSignedSpread) {
    const double s = need(q.spread, Covariate::Spread);
    const double i = need(q.sign, Covariate::Sign);
    return i * s * theta / nl_denominator(s, theta);
  }
  return linear_factor(t, q) * theta;
}

double term_derivative(Term t, const LobRecord& q, double theta) {
  if (t == Term::NLSignedSpread) {
    const double s = need(q.spread, Covariate::Spread);
    const double i = need(q.sign, Covariate::Sign);
    const double den = nl_denominator(s, theta);
    return i * s / (den * den);
  }
  return linear_factor(t, q);
}

std::string kind_slug(ModelKind k) {
  switch (k) {
    case ModelKind::Null: return "null";
    case ModelKind::Roll: return "roll";
    case ModelKind::GlostenHarris: return "glosten-harris";
    case ModelKind::SignedTimestamp: return "signed-timestamp";
    case ModelKind::SignedSpread: return "signed-spread";
    case ModelKind::SignedQuotedDepth: return "signed-quoted-depth";
    case ModelKind::OrderFlowImbalance: return "ofi";
    case ModelKind::NLSignedSpread: return "nl-signed-spread";
    case ModelKind::General: return "general";
    case ModelKind::Composite: return "composite";
  }
  return "?";
}

}  // namespace

std::string to_string(ModelKind kind) { return kind_slug(kind); }

NoiseModel::NoiseModel(ModelKind kind, std::vector<Term> terms)
    : kind_(kind), terms_(std::move(terms)), label_(kind_slug(kind)) {
  bounds_.reserve(terms_.size());
  for (Term t : terms_) bounds_.push_back(default_bounds(t));
}

NoiseModel NoiseModel::make(ModelKind kind) { return NoiseModel(kind, terms_for(kind)); }

NoiseModel NoiseModel::from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.find('+') != std::string::npos) {
    std::vector<NoiseModel> parts;
    std::stringstream ss(lower);
    std::string piece;
    while (std::getline(ss, piece, '+')) parts.push_back(from_name(piece));
    return combine(parts);
  }
  for (ModelKind k : {ModelKind::Null, ModelKind::Roll, ModelKind::GlostenHarris,
                      ModelKind::SignedTimestamp, ModelKind::SignedSpread,
                      ModelKind::SignedQuotedDepth, ModelKind::OrderFlowImbalance,
                      ModelKind::NLSignedSpread, ModelKind::General}) {
    if (lower == kind_slug(k)) return make(k);
  }
  if (lower == "order-flow-imbalance") return make(ModelKind::OrderFlowImbalance);
  if (lower == "spread") return make(ModelKind::SignedSpread);
  throw Error(ErrorCode::InvalidConfig, "unknown noise model '" + std::string(name) + "'");
}

NoiseModel NoiseModel::combine(const std::vector<NoiseModel>& parts) {
  if (parts.size() == 1) return parts.front();
  NoiseModel out;
  out.kind_ = ModelKind::Composite;
  std::string label;
  for (const auto& p : parts) {
    out.terms_.insert(out.terms_.end(), p.terms_.begin(), p.terms_.end());
    out.bounds_.insert(out.bounds_.end(), p.bounds_.begin(), p.bounds_.end());
    if (!label.empty()) label += "+";
    label += p.name();
  }
  out.label_ = label;
  return out;
}

std::string NoiseModel::name() const { return label_.empty() ? "null" : label_; }

bool NoiseModel::is_linear() const {
  return std::none_of(terms_.begin(), terms_.end(),
                      [](Term t) { return t == Term::NLSignedSpread; });
}

std::vector<Covariate> NoiseModel::required_covariates() const {
  std::vector<Covariate> out;
  for (Term t : terms_) {
    for (Covariate c : covariates_of(t)) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  }
  return out;
}

NoiseModel NoiseModel::with_bounds(std::vector<Interval> bounds) const {
  if (bounds.size() != dim()) {
    throw Error(ErrorCode::InvalidConfig, "bounds dimension mismatch");
  }
  for (const auto& b : bounds) {
    if (!(b.hi > b.lo)) throw Error(ErrorCode::InvalidConfig, "theta box must have positive volume");
  }
  NoiseModel out = *this;
  out.bounds_ = std::move(bounds);
  return out;
}

bool NoiseModel::in_bounds(std::span<const double> theta) const {
  if (theta.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (!bounds_[k].contains(theta[k])) return false;
  }
  return true;
}

void NoiseModel::check_theta(std::span<const double> theta) const {
  if (theta.size() != dim()) {
    throw Error(ErrorCode::OutOfBounds, "theta has dimension " + std::to_string(theta.size()) +
                                            ", model " + name() + " needs " +
                                            std::to_string(dim()));
  }
  if (!in_bounds(theta)) throw Error(ErrorCode::OutOfBounds, "theta outside the parameter box");
}

double NoiseModel::phi(const LobRecord& q, std::span<const double> theta) const {
  check_theta(theta);
  double v = 0.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) v += term_value(terms_[k], q, theta[k]);
  return v;
}

std::vector<double> NoiseModel::phi_grad(const LobRecord& q, std::span<const double> theta) const {
  check_theta(theta);
  std::vector<double> g(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) g[k] = term_derivative(terms_[k], q, theta[k]);
  return g;
}

void NoiseModel::check_covariates(const TickSeries& series) const {
  for (Covariate c : required_covariates()) {
    if (!series.covariates.has(c)) {
      throw Error(ErrorCode::MissingCovariate,
                  "model " + name() + " needs column " + covariate_name(c));
    }
  }
}

std::vector<double> NoiseModel::phi_path(const TickSeries& series,
                                         std::span<const double> theta) const {
  check_theta(theta);
  check_covariates(series);
  const std::size_t n = series.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const LobRecord q = series.covariates.at(i);
    double v = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) v += term_value(terms_[k], q, theta[k]);
    out[i] = v;
  }
  return out;
}

std::vector<std::vector<double>> NoiseModel::grad_path(const TickSeries& series,
                                                       std::span<const double> theta) const {
  check_theta(theta);
  check_covariates(series);
  const std::size_t n = series.size();
  std::vector<std::vector<double>> cols(dim(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const LobRecord q = series.covariates.at(i);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      cols[k][i] = term_derivative(terms_[k], q, theta[k]);
    }
  }
  return cols;
}

double phi(const NoiseModel& model, const LobRecord& q, std::span<const double> theta) {
  return model.phi(q, theta);
}

std::vector<double> phi_grad(const NoiseModel& model, const LobRecord& q,
                             std::span<const double> theta) {
  return model.phi_grad(q, theta);
}

std::vector<double> mu(const NoiseModel& model, const TickSeries& series,
                       std::span<const double> theta) {
  const auto p = model.phi_path(series, theta);
  std::vector<double> out(p.empty() ? 0 : p.size() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i + 1] - p[i];
  return out;
}

}  // namespace lobvol
