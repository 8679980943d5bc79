#include "lobvol/io.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lobvol/errors.hpp"

namespace lobvol {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

Error parse_error(std::size_t line, const std::string& what) {
  return Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

// Seconds of the day for an ISO-8601 stamp or a clock string.
std::optional<double> clock_seconds(const std::string& s) {
  std::string t = s;
  if (const auto pos = t.find_first_of("T "); pos != std::string::npos) t = t.substr(pos + 1);
  while (!t.empty() && (t.back() == 'Z')) t.pop_back();
  int h = 0;
  int m = 0;
  double sec = 0.0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream is(t);
  if (!(is >> h >> c1 >> m >> c2 >> sec) || c1 != ':' || c2 != ':') return std::nullopt;
  if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0.0 || sec >= 61.0) return std::nullopt;
  return 3600.0 * h + 60.0 * m + sec;
}

constexpr double kYearSeconds = kDaySeconds * kTradingDays;

}  // namespace

double parse_clock(const std::string& s) {
  if (auto v = to_number(trim(s))) return *v;
  if (auto v = clock_seconds(trim(s))) return *v;
  throw Error(ErrorCode::InvalidConfig, "cannot read time '" + s + "'");
}

LoadReport read_ticks(std::istream& in, const LoadOptions& opts) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      header = split(line, ',');
      break;
    }
  }
  if (header.empty()) throw Error(ErrorCode::EmptyFile, "no header row");
  if (header.size() < 2 || header[0] != "time" || header[1] != "price") {
    throw parse_error(line_no, "header must start with time,price");
  }
  std::vector<Covariate> cols;
  for (std::size_t k = 2; k < header.size(); ++k) {
    bool found = false;
    for (Covariate c : {Covariate::Sign, Covariate::Volume, Covariate::Duration, Covariate::Spread,
                        Covariate::Depth, Covariate::Ofi}) {
      if (header[k] == covariate_name(c)) {
        if (std::find(cols.begin(), cols.end(), c) != cols.end()) {
          throw parse_error(line_no, "duplicate column " + header[k]);
        }
        cols.push_back(c);
        found = true;
      }
    }
    if (!found) throw parse_error(line_no, "unknown column '" + header[k] + "'");
  }

  std::vector<double> secs;
  std::vector<double> prices;
  std::vector<std::vector<double>> cov(cols.size());
  std::optional<bool> iso;
  LoadReport report;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(f.size()));
    }
    std::optional<double> t = to_number(f[0]);
    if (!iso) iso = !t.has_value();
    if (*iso) t = clock_seconds(f[0]);
    if (!t) throw parse_error(line_no, "bad time '" + f[0] + "'");
    auto p = to_number(f[1]);
    if (!p) throw parse_error(line_no, "bad price '" + f[1] + "'");
    if (opts.raw_price) {
      if (!(*p > 0.0)) throw parse_error(line_no, "raw price must be positive");
      p = std::log(*p);
    }
    if ((opts.session_start && *t < *opts.session_start) ||
        (opts.session_end && *t > *opts.session_end)) {
      ++report.trimmed;
      continue;
    }
    std::vector<double> row(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      auto v = to_number(f[k + 2]);
      if (!v) throw parse_error(line_no, "bad value '" + f[k + 2] + "' in column " + header[k + 2]);
      row[k] = cols[k] == Covariate::Duration ? *v / kYearSeconds : *v;
    }
    if (!secs.empty() && *t == secs.back()) {
      ++report.duplicates_dropped;
      continue;
    }
    secs.push_back(*t);
    prices.push_back(*p);
    for (std::size_t k = 0; k < cols.size(); ++k) cov[k].push_back(row[k]);
  }
  if (secs.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");

  double origin = 0.0;
  if (opts.session_start) {
    origin = *opts.session_start;
  } else if (*iso) {
    origin = secs.front();
  }
  double span = kDaySeconds;
  if (opts.session_start && opts.session_end) span = *opts.session_end - *opts.session_start;
  span = std::max(span, secs.back() - origin);

  TickSeries& s = report.series;
  s.horizon = span / kYearSeconds;
  s.times.resize(secs.size());
  for (std::size_t i = 0; i < secs.size(); ++i) s.times[i] = (secs[i] - origin) / kYearSeconds;
  s.prices = std::move(prices);
  for (std::size_t k = 0; k < cols.size(); ++k) s.covariates.column(cols[k]) = std::move(cov[k]);
  if (const auto bad = validate(s); !bad.empty()) {
    throw Error(ErrorCode::InvalidSeries, to_string(bad.front()));
  }
  return report;
}

LoadReport load_ticks(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return read_ticks(in, opts);
}

void write_ticks(std::ostream& os, const TickSeries& series) {
  std::vector<Covariate> cols;
  for (Covariate c : {Covariate::Sign, Covariate::Volume, Covariate::Duration, Covariate::Spread,
                      Covariate::Depth, Covariate::Ofi}) {
    if (series.covariates.has(c)) cols.push_back(c);
  }
  os << "time,price";
  for (Covariate c : cols) os << ',' << covariate_name(c);
  os << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << series.times[i] * kYearSeconds << ',' << series.prices[i];
    for (Covariate c : cols) {
      double v = (*series.covariates.column(c))[i];
      if (c == Covariate::Duration) v *= kYearSeconds;
      os << ',' << v;
    }
    os << '\n';
  }
}

Config load_config(const std::string& path) {
  Config cfg;
  try {
    boost::property_tree::ini_parser::read_ini(path, cfg);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return cfg;
}

namespace {

template <class T>
T get(const Config& cfg, const std::string& key, T fallback) {
  try {
    return cfg.get<T>(key, fallback);
  } catch (const boost::property_tree::ptree_bad_data&) {
    throw Error(ErrorCode::InvalidConfig, "bad value for " + key);
  }
}

std::vector<std::string> list(const Config& cfg, const std::string& key) {
  std::vector<std::string> out;
  if (auto v = cfg.get_optional<std::string>(key)) {
    for (auto& item : split(*v, ',')) {
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

double number(const std::string& s, const std::string& key) {
  if (auto v = to_number(s)) return *v;
  throw Error(ErrorCode::InvalidConfig, "bad number '" + s + "' for " + key);
}

ModelKind model_kind(const std::string& name) {
  const NoiseModel m = NoiseModel::from_name(name);
  if (m.kind() == ModelKind::Composite) {
    throw Error(ErrorCode::InvalidConfig, "composite models cannot be simulated");
  }
  return m.kind();
}

}  // namespace

ScenarioConfig scenario_from_config(const Config& cfg) {
  ScenarioConfig s = ScenarioConfig::make(vol_regime_from_name(get<std::string>(cfg, "scenario.vol", "constant")));
  s.horizon = get(cfg, "scenario.horizon", s.horizon);
  s.sigma2 = get(cfg, "scenario.sigma2", s.sigma2);
  s.fine_steps = get(cfg, "scenario.fine_steps", s.fine_steps);
  s.seed = get(cfg, "scenario.seed", s.seed);
  s.price.drift = get(cfg, "scenario.drift", s.price.drift);
  s.price.jumps = get(cfg, "scenario.jumps", s.price.jumps);
  s.price.jumps_per_horizon = get(cfg, "scenario.jumps_per_horizon", s.price.jumps_per_horizon);
  s.price.jump_size = get(cfg, "scenario.jump_size", s.price.jump_size);
  s.seasonality.enabled = get(cfg, "scenario.seasonality", s.seasonality.enabled);
  s.sv.enabled = get(cfg, "scenario.sv", s.sv.enabled);
  s.sv.alpha = get(cfg, "scenario.sv_alpha", s.sv.alpha);
  s.sv.sigma2_bar = get(cfg, "scenario.sv_sigma2_bar", s.sv.sigma2_bar);
  s.sv.delta = get(cfg, "scenario.sv_delta", s.sv.delta);
  s.sv.leverage = get(cfg, "scenario.leverage", s.sv.leverage);
  const Frequency f = frequency_from_name(get<std::string>(cfg, "scenario.freq", "tick"));
  s.times.irregular = f == Frequency::Tick;
  s.times.n = f == Frequency::Sec30 ? 780 : f == Frequency::Sec15 ? 1560 : 23400;
  s.times.n = get(cfg, "scenario.n", s.times.n);
  s.info.model = model_kind(get<std::string>(cfg, "scenario.model", "roll"));
  s.info.sign_autocorr = get(cfg, "scenario.sign_autocorr", s.info.sign_autocorr);
  s.info.spread_mean = get(cfg, "scenario.spread_mean", s.info.spread_mean);
  s.info.spread_var = get(cfg, "scenario.spread_var", s.info.spread_var);
  s.info.spread_corr = get(cfg, "scenario.spread_corr", s.info.spread_corr);
  for (const auto& v : list(cfg, "scenario.theta0")) s.info.theta0.push_back(number(v, "theta0"));
  s.noise.a2 = get(cfg, "scenario.a2", 0.0);
  s.noise.sign_seconds = get(cfg, "scenario.sign_seconds", s.noise.sign_seconds);
  s.noise.regime = noise_regime_from_name(get<std::string>(cfg, "scenario.noise", s.noise.a2 > 0.0 ? "H1" : "H0"));
  s.check();
  return s;
}

TestConfig test_from_config(const Config& cfg) {
  TestConfig t;
  t.truncation.omega = get(cfg, "test.omega", t.truncation.omega);
  t.truncation.alpha0 = get(cfg, "test.alpha0", t.truncation.alpha0);
  t.truncation.k_spot = get(cfg, "test.k_spot", t.truncation.k_spot);
  t.truncation.check();
  t.raw_returns = get(cfg, "test.raw_returns", t.raw_returns);
  const auto space = get<std::string>(cfg, "test.noise_space", "small");
  if (space == "small") {
    t.space = NoiseSpace::SmallTest;
  } else if (space == "large") {
    t.space = NoiseSpace::LargeNoise;
  } else {
    throw Error(ErrorCode::InvalidConfig, "noise_space must be small or large");
  }
  FitBounds& b = t.fit.bounds;
  b.sigma2_lo = get(cfg, "bounds.sigma2_lo", b.sigma2_lo);
  b.sigma2_hi = get(cfg, "bounds.sigma2_hi", b.sigma2_hi);
  b.a2_lo = get(cfg, "bounds.a2_lo", b.a2_lo);
  b.a2_hi = get(cfg, "bounds.a2_hi", b.a2_hi);
  b.small_margin = get(cfg, "bounds.small_margin", b.small_margin);
  if (!(b.sigma2_lo > 0.0 && b.sigma2_hi > b.sigma2_lo && b.a2_lo > 0.0 && b.a2_hi > b.a2_lo &&
        b.small_margin > 0.0 && b.small_margin < 0.25)) {
    throw Error(ErrorCode::InvalidConfig, "inconsistent [bounds] section");
  }
  t.fit.grid_points = get(cfg, "test.grid_points", t.fit.grid_points);
  return t;
}

StudyConfig study_from_config(const Config& cfg) {
  StudyConfig s;
  s.base = scenario_from_config(cfg);
  s.test = test_from_config(cfg);
  if (auto v = list(cfg, "study.vol"); !v.empty()) {
    s.vol.clear();
    for (const auto& x : v) s.vol.push_back(vol_regime_from_name(x));
  }
  if (auto v = list(cfg, "study.a2"); !v.empty()) {
    s.levels.clear();
    for (const auto& x : v) {
      if (x == "mix") {
        s.levels.push_back(NoiseLevel{0.0, true});
      } else {
        s.levels.push_back(NoiseLevel{number(x, "study.a2"), false});
      }
    }
  }
  s.noise = noise_regime_from_name(get<std::string>(cfg, "study.noise", "H1"));
  s.mix_a2 = get(cfg, "study.mix_a2", s.mix_a2);
  if (auto v = list(cfg, "study.models"); !v.empty()) {
    s.models.clear();
    for (const auto& x : v) s.models.push_back(model_kind(x));
  }
  if (auto v = list(cfg, "study.freqs"); !v.empty()) {
    s.freqs.clear();
    for (const auto& x : v) s.freqs.push_back(frequency_from_name(x));
  }
  for (const auto& x : list(cfg, "study.stats")) s.stats.push_back(static_cast<int>(number(x, "study.stats")));
  s.replications = get(cfg, "study.replications", s.replications);
  s.level = get(cfg, "study.level", s.level);
  s.seed = get(cfg, "study.seed", s.seed);
  s.threads = get(cfg, "study.threads", s.threads);
  if (s.replications < 1) throw Error(ErrorCode::InvalidConfig, "replications must be >= 1");
  return s;
}

}  // namespace lobvol
