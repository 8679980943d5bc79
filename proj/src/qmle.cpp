#include "lobvol/qmle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "lobvol/likelihood.hpp"

namespace lobvol {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct Data {
  const TickSeries* series = nullptr;
  const NoiseModel* model = nullptr;
  std::vector<double> y;
  std::size_t n = 0;
  double delta = 0.0;
  // mu columns for linear models: mu(theta) = sum_k theta_k * mcols[k].
  std::vector<std::vector<double>> mcols;
};

Data prepare(const TickSeries& series, const NoiseModel& model) {
  Data d;
  d.series = &series;
  d.model = &model;
  auto r = returns(series);
  d.y = std::move(r.values);
  d.n = d.y.size();
  d.delta = r.mean_spacing;
  model.check_covariates(series);
  if (model.is_linear() && !model.is_null()) {
    const auto g = model.grad_path(series, model.zero_theta());
    d.mcols.assign(model.dim(), std::vector<double>(d.n));
    for (std::size_t k = 0; k < model.dim(); ++k) {
      for (std::size_t i = 0; i < d.n; ++i) d.mcols[k][i] = g[k][i + 1] - g[k][i];
    }
  }
  return d;
}

// Whitening for the scaled kernel R = Omega / s; identity when rho = 0.
class Metric {
 public:
  Metric(std::size_t n, double rho) : n_(n) {
    if (rho != 0.0) kernel_.emplace(n, 1.0, rho);
  }
  std::vector<double> whiten(const std::vector<double>& v) const {
    return kernel_ ? kernel_->whiten(v) : v;
  }
  double inv_pivot(std::size_t k) const { return kernel_ ? 1.0 / kernel_->pivots()[k] : 1.0; }
  double logdet() const { return kernel_ ? kernel_->logdet() : 0.0; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::optional<MA1Kernel> kernel_;
};

double clip(double x, const Interval& b) { return std::min(std::max(x, b.lo), b.hi); }

// argmin 1/2 t'Ht - b't over the box.
std::vector<double> box_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& b,
                           const std::vector<Interval>& box) {
  const auto d = static_cast<Eigen::Index>(box.size());
  std::vector<double> t(box.size(), 0.0);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const Eigen::VectorXd sol = ldlt.solve(b);
    bool inside = sol.allFinite();
    for (Eigen::Index k = 0; inside && k < d; ++k) inside = box[k].contains(sol[k]);
    if (inside) return {sol.data(), sol.data() + d};
    if (sol.allFinite()) {
      for (Eigen::Index k = 0; k < d; ++k) t[k] = clip(sol[k], box[k]);
    }
  }
  for (Eigen::Index k = 0; k < d; ++k) t[k] = clip(t[k], box[k]);
  // Projected coordinate descent; d is small.
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!(h(k, k) > 0.0)) continue;
      double rhs = b[k];
      for (Eigen::Index l = 0; l < d; ++l) {
        if (l != k) rhs -= h(k, l) * t[l];
      }
      const double next = clip(rhs / h(k, k), box[k]);
      const double width = box[k].hi - box[k].lo;
      worst = std::max(worst, std::abs(next - t[k]) / (std::abs(next) + 1e-12 * width));
      t[k] = next;
    }
    if (worst < 1e-14) break;
  }
  return t;
}

struct Inner {
  std::vector<double> theta;
  double q = 0.0;  // Ytilde' R^{-1} Ytilde
  int iterations = 0;
  bool converged = true;
};

struct Normal {
  Eigen::MatrixXd h;
  Eigen::VectorXd b;
  std::vector<std::vector<double>> wcols;
  std::vector<double> wy;
};

Normal normal_equations(const Metric& m, const std::vector<double>& y,
                        const std::vector<std::vector<double>>& cols) {
  Normal ne;
  const std::size_t d = cols.size();
  const std::size_t n = y.size();
  ne.wy = m.whiten(y);
  ne.wcols.reserve(d);
  for (const auto& c : cols) ne.wcols.push_back(m.whiten(c));
  ne.h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  ne.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const double ip = m.inv_pivot(i);
    for (std::size_t k = 0; k < d; ++k) {
      const double wk = ne.wcols[k][i] * ip;
      ne.b[static_cast<Eigen::Index>(k)] += wk * ne.wy[i];
      for (std::size_t l = 0; l <= k; ++l) {
        ne.h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) += wk * ne.wcols[l][i];
      }
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < k; ++l) {
      ne.h(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) =
          ne.h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    }
  }
  return ne;
}

double weighted_ss(const Metric& m, const std::vector<double>& w) {
  double q = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) q += w[i] * w[i] * m.inv_pivot(i);
  return q;
}

std::vector<double> residual_vector(const Data& d, const std::vector<double>& theta) {
  std::vector<double> r = d.y;
  if (d.model->is_null()) return r;
  const auto m = mu(*d.model, *d.series, theta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= m[i];
  return r;
}

std::vector<std::vector<double>> mu_jacobian(const Data& d, const std::vector<double>& theta) {
  const auto g = d.model->grad_path(*d.series, theta);
  std::vector<std::vector<double>> cols(g.size(), std::vector<double>(d.n));
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (std::size_t i = 0; i < d.n; ++i) cols[k][i] = g[k][i + 1] - g[k][i];
  }
  return cols;
}

// Minimizes Ytilde(theta)' R^{-1} Ytilde(theta) over the theta box.
Inner solve_theta(const Data& d, const Metric& m, const std::vector<double>& start) {
  const NoiseModel& model = *d.model;
  Inner out;
  if (model.is_null()) {
    out.q = weighted_ss(m, m.whiten(d.y));
    return out;
  }
  if (model.is_linear()) {
    const Normal ne = normal_equations(m, d.y, d.mcols);
    out.theta = box_qp(ne.h, ne.b, model.bounds());
    std::vector<double> w = ne.wy;
    for (std::size_t k = 0; k < out.theta.size(); ++k) {
      const double t = out.theta[k];
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= t * ne.wcols[k][i];
    }
    out.q = weighted_ss(m, w);
    out.iterations = 1;
    return out;
  }

  // Gauss-Newton with step halving for nonlinear phi.
  std::vector<double> theta = start;
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = clip(theta[k], model.bounds()[k]);
  double q = weighted_ss(m, m.whiten(residual_vector(d, theta)));
  out.converged = false;
  for (int it = 0; it < 100; ++it) {
    out.iterations = it + 1;
    const auto r = residual_vector(d, theta);
    const Normal ne = normal_equations(m, r, mu_jacobian(d, theta));
    // Solve for the new point t = theta + delta inside the box.
    Eigen::VectorXd shifted = ne.b;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      for (std::size_t l = 0; l < theta.size(); ++l) {
        shifted[static_cast<Eigen::Index>(k)] +=
            ne.h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * theta[l];
      }
    }
    const auto target = box_qp(ne.h, shifted, model.bounds());
    double step = 1.0;
    std::vector<double> trial(theta.size());
    double q_trial = q;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t k = 0; k < theta.size(); ++k) {
        trial[k] = theta[k] + step * (target[k] - theta[k]);
      }
      try {
        q_trial = weighted_ss(m, m.whiten(residual_vector(d, trial)));
      } catch (const Error&) {
        q_trial = std::numeric_limits<double>::infinity();
      }
      if (q_trial <= q) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    double move = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double width = model.bounds()[k].hi - model.bounds()[k].lo;
      move = std::max(move, std::abs(trial[k] - theta[k]) / (std::abs(theta[k]) + 1e-9 * width));
    }
    if (!improved) {
      out.converged = true;  // no descent direction left at machine precision
      break;
    }
    const double gain = q - q_trial;
    theta = trial;
    q = q_trial;
    if (move < 1e-10 || gain <= 1e-14 * q) {
      out.converged = true;
      break;
    }
  }
  out.theta = theta;
  out.q = q;
  return out;
}

double rho_from_phi(double f) { return f / ((1.0 - f) * (1.0 - f)); }
double phi_from_rho(double rho) { return 1.0 - 2.0 / (std::sqrt(1.0 + 4.0 * rho) + 1.0); }

struct ProfilePoint {
  double phit = 0.0;
  double rho = 0.0;
  double s = 0.0;
  double value = -std::numeric_limits<double>::infinity();  // without the 2pi constant
  bool s_lo = false;
  bool s_hi = false;
  Inner inner;
};

class Profile {
 public:
  Profile(const Data& d, const FitBounds& b, std::vector<double> theta0)
      : d_(d), b_(b), warm_(std::move(theta0)) {}

  ProfilePoint at(double phit) {
    ++evaluations_;
    ProfilePoint p;
    p.phit = phit;
    p.rho = rho_from_phi(phit);
    const Metric m(d_.n, p.rho);
    p.inner = solve_theta(d_, m, warm_);
    if (!p.inner.theta.empty()) warm_ = p.inner.theta;
    const double n = static_cast<double>(d_.n);
    const double s_lo = b_.sigma2_lo * d_.delta;
    const double s_hi = b_.sigma2_hi * d_.delta;
    double s = p.inner.q / n;
    if (!(s >= s_lo)) {
      s = s_lo;
      p.s_lo = true;
    } else if (s > s_hi) {
      s = s_hi;
      p.s_hi = true;
    }
    p.s = s;
    p.value = -0.5 * n * std::log(s) - 0.5 * m.logdet() - p.inner.q / (2.0 * s);
    return p;
  }

  int evaluations() const { return evaluations_; }

 private:
  const Data& d_;
  const FitBounds& b_;
  std::vector<double> warm_;
  int evaluations_ = 0;
};

bool at_bound(double x, const Interval& b) {
  const double tol = 1e-10 * (b.hi - b.lo);
  return x <= b.lo + tol || x >= b.hi - tol;
}

std::vector<double> initial_theta(const NoiseModel& model, const FitOptions& opts) {
  if (opts.theta_start && opts.theta_start->size() == model.dim()) return *opts.theta_start;
  auto t = model.zero_theta();
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = clip(t[k], model.bounds()[k]);
  return t;
}

void check_boundary(const FitResult& r) {
  if (!r.bounds_hit.empty() &&
      std::all_of(r.bounds_hit.begin(), r.bounds_hit.end(), [](bool b) { return b; })) {
    throw Error(ErrorCode::BoundarySolution, "every coordinate of the optimum sits on its bound");
  }
}

FitResult assemble(const Data& d, const NoiseModel& model, const ProfilePoint& p, FitVariant v) {
  FitResult r;
  r.variant = v;
  r.sigma2 = p.s / d.delta;
  r.theta = p.inner.theta;
  r.loglik = p.value - 0.5 * static_cast<double>(d.n) * kLog2Pi;
  r.bounds_hit.push_back(p.s_lo || p.s_hi);
  for (std::size_t k = 0; k < r.theta.size(); ++k) {
    r.bounds_hit.push_back(at_bound(r.theta[k], model.bounds()[k]));
  }
  return r;
}

FitResult fit_profile(const TickSeries& series, const NoiseModel& model, NoiseSpace space,
                      const FitOptions& opts, FitVariant variant) {
  const Data d = prepare(series, model);
  const FitBounds& b = opts.bounds;
  Profile profile(d, b, initial_theta(model, opts));

  double ss = 0.0;
  for (double x : d.y) ss += x * x;
  const double s_ref =
      std::max(ss / static_cast<double>(d.n), b.sigma2_lo * d.delta);
  const double rho_lo = space == NoiseSpace::SmallTest ? -b.small_margin : b.a2_lo / s_ref;
  // a^2 = rho * s must be able to reach a2_hi for any admissible s.
  const double rho_hi = std::max(b.a2_hi / (b.sigma2_lo * d.delta), rho_lo + 1e-6);
  const double lo = phi_from_rho(rho_lo);
  const double hi = phi_from_rho(rho_hi);

  double a = lo;
  double c = hi;
  const bool warm = opts.a2_start && opts.sigma2_start && *opts.sigma2_start > 0.0;
  double f0_start = 0.0;
  if (warm) {
    f0_start = phi_from_rho(*opts.a2_start / (*opts.sigma2_start * d.delta));
    const double w = 0.02;
    a = std::max(lo, f0_start - w);
    c = std::min(hi, f0_start + w);
  }
  const int g = std::max(opts.grid_points, 5);
  std::vector<ProfilePoint> grid;
  grid.reserve(static_cast<std::size_t>(g));
  std::size_t best = 0;
  for (int k = 0; k < g; ++k) {
    grid.push_back(profile.at(a + (c - a) * k / (g - 1)));
    if (grid.back().value > grid[best].value) best = grid.size() - 1;
  }
  const double left = grid[best == 0 ? 0 : best - 1].phit;
  const double right = grid[std::min(best + 1, grid.size() - 1)].phit;

  // A warm start is kept unless a candidate beats it by more than rounding.
  ProfilePoint opt = grid[best];
  double margin = 0.0;
  if (warm) {
    const ProfilePoint start = profile.at(std::clamp(f0_start, lo, hi));
    margin = 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(start.value);
    if (start.value + margin >= opt.value) opt = start;
  }
  std::uintmax_t max_iter = 200;
  bool converged = true;
  if (right > left) {
    auto neg = [&](double f) { return -profile.at(f).value; };
    const auto res = boost::math::tools::brent_find_minima(
        neg, left, right, std::numeric_limits<double>::digits / 2, max_iter);
    converged = max_iter < 200;
    ProfilePoint cand = profile.at(res.first);
    if (cand.value > opt.value + margin) opt = cand;
  }

  FitResult r = assemble(d, model, opt, variant);
  double a2 = opt.rho * opt.s;
  const double a2_min = space == NoiseSpace::SmallTest ? -b.small_margin * opt.s : b.a2_lo;
  bool a2_hit = (!warm && (opt.phit <= lo + 1e-9 || opt.phit >= hi - 1e-9));
  if (a2 < a2_min) {
    a2 = a2_min;
    a2_hit = true;
  } else if (a2 > b.a2_hi) {
    a2 = b.a2_hi;
    a2_hit = true;
  }
  r.a2 = a2;
  r.bounds_hit.push_back(a2_hit);
  r.iterations = profile.evaluations();
  r.converged = converged && opt.inner.converged;
  if (!r.converged) throw NoConvergenceError("profile likelihood search did not converge", r);
  check_boundary(r);
  return r;
}

}  // namespace

FitResult fit_exp(const TickSeries& series, const NoiseModel& model, const FitOptions& opts) {
  const Data d = prepare(series, model);
  Profile profile(d, opts.bounds, initial_theta(model, opts));
  const ProfilePoint p = profile.at(0.0);
  FitResult r = assemble(d, model, p, FitVariant::Exp);
  r.iterations = p.inner.iterations;
  r.converged = p.inner.converged;
  if (!r.converged) throw NoConvergenceError("Gauss-Newton did not converge", r);
  check_boundary(r);
  return r;
}

FitResult fit_err(const TickSeries& series, const NoiseModel& model, NoiseSpace space,
                  const FitOptions& opts) {
  return fit_profile(series, model, space, opts, FitVariant::Err);
}

FitResult fit_null(const TickSeries& series, NoiseSpace space, const FitOptions& opts) {
  static const NoiseModel null_model;
  return fit_profile(series, null_model, space, opts, FitVariant::Null);
}

EfficientPricePath efficient_price(const TickSeries& series, const NoiseModel& model,
                                   std::span<const double> theta) {
  EfficientPricePath out;
  out.times = series.times;
  out.values = series.prices;
  if (model.is_null()) return out;
  const auto p = model.phi_path(series, theta);
  for (std::size_t i = 0; i < p.size(); ++i) out.values[i] -= p[i];
  return out;
}

PiV pi_v_hat(const TickSeries& series, const NoiseModel& model, const FitResult& fit) {
  if (!fit.a2) throw Error(ErrorCode::InvalidConfig, "pi_v needs a fit with a noise variance");
  PiV out;
  if (!model.is_null()) {
    const auto p = model.phi_path(series, fit.theta);
    double acc = 0.0;
    for (double x : p) acc += x * x;
    out.explained_var = acc / static_cast<double>(p.size());
  }
  out.residual_var = *fit.a2;
  if (out.residual_var < 0.0) {
    out.residual_var = 0.0;
    out.clamped = true;
  }
  const double den = out.explained_var + out.residual_var;
  if (!(den > 0.0)) throw Error(ErrorCode::Undefined, "explained and residual variance both vanish");
  out.pi_v = out.explained_var / den;
  return out;
}

}  // namespace lobvol
