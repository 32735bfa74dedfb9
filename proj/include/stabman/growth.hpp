#pragma once

// Neoclassical growth model with log utility and full depreciation:
// k_{t+2} = (1 + ab) k_{t+1}^a - ab k_t^a k_{t+1}^{a-1}, closed-form policy
// k' = ab k^a, and the Taylor and stable-manifold comparators.

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stabman/manifold.hpp"
#include "stabman/pipeline.hpp"

namespace stabman::growth {

struct GrowthParams {
  double alpha = 0.36;
  double beta = 0.99;
};

inline void validate(const GrowthParams& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) throw DomainError("beta must be positive");
}

/// k_bar = (ab)^{1/(1-a)}.
inline double steady_capital(const GrowthParams& p) {
  return std::pow(p.alpha * p.beta, 1.0 / (1.0 - p.alpha));
}

/// x = k_t, y = k_{t+1}. The Euler row is y' - E(y, x) with
/// E(y, x) = (1 + ab) y^a - ab x^a y^{a-1}; the transition row is x' - y.
inline ModelSpec build_growth(const GrowthParams& p) {
  validate(p);
  const double a = p.alpha;
  const double ab = p.alpha * p.beta;
  ModelSpec m;
  m.name = "growth";
  m.dims = Dims{1, 1, 0};
  m.lambda = Mat::Zero(0, 0);
  m.steady_guess = Vec::Constant(2, 0.15);
  m.explicit_next = true;
  m.residual = [a, ab](const Vec& yn, const Vec& y, const Vec& xn, const Vec& x, const Vec&) -> Vec {
    Vec r(2);
    r(0) = yn(0) - ((1.0 + ab) * std::pow(y(0), a) - ab * std::pow(x(0), a) * std::pow(y(0), a - 1.0));
    r(1) = xn(0) - y(0);
    return r;
  };
  m.jacobians = [a, ab](const Vec&, const Vec& y, const Vec&, const Vec& x, const Vec&) -> Jacobians {
    const double yy = y(0);
    const double xx = x(0);
    const double e_y =
        (1.0 + ab) * a * std::pow(yy, a - 1.0) + ab * (1.0 - a) * std::pow(xx, a) * std::pow(yy, a - 2.0);
    const double e_x = -ab * a * std::pow(xx, a - 1.0) * std::pow(yy, a - 1.0);
    Jacobians j;
    j.f1 = (Mat(2, 1) << 1.0, 0.0).finished();
    j.f2 = (Mat(2, 1) << -e_y, -1.0).finished();
    j.f3 = (Mat(2, 1) << 0.0, 1.0).finished();
    j.f4 = (Mat(2, 1) << -e_x, 0.0).finished();
    j.f5 = Mat::Zero(2, 0);
    return j;
  };
  return m;
}

/// Scales the Z columns so that the first row is (1, 1): k^_t = u + v.
inline SpectralSplit unit_capital_basis(const SpectralSplit& s) {
  const Vec du = Vec::Constant(1, 1.0 / s.Z(0, 0));
  const Vec dv = Vec::Constant(1, 1.0 / s.Z(0, 1));
  return rescale_split(s, du, dv);
}

/// Full pipeline in the basis k^_t = u_t + v_t, k^_{t+1} = a u_t + v_t / (ab).
inline Pipeline build_growth_pipeline(const GrowthParams& p, PipelineOptions opt = {}) {
  opt.rescale = unit_capital_basis;
  return build_pipeline(build_growth(p), opt);
}

inline double closed_form(const GrowthParams& p, double k) {
  if (!(k > 0.0)) throw DomainError("closed_form requires k > 0");
  return p.alpha * p.beta * std::pow(k, p.alpha);
}

/// Taylor polynomial of k -> ab k^a of the given order around k_bar.
inline double taylor_policy(const GrowthParams& p, int order, double k) {
  if (order < 1) throw DomainError("Taylor order must be >= 1");
  const double kb = steady_capital(p);
  const double dk = k - kb;
  double coeff = p.alpha * p.beta * std::pow(kb, p.alpha);  // m-th derivative / m!
  double power = 1.0;
  double sum = coeff;
  for (int m = 1; m <= order; ++m) {
    coeff *= (p.alpha - (m - 1)) / (kb * m);
    power *= dk;
    sum += coeff * power;
  }
  return sum;
}

/// One point of the policy graph in levels: k_t and k_{t+1}.
struct CapitalPoint {
  double k = 0.0;
  double k_next = 0.0;
  double u = 0.0;
  double v = 0.0;
};

inline CapitalPoint to_capital(const TransformedSystem& sys, double u, double v) {
  const double kb = sys.base ? sys.base->ss.x_bar(0) : 0.0;
  const Vec w = sys.to_deviation(Vec::Constant(1, u), Vec::Constant(1, v));
  return {kb + w(0), kb + w(1), u, v};
}

/// The parametric graph {(k_t(u), k_{t+1}(u))} of the policy h at each u.
inline std::vector<CapitalPoint> parametric_policy(const TransformedSystem& sys,
                                                   const std::function<double(double)>& h,
                                                   const std::vector<double>& u_grid) {
  std::vector<CapitalPoint> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) out.push_back(to_capital(sys, u, h(u)));
  return out;
}

inline std::vector<CapitalPoint> parametric_policy(const PolicyApprox& p, const std::vector<double>& u_grid) {
  return parametric_policy(
      *p.system, [&](double u) { return eval_policy(p, Vec::Constant(1, u))(0); }, u_grid);
}

/// Residual v - T(u(v), v) of a policy on the line k^_t = Z00 u + Z01 v.
/// Returns NaN where the model or the nested policy cannot be evaluated.
using LineResidual = std::function<double(double u, double v)>;

/// v - T_{order,u}(v): zero exactly on the graph of h_order.
inline LineResidual order_residual(const PolicyApprox& p) {
  return [p](double u, double v) {
    try {
      const double t = apply_operator(p, Vec::Constant(1, u), Vec::Constant(1, v))(0);
      return v - t;
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

/// v - h_{1,1}(u), with h_{1,1} the first Picard iterate from zero.
inline LineResidual first_iterate_residual(std::shared_ptr<const TransformedSystem> sys) {
  return [sys](double u, double v) {
    try {
      return v - first_picard_iterate(*sys, Vec::Constant(1, u))(0);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

struct SweepOptions {
  double step = 1e-3;  ///< bracket scan step in v
  int max_steps = 400;
  double tol = 1e-15;
};

/// Point of the policy graph above capital level k, found as the root in v
/// of the line residual nearest to `v_guess`. Parametrizing by k instead of
/// u keeps the inversion well posed where the graph folds over u.
inline std::optional<CapitalPoint> point_at_capital(const TransformedSystem& sys, const LineResidual& res,
                                                    double k, double v_guess, const SweepOptions& opt = {}) {
  const double kb = sys.base ? sys.base->ss.x_bar(0) : 0.0;
  const double z00 = sys.split.Z(0, 0);
  const double z01 = sys.split.Z(0, 1);
  const double kh = k - kb;
  auto u_of = [&](double v) { return (kh - z01 * v) / z00; };
  auto r = [&](double v) { return res(u_of(v), v); };

  auto finish = [&](double v) { return to_capital(sys, u_of(v), v); };
  const double r0 = r(v_guess);
  if (r0 == 0.0) return finish(v_guess);

  auto bracket_root = [&](double a, double fa, double b, double fb) {
    boost::uintmax_t it = 200;
    const auto tol = [&](double x, double y) { return std::abs(x - y) <= opt.tol * std::max(1.0, std::abs(x)); };
    const auto root = boost::math::tools::toms748_solve(r, a, b, fa, fb, tol, it);
    return 0.5 * (root.first + root.second);
  };

  // Expand outward from the guess on both sides; the first sign change wins.
  double prev_hi = v_guess, f_hi = r0;
  double prev_lo = v_guess, f_lo = r0;
  for (int s = 1; s <= opt.max_steps; ++s) {
    const double hi = v_guess + s * opt.step;
    const double fh = r(hi);
    if (std::isfinite(fh) && std::isfinite(f_hi) && (fh == 0.0 || (fh > 0) != (f_hi > 0)))
      return finish(fh == 0.0 ? hi : bracket_root(prev_hi, f_hi, hi, fh));
    prev_hi = hi;
    f_hi = fh;
    const double lo = v_guess - s * opt.step;
    const double fl = r(lo);
    if (std::isfinite(fl) && std::isfinite(f_lo) && (fl == 0.0 || (fl > 0) != (f_lo > 0)))
      return finish(fl == 0.0 ? lo : bracket_root(lo, fl, prev_lo, f_lo));
    prev_lo = lo;
    f_lo = fl;
  }
  return std::nullopt;
}

/// Policy graph over an ascending capital grid, by continuation outward from
/// the grid point nearest k_bar. Points where no root is found are nullopt.
inline std::vector<std::optional<CapitalPoint>> policy_on_capital_grid(const TransformedSystem& sys,
                                                                       const LineResidual& res,
                                                                       const std::vector<double>& ks,
                                                                       const SweepOptions& opt = {}) {
  std::vector<std::optional<CapitalPoint>> out(ks.size());
  if (ks.empty()) return out;
  const double kb = sys.base ? sys.base->ss.x_bar(0) : 0.0;
  std::size_t start = 0;
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (std::abs(ks[i] - kb) < std::abs(ks[start] - kb)) start = i;
  auto sweep = [&](long from, int dir, double guess) {
    for (long i = from; i >= 0 && i < static_cast<long>(ks.size()); i += dir) {
      out[i] = point_at_capital(sys, res, ks[i], guess, opt);
      if (out[i]) guess = out[i]->v;
    }
  };
  sweep(static_cast<long>(start), +1, 0.0);
  sweep(static_cast<long>(start) - 1, -1, out[start] ? out[start]->v : 0.0);
  return out;
}

/// n evenly spaced points on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {lo};
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

/// The default comparison grid: 501 points on [0.01 k_bar, 5 k_bar].
inline std::vector<double> capital_grid(const GrowthParams& p, int n = 501) {
  const double kb = steady_capital(p);
  return linspace(0.01 * kb, 5.0 * kb, n);
}

}  // namespace stabman::growth
