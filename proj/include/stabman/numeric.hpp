#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "stabman/errors.hpp"

namespace stabman {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using VectorMap = std::function<Vec(const Vec&)>;

namespace numeric {

/// cbrt(eps) * max(1, |x|): error-balancing step for central differences.
inline double central_step(double x, double scale = 1.0) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return scale * base * std::max(1.0, std::abs(x));
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Central-difference Jacobian of `fn` at `x`. `fx_size` is the output
/// length; `step_scale` multiplies the default step.
inline Mat central_jacobian(const VectorMap& fn, const Vec& x, Eigen::Index fx_size,
                            double step_scale = 1.0) {
  Mat jac(fx_size, x.size());
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = central_step(x(j), step_scale);
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    jac.col(j) = (fn(xp) - fn(xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return jac;
}

/// Largest singular value; zero for empty matrices.
inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

/// Largest eigenvalue modulus; zero for empty matrices.
inline double spectral_radius(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 100;
  int max_halvings = 30;
  /// Extra Newton steps taken after the tolerance is met, kept only while
  /// they do not increase the residual.
  int polish_steps = 2;
};

struct NewtonResult {
  Vec x;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Newton iteration with step halving on |g|. `jac` may be empty, in which
/// case central differences are used. Throws SingularityError when the
/// Jacobian is rank deficient and ConvergenceError on failure.
inline NewtonResult newton_solve(const VectorMap& g, Vec x, const NewtonOptions& opt,
                                 const std::function<Mat(const Vec&)>& jac = {}) {
  Vec gx = g(x);
  if (!gx.allFinite()) throw ConvergenceError("residual not finite at the initial guess", INFINITY);
  double norm = gx.norm();
  auto jacobian = [&](const Vec& at) {
    return jac ? jac(at) : central_jacobian(g, at, gx.size());
  };
  auto newton_step = [&](const Vec& at, const Vec& g_at) -> Vec {
    const Mat j = jacobian(at);
    Eigen::FullPivLU<Mat> lu(j);
    if (!lu.isInvertible()) throw SingularityError("singular Newton Jacobian");
    const double rcond = lu.rcond();
    if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon()))
      throw SingularityError("ill-conditioned Newton Jacobian (rcond " + format_number(rcond) + ")");
    return lu.solve(-g_at);
  };

  int it = 0;
  for (; it < opt.max_iter && norm > opt.tol; ++it) {
    const Vec dx = newton_step(x, gx);
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      const Vec trial = x + lambda * dx;
      const Vec gt = g(trial);
      if (gt.allFinite() && gt.norm() < norm) {
        x = trial;
        gx = gt;
        norm = gt.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(norm <= opt.tol)) throw ConvergenceError("Newton iteration did not converge", norm);

  for (int p = 0; p < opt.polish_steps && norm > 0.0; ++p) {
    Vec dx;
    try {
      dx = newton_step(x, gx);
    } catch (const SingularityError&) {
      break;
    }
    const Vec trial = x + dx;
    const Vec gt = g(trial);
    if (!gt.allFinite() || gt.norm() > norm) break;
    x = trial;
    gx = gt;
    norm = gt.norm();
  }
  return {x, norm, it};
}

}  // namespace numeric
}  // namespace stabman
