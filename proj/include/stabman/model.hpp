#pragma once

// Model interface: equilibrium conditions f(y', y, x', x, z) = 0 with
// exogenous dynamics z' = Lambda z, steady state, and derivative blocks.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "stabman/errors.hpp"
#include "stabman/numeric.hpp"

namespace stabman {

struct Dims {
  int n_x = 0;  ///< endogenous states
  int n_y = 0;  ///< controls
  int n_z = 0;  ///< exogenous states

  int n_u() const { return n_z + n_x; }
  int n_v() const { return n_y; }
  int n_w() const { return n_z + n_x + n_y; }
  int n_eq() const { return n_y + n_x; }
};

/// Derivatives of f with respect to (y', y, x', x, z).
struct Jacobians {
  Mat f1, f2, f3, f4, f5;
};

using ResidualFn =
    std::function<Vec(const Vec& y_next, const Vec& y, const Vec& x_next, const Vec& x, const Vec& z)>;
using JacobianFn =
    std::function<Jacobians(const Vec& y_next, const Vec& y, const Vec& x_next, const Vec& x, const Vec& z)>;

/// Residual layout: the first n_y entries are the forward-looking (Euler)
/// equations, the last n_x the state transitions.
struct ModelSpec {
  std::string name;
  Dims dims;
  ResidualFn residual;
  Mat lambda;           ///< n_z x n_z, spectral radius < 1
  JacobianFn jacobians; ///< optional; used instead of finite differences
  Vec steady_guess;     ///< (y, x), length n_y + n_x
  /// f is affine in (y', x') with constant coefficients f1, f3, so the
  /// next-period state is obtained by a linear solve.
  bool explicit_next = false;
};

struct SteadyState {
  Vec y_bar;
  Vec x_bar;
  double residual_norm = 0.0;
};

inline void validate(const ModelSpec& m) {
  const Dims& d = m.dims;
  if (d.n_x < 0 || d.n_y < 0 || d.n_z < 0 || d.n_eq() == 0)
    throw DimensionError("model '" + m.name + "': invalid dimensions");
  if (!m.residual) throw DimensionError("model '" + m.name + "': residual map missing");
  if (m.lambda.rows() != d.n_z || m.lambda.cols() != d.n_z)
    throw DimensionError("model '" + m.name + "': Lambda must be n_z x n_z");
  if (m.steady_guess.size() != d.n_eq())
    throw DimensionError("model '" + m.name + "': steady guess must have length n_y + n_x");
  if (d.n_z > 0 && !(numeric::spectral_radius(m.lambda) < 1.0))
    throw DomainError("model '" + m.name + "': Lambda has an eigenvalue of modulus >= 1");
}

namespace detail {
inline void expect_size(const Vec& v, int n, const char* what) {
  if (v.size() != n)
    throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) + ", expected " +
                         std::to_string(n));
}
}  // namespace detail

inline Vec eval_residual(const ModelSpec& m, const Vec& y_next, const Vec& y, const Vec& x_next,
                         const Vec& x, const Vec& z) {
  const Dims& d = m.dims;
  detail::expect_size(y_next, d.n_y, "y_next");
  detail::expect_size(y, d.n_y, "y");
  detail::expect_size(x_next, d.n_x, "x_next");
  detail::expect_size(x, d.n_x, "x");
  detail::expect_size(z, d.n_z, "z");
  Vec r = m.residual(y_next, y, x_next, x, z);
  detail::expect_size(r, d.n_eq(), "residual");
  return r;
}

/// Newton solve of f(y, y, x, x, 0) = 0 from the model's guess.
inline SteadyState find_steady_state(const ModelSpec& m, double tol = 1e-12, int max_iter = 100) {
  validate(m);
  if (!(tol > 0)) throw DomainError("steady-state tolerance must be positive");
  const Dims d = m.dims;
  const Vec zero_z = Vec::Zero(d.n_z);
  auto g = [&](const Vec& s) -> Vec {
    const Vec y = s.head(d.n_y);
    const Vec x = s.tail(d.n_x);
    return eval_residual(m, y, y, x, x, zero_z);
  };
  std::function<Mat(const Vec&)> jac;
  if (m.jacobians) {
    jac = [&](const Vec& s) -> Mat {
      const Vec y = s.head(d.n_y);
      const Vec x = s.tail(d.n_x);
      const Jacobians j = m.jacobians(y, y, x, x, zero_z);
      Mat out(d.n_eq(), d.n_eq());
      out << j.f1 + j.f2, j.f3 + j.f4;
      return out;
    };
  }
  numeric::NewtonOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  numeric::NewtonResult res;
  try {
    res = numeric::newton_solve(g, m.steady_guess, opt, jac);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("steady state of '" + m.name + "' not found", e.last_residual());
  }
  return {res.x.head(d.n_y), res.x.tail(d.n_x), res.residual_norm};
}

struct DerivativeOptions {
  double step_scale = 1.0;
  bool force_numeric = false;
};

/// Jacobian blocks at the steady state; analytic provider wins unless
/// `force_numeric` is set.
inline Jacobians numeric_derivatives(const ModelSpec& m, const SteadyState& ss,
                                     const DerivativeOptions& opt = {}) {
  const Dims d = m.dims;
  const Vec& yb = ss.y_bar;
  const Vec& xb = ss.x_bar;
  const Vec z0 = Vec::Zero(d.n_z);
  if (m.jacobians && !opt.force_numeric) return m.jacobians(yb, yb, xb, xb, z0);

  // Stack (y', y, x', x, z) and differentiate once.
  const int n_args = 2 * d.n_y + 2 * d.n_x + d.n_z;
  Vec point(n_args);
  point << yb, yb, xb, xb, z0;
  auto stacked = [&](const Vec& p) -> Vec {
    return eval_residual(m, p.segment(0, d.n_y), p.segment(d.n_y, d.n_y), p.segment(2 * d.n_y, d.n_x),
                         p.segment(2 * d.n_y + d.n_x, d.n_x), p.segment(2 * d.n_y + 2 * d.n_x, d.n_z));
  };
  const Mat j = numeric::central_jacobian(stacked, point, d.n_eq(), opt.step_scale);
  Jacobians out;
  out.f1 = j.middleCols(0, d.n_y);
  out.f2 = j.middleCols(d.n_y, d.n_y);
  out.f3 = j.middleCols(2 * d.n_y, d.n_x);
  out.f4 = j.middleCols(2 * d.n_y + d.n_x, d.n_x);
  out.f5 = j.middleCols(2 * d.n_y + 2 * d.n_x, d.n_z);
  return out;
}

/// Linear model f = M * (y', y, x', x, z); steady state at the origin when
/// M(y,y,x,x,0) is nonsingular.
inline ModelSpec make_linear_model(const Dims& d, const Mat& M, const Mat& lambda,
                                   std::string name = "linear") {
  const int n_args = 2 * d.n_y + 2 * d.n_x + d.n_z;
  if (M.rows() != d.n_eq() || M.cols() != n_args)
    throw DimensionError("linear model matrix must be (n_y+n_x) x (2n_y+2n_x+n_z)");
  ModelSpec m;
  m.name = std::move(name);
  m.dims = d;
  m.lambda = lambda;
  m.steady_guess = Vec::Zero(d.n_eq());
  m.explicit_next = true;
  m.residual = [M, d](const Vec& yn, const Vec& y, const Vec& xn, const Vec& x, const Vec& z) -> Vec {
    Vec args(2 * d.n_y + 2 * d.n_x + d.n_z);
    args << yn, y, xn, x, z;
    return M * args;
  };
  return m;
}

}  // namespace stabman
