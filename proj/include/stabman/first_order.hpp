#pragma once

// First-order vector form w' = K w + N_1(w) in deviations w = (z, x^, y^).

#include <memory>

#include "stabman/model.hpp"

namespace stabman {

struct FirstOrderSystem {
  ModelSpec model;
  SteadyState ss;
  Jacobians jac;
  Mat phi;
  Mat gamma;
  Mat K;
  /// N_1: exact next-period deviation minus K w.
  VectorMap nonlinear;
  /// Exact one-step map w -> w'.
  VectorMap step;

  const Dims& dims() const { return model.dims; }
};

struct FirstOrderOptions {
  double inner_tol = 1e-13;
  int inner_max_iter = 50;
  /// Relative smallest singular value of Phi - Gamma treated as zero.
  double unit_root_tol = 1e-6;
};

namespace detail {

inline std::string describe(const Vec& w) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < w.size(); ++i) s += (i ? ", " : "") + std::to_string(w(i));
  return s + ")";
}

}  // namespace detail

/// Assembles Phi, Gamma and K = Phi^{-1} Gamma from the derivative blocks,
/// and the nonlinear remainder. Throws UnsupportedModelError when Phi is
/// singular: that case needs a generalized (QZ) decomposition.
inline FirstOrderSystem build_first_order(const ModelSpec& model, const SteadyState& ss,
                                          const FirstOrderOptions& opt = {}) {
  validate(model);
  const Dims d = model.dims;
  FirstOrderSystem sys;
  sys.model = model;
  sys.ss = ss;
  sys.jac = numeric_derivatives(model, ss);
  const Jacobians& j = sys.jac;

  const int nw = d.n_w();
  const int nz = d.n_z;
  const int ne = d.n_eq();
  sys.phi = Mat::Zero(nw, nw);
  sys.gamma = Mat::Zero(nw, nw);
  sys.phi.topLeftCorner(nz, nz).setIdentity();
  sys.phi.block(nz, nz, ne, d.n_x) = j.f3;
  sys.phi.block(nz, nz + d.n_x, ne, d.n_y) = j.f1;
  sys.gamma.topLeftCorner(nz, nz) = model.lambda;
  sys.gamma.block(nz, 0, ne, nz) = -j.f5;
  sys.gamma.block(nz, nz, ne, d.n_x) = -j.f4;
  sys.gamma.block(nz, nz + d.n_x, ne, d.n_y) = -j.f2;

  Eigen::FullPivLU<Mat> lu(sys.phi);
  if (!lu.isInvertible() || lu.rcond() < 1e-12)
    throw UnsupportedModelError("model '" + model.name +
                                "': Phi = [[I,0,0],[0,f3,f1]] is singular; this needs a generalized "
                                "(QZ) eigenvalue decomposition, which is not supported");
  sys.K = lu.solve(sys.gamma);

  // K has an eigenvalue at exactly 1 iff Phi - Gamma is singular. Near such
  // a point the steady-state Newton solve converges only linearly, so the
  // eigenvalue of K can land outside the unit-circle guard band; test the
  // matrix directly.
  const Eigen::JacobiSVD<Mat> svd(sys.phi - sys.gamma);
  const Vec& sv = svd.singularValues();
  if (sv.size() > 0 && sv(sv.size() - 1) <= opt.unit_root_tol * sv(0))
    throw UnitRootError("model '" + model.name + "': K has an eigenvalue at 1 (degenerate steady state)");

  // (x^', y^') block of the forward-looking rows, for the linear solve.
  const Mat next_block = sys.phi.bottomRightCorner(ne, d.n_x + d.n_y);
  const Eigen::PartialPivLU<Mat> next_lu(next_block);
  const Vec yb = ss.y_bar;
  const Vec xb = ss.x_bar;
  const ModelSpec m = model;
  const Mat K = sys.K;
  const Mat lambda = model.lambda;

  auto residual_at = [m, yb, xb, d](const Vec& w, const Vec& next_dev) -> Vec {
    const Vec z = w.head(d.n_z);
    const Vec xh = w.segment(d.n_z, d.n_x);
    const Vec yh = w.tail(d.n_y);
    const Vec xn = next_dev.head(d.n_x);
    const Vec yn = next_dev.tail(d.n_y);
    return eval_residual(m, yb + yn, yb + yh, xb + xn, xb + xh, z);
  };

  if (model.explicit_next) {
    sys.step = [residual_at, next_lu, lambda, d](const Vec& w) -> Vec {
      // f = f3 x^' + f1 y^' + R(w), so (x^', y^') = -(f3, f1)^{-1} R(w).
      const Vec rest = residual_at(w, Vec::Zero(d.n_x + d.n_y));
      Vec out(d.n_w());
      out.head(d.n_z) = lambda * w.head(d.n_z);
      out.tail(d.n_x + d.n_y) = next_lu.solve(-rest);
      return out;
    };
  } else {
    const double tol = opt.inner_tol;
    const int max_iter = opt.inner_max_iter;
    sys.step = [residual_at, K, lambda, d, tol, max_iter](const Vec& w) -> Vec {
      const Vec guess = (K * w).tail(d.n_x + d.n_y);
      numeric::NewtonOptions nopt;
      nopt.tol = tol * (1.0 + w.norm());
      nopt.max_iter = max_iter;
      numeric::NewtonResult res;
      try {
        res = numeric::newton_solve([&](const Vec& next) { return residual_at(w, next); }, guess, nopt);
      } catch (const Error& e) {
        throw EvaluationError("implicit next-period solve failed at w = " + detail::describe(w) + ": " +
                              e.what());
      }
      Vec out(d.n_w());
      out.head(d.n_z) = lambda * w.head(d.n_z);
      out.tail(d.n_x + d.n_y) = res.x;
      return out;
    };
  }
  const VectorMap step = sys.step;
  sys.nonlinear = [step, K](const Vec& w) -> Vec { return step(w) - K * w; };
  return sys;
}

}  // namespace stabman
