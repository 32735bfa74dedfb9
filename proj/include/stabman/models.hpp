#pragma once

// Small test models with known transformed systems.

#include "stabman/model.hpp"

namespace stabman {

/// One exogenous state z' = 0.5 z and one control with
/// y' = 2 y + g_uu z^2 + g_uv z y. The split is already diagonal, so u = z,
/// v = y, A = 0.5, B = 2, F = 0 and G(u, v) = g_uu u^2 + g_uv u v.
inline ModelSpec exo_test_model(double g_uu = 0.1, double g_uv = 0.05) {
  ModelSpec m;
  m.name = "exo_test";
  m.dims = Dims{0, 1, 1};
  m.lambda = Mat::Constant(1, 1, 0.5);
  m.steady_guess = Vec::Zero(1);
  m.explicit_next = true;
  m.residual = [g_uu, g_uv](const Vec& yn, const Vec& y, const Vec&, const Vec&, const Vec& z) -> Vec {
    return Vec::Constant(1, yn(0) - 2.0 * y(0) - g_uu * z(0) * z(0) - g_uv * z(0) * y(0));
  };
  m.jacobians = [g_uu, g_uv](const Vec&, const Vec& y, const Vec&, const Vec&, const Vec& z) -> Jacobians {
    Jacobians j;
    j.f1 = Mat::Constant(1, 1, 1.0);
    j.f2 = Mat::Constant(1, 1, -2.0 - g_uv * z(0));
    j.f3 = Mat::Zero(1, 0);
    j.f4 = Mat::Zero(1, 0);
    j.f5 = Mat::Constant(1, 1, -2.0 * g_uu * z(0) - g_uv * y(0));
    return j;
  };
  return m;
}

}  // namespace stabman
