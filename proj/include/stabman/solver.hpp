#pragma once

// Equilibrium paths on the approximate stable manifold: initial conditions,
// deterministic and certainty-equivalent stochastic simulation, and the
// extended-path iteration for models with exogenous u.

#include <cmath>
#include <limits>
#include <vector>

#include "stabman/manifold.hpp"

namespace stabman {

struct Trajectory {
  std::vector<int> times;
  std::vector<Vec> z_path, x_path, y_path;  ///< levels
  std::vector<Vec> u_path, v_path;          ///< transformed deviations
  /// |f(y_{t+1}, y_t, x_{t+1}, x_t, z_t)|; NaN when the next period is not
  /// available or the system has no source model.
  std::vector<double> residual_norm;
  bool truncated = false;
  int truncated_at = -1;  ///< first t with |u_t| > r_u

  std::size_t size() const { return times.size(); }
};

namespace detail {

struct Levels {
  Vec z, x, y;
};

inline Levels to_levels(const TransformedSystem& sys, const Vec& u, const Vec& v) {
  const Dims d = sys.dims;
  const Vec w = sys.to_deviation(u, v);
  Levels l{w.head(d.n_z), w.segment(d.n_z, d.n_x), w.tail(d.n_y)};
  if (sys.base) {
    l.x += sys.base->ss.x_bar;
    l.y += sys.base->ss.y_bar;
  }
  return l;
}

inline double residual_between(const TransformedSystem& sys, const Levels& now, const Levels& next) {
  if (!sys.base) return std::numeric_limits<double>::quiet_NaN();
  try {
    return eval_residual(sys.base->model, next.y, now.y, next.x, now.x, now.z).norm();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

inline void push_period(Trajectory& tr, int t, const Vec& u, const Vec& v, const Levels& l) {
  tr.times.push_back(t);
  tr.u_path.push_back(u);
  tr.v_path.push_back(v);
  tr.z_path.push_back(l.z);
  tr.x_path.push_back(l.x);
  tr.y_path.push_back(l.y);
}

inline PolicyApprox unrestricted(const PolicyApprox& p) {
  PolicyApprox q = p;
  q.enforce_domain = false;
  return q;
}

inline Vec closed_loop_step(const PolicyApprox& p, const Vec& u, const Vec& v) {
  return p.system->split.A * u + p.system->F(u, v);
}

}  // namespace detail

struct InitialOptions {
  /// Above the policy's own inner tolerance, which sets the noise floor.
  double tol = 1e-11;
  int max_iter = 50;
};

/// u_0 with the first n_z + n_x rows of Z (u_0, h_i(u_0)) equal to
/// (z_0, x_0 - x_bar), by Newton from the solution with h_i = 0.
inline Vec solve_initial(const PolicyApprox& p, const Vec& x0, const Vec& z0, const InitialOptions& opt = {}) {
  if (!p.system) throw DomainError("policy has no system");
  const TransformedSystem& sys = *p.system;
  const Dims d = sys.dims;
  detail::expect_size(x0, d.n_x, "x0");
  detail::expect_size(z0, d.n_z, "z0");
  const int nu = sys.n_u();
  Vec target(nu);
  target << z0, (sys.base ? Vec(x0 - sys.base->ss.x_bar) : x0);

  const Mat Zuu = sys.split.Z.topLeftCorner(nu, nu);
  const Mat Zuv = sys.split.Z.topRightCorner(nu, sys.n_v());
  if (!target.allFinite()) throw InfeasibleInitialError("initial state is not finite");
  Eigen::FullPivLU<Mat> lu(Zuu);
  if (!lu.isInvertible()) throw InfeasibleInitialError("state block of Z is singular");
  if (target.norm() == 0.0) return Vec::Zero(nu);
  const Vec guess = lu.solve(target);

  const PolicyApprox q = detail::unrestricted(p);
  auto g = [&](const Vec& u) -> Vec {
    Vec v;
    try {
      v = eval_policy(q, u);
    } catch (const Error&) {
      return Vec::Constant(nu, std::numeric_limits<double>::quiet_NaN());
    }
    return Zuu * u + Zuv * v - target;
  };
  numeric::NewtonOptions nopt;
  nopt.tol = opt.tol;
  nopt.max_iter = opt.max_iter;
  Vec u0;
  try {
    u0 = numeric::newton_solve(g, guess, nopt).x;
  } catch (const Error& e) {
    throw InfeasibleInitialError(std::string("no initial u_0 for the given state: ") + e.what());
  }
  if (p.enforce_domain && u0.norm() > p.domain.r_u * (1.0 + 1e-12))
    throw InfeasibleInitialError("initial u_0 with |u_0| = " + format_number(u0.norm()) +
                                 " lies outside U_r with r_u = " + format_number(p.domain.r_u));
  return u0;
}

/// Iterates u_{t+1} = A u_t + F(u_t, h_i(u_t)) for t = 0..T and records the
/// levels of every period. Stops at the first u_t outside U_{r_u}.
inline Trajectory simulate(const PolicyApprox& p, const Vec& u0, int T) {
  if (!p.system) throw DomainError("policy has no system");
  if (T < 0) throw DomainError("T must be >= 0");
  const TransformedSystem& sys = *p.system;
  const PolicyApprox q = detail::unrestricted(p);
  const double limit = p.enforce_domain ? p.domain.r_u * (1.0 + 1e-12) : INFINITY;
  if (u0.size() != sys.n_u()) throw DimensionError("u0 has wrong length");
  Trajectory tr;
  std::vector<detail::Levels> levels;
  Vec u = u0;
  for (int t = 0; t <= T; ++t) {
    Vec v;
    bool ok = u.allFinite() && u.norm() <= limit;
    if (ok) {
      try {
        v = eval_policy(q, u);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) {
      tr.truncated = true;
      tr.truncated_at = t;
      break;
    }
    levels.push_back(detail::to_levels(sys, u, v));
    detail::push_period(tr, t, u, v, levels.back());
    u = detail::closed_loop_step(p, u, v);
  }
  // u is now the successor of the last recorded period.
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (k + 1 < levels.size()) {
      tr.residual_norm.push_back(detail::residual_between(sys, levels[k], levels[k + 1]));
      continue;
    }
    double r = std::numeric_limits<double>::quiet_NaN();
    try {
      if (u.allFinite()) r = detail::residual_between(sys, levels[k], detail::to_levels(sys, u, eval_policy(q, u)));
    } catch (const Error&) {
    }
    tr.residual_norm.push_back(r);
  }
  return tr;
}

/// Certainty-equivalent path: in every period u_t is re-solved from the
/// current (x_t, z_t) assuming no future shocks, the closed-loop map is
/// applied once, and shocks[t + 1] is added to z_{t+1}. shocks[0] perturbs
/// z_0; a missing shocks[T] counts as zero.
inline Trajectory simulate_stochastic(const PolicyApprox& p, const Vec& x0, const Vec& z0,
                                      const std::vector<Vec>& shocks, int T, const InitialOptions& opt = {}) {
  if (!p.system) throw DomainError("policy has no system");
  if (T < 0) throw DomainError("T must be >= 0");
  if (static_cast<int>(shocks.size()) < T) throw DomainError("need at least T shocks");
  const TransformedSystem& sys = *p.system;
  const Dims d = sys.dims;
  for (const Vec& e : shocks) detail::expect_size(e, d.n_z, "shock");
  auto shock = [&](int t) -> Vec { return t < static_cast<int>(shocks.size()) ? shocks[t] : Vec::Zero(d.n_z); };
  const PolicyApprox q = detail::unrestricted(p);

  Trajectory tr;
  Vec x = x0;
  Vec z = z0 + shock(0);
  Vec u = solve_initial(p, x, z, opt);
  Vec v = eval_policy(q, u);
  detail::Levels lv = detail::to_levels(sys, u, v);
  for (int t = 0; t <= T; ++t) {
    detail::push_period(tr, t, u, v, lv);
    tr.residual_norm.push_back(std::numeric_limits<double>::quiet_NaN());
    const Vec u_step = detail::closed_loop_step(p, u, v);
    const detail::Levels l_step = detail::to_levels(sys, u_step, eval_policy(q, u_step));
    tr.residual_norm.back() = detail::residual_between(sys, lv, l_step);
    if (t == T) break;
    x = l_step.x;
    z = l_step.z + shock(t + 1);
    try {
      u = solve_initial(p, x, z, opt);
    } catch (const InfeasibleInitialError&) {
      tr.truncated = true;
      tr.truncated_at = t + 1;
      break;
    }
    v = eval_policy(q, u);
    lv = detail::to_levels(sys, u, v);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Extended path

struct EPConfig {
  int horizon = 20;      ///< n: periods t..t+n, terminal value at t+n+1
  int type2_iters = 4;   ///< sweeps j = 1..type2_iters
  double tol = 1e-12;    ///< Type I (period-wise) Picard tolerance
  int max_inner_iter = 200;
};

struct EPResult {
  std::vector<Vec> u_path;  ///< u_t, ..., u_{t+n}
  /// V[j][i] = V^j_{n,t+i}; V[0] is the zero start, V[j][n+1] = 0 throughout.
  std::vector<std::vector<Vec>> V;
};

/// u_{i+1} = A u_i + F(u_i, 0) for i = 0..horizon; valid when F does not
/// depend on v.
inline std::vector<Vec> exogenous_path(const TransformedSystem& sys, const Vec& u0, int horizon) {
  std::vector<Vec> path{u0};
  const Vec zero = Vec::Zero(sys.n_v());
  for (int i = 0; i < horizon; ++i) path.push_back(sys.split.A * path.back() + sys.F(path.back(), zero));
  return path;
}

namespace detail {

/// Probes F(u, v) against F(u, 0) at the path points.
inline void require_exogenous(const TransformedSystem& sys, const std::vector<Vec>& u_path, double tol) {
  const int nv = sys.n_v();
  for (const Vec& u : u_path) {
    const Vec f0 = sys.F(u, Vec::Zero(nv));
    const double scale = 1.0 + u.norm();
    for (int k = 0; k < nv; ++k) {
      for (double s : {-1.0, 1.0}) {
        Vec v = Vec::Zero(nv);
        v(k) = s * scale;
        if ((sys.F(u, v) - f0).norm() > tol * scale)
          throw DomainError("extended path requires F independent of v (exogenous u)");
      }
    }
  }
}

}  // namespace detail

/// Fair-Taylor sweeps V^{j+1}_i = -B^{-1} G(u_i, V^{j+1}_i) + B^{-1} V^j_{i+1}
/// with V^j_{n+1} = 0; each period is a Picard solve (Type I iteration).
inline EPResult solve_ep(const TransformedSystem& sys, const std::vector<Vec>& u_path, const EPConfig& cfg) {
  if (cfg.horizon < 1) throw DomainError("EP horizon must be >= 1");
  if (cfg.type2_iters < 0) throw DomainError("type2_iters must be >= 0");
  if (!(cfg.tol > 0)) throw DomainError("EP tolerance must be positive");
  if (static_cast<int>(u_path.size()) != cfg.horizon + 1)
    throw DimensionError("u_path must hold horizon + 1 points");
  for (const Vec& u : u_path) detail::expect_size(u, sys.n_u(), "u_path entry");
  detail::require_exogenous(sys, u_path, 1e-12);

  const int n = cfg.horizon;
  const int nv = sys.n_v();
  const Mat& Binv = sys.split.B_inv;
  EPResult res;
  res.u_path = u_path;
  res.V.assign(1, std::vector<Vec>(n + 2, Vec::Zero(nv)));
  for (int j = 1; j <= cfg.type2_iters; ++j) {
    const std::vector<Vec>& prev = res.V.back();
    std::vector<Vec> cur(n + 2, Vec::Zero(nv));
    for (int i = 0; i <= n; ++i) {
      const Vec carry = Binv * prev[i + 1];
      Vec v = Vec::Zero(nv);
      double step = INFINITY;
      int it = 0;
      for (; it < cfg.max_inner_iter; ++it) {
        const Vec next = -Binv * sys.G(u_path[i], v) + carry;
        if (!next.allFinite()) break;
        step = (next - v).norm();
        v = next;
        if (step <= cfg.tol) break;
      }
      if (!(step <= cfg.tol))
        throw NonContractionError("EP Type I iteration did not converge at sweep " + std::to_string(j) +
                                      ", period " + std::to_string(i),
                                  step, j);
      cur[i] = v;
    }
    res.V.push_back(std::move(cur));
  }
  return res;
}

}  // namespace stabman
