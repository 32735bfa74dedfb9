#pragma once

// Approximate policy functions h_i of the stable manifold, the sufficient
// contraction conditions on a ball, and the a priori error bounds.

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "stabman/spectral.hpp"

namespace stabman {

struct DomainSpec {
  double r_u = 0.0;
  double r_v = 0.0;
  int sample_count = 4096;
};

inline void validate(const DomainSpec& d) {
  if (!(d.r_u > 0) || !(d.r_v > 0)) throw DomainError("domain radii must be positive");
  if (d.sample_count < 1) throw DomainError("sample_count must be positive");
}

// ---------------------------------------------------------------------------
// Deterministic sampling of U_{r_u} x V_{r_v}

namespace sampling {

inline double radical_inverse(unsigned long index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

inline constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                       43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

/// Halton point `index` (starting at 1) in (0,1)^dim.
inline Vec halton(unsigned long index, int dim) {
  if (dim > static_cast<int>(std::size(kPrimes))) throw DomainError("Halton sampling limited to 25 dims");
  Vec p(dim);
  for (int k = 0; k < dim; ++k) p(k) = radical_inverse(index, kPrimes[k]);
  return p;
}

/// Maps the cube [-1,1]^n onto the closed unit ball, faces onto the sphere.
inline Vec cube_to_ball(const Vec& c) {
  if (c.size() <= 1) return c;
  const double n2 = c.norm();
  if (n2 == 0.0) return c;
  return c * (c.cwiseAbs().maxCoeff() / n2);
}

/// Axis extremes and the centre of one ball: 2n + 1 points.
inline std::vector<Vec> ball_extremes(int n, double r) {
  std::vector<Vec> pts{Vec::Zero(n)};
  for (int k = 0; k < n; ++k) {
    for (double s : {-1.0, 1.0}) {
      Vec e = Vec::Zero(n);
      e(k) = s * r;
      pts.push_back(e);
    }
  }
  return pts;
}

/// `count` low-discrepancy points of U x V plus all pairs of axis extremes.
inline std::vector<std::pair<Vec, Vec>> sample_product(int n_u, int n_v, const DomainSpec& dom) {
  std::vector<std::pair<Vec, Vec>> out;
  for (const Vec& u : ball_extremes(n_u, dom.r_u))
    for (const Vec& v : ball_extremes(n_v, dom.r_v)) out.emplace_back(u, v);
  for (int i = 1; i <= dom.sample_count; ++i) {
    const Vec c = 2.0 * halton(i, n_u + n_v).array() - 1.0;
    out.emplace_back(dom.r_u * cube_to_ball(c.head(n_u)), dom.r_v * cube_to_ball(c.tail(n_v)));
  }
  return out;
}

/// `count` low-discrepancy points of the ball of radius r in R^n plus its
/// axis extremes.
inline std::vector<Vec> sample_ball(int n, double r, int count) {
  std::vector<Vec> out = ball_extremes(n, r);
  for (int i = 1; i <= count; ++i) {
    const Vec c = 2.0 * halton(i, n).array() - 1.0;
    out.push_back(r * cube_to_ball(c));
  }
  return out;
}

}  // namespace sampling

// ---------------------------------------------------------------------------
// Contraction conditions on U_{r_u} x V_{r_v}:
//   1. sup|G| < (1 - ||B^{-1}||) r_v / ||B^{-1}||
//   2. L < (1 / ||B^{-1}|| - ||A||) / 4
//   3. |Au + F(u, v)| <= r_u
// where L bounds the derivatives of F and G on the domain.

struct ConditionReport {
  DomainSpec domain;
  double sup_G = 0.0;
  double L = 0.0;  ///< max(||G'||, ||F'||) over the samples
  double normA = 0.0;
  double normBinv = 0.0;
  double cond1_rhs = 0.0;
  double cond2_rhs = 0.0;
  double max_next_u = 0.0;  ///< max |Au + F(u,v)|, compared with r_u
  double rho = 0.0;         ///< ||B^{-1}|| L
  bool finite = true;       ///< F and G finite at every sample
  bool cond1_ok = false;
  bool cond2_ok = false;
  bool cond3_ok = false;
  int samples_used = 0;

  bool all_ok() const { return cond1_ok && cond2_ok && cond3_ok; }
};

inline ConditionReport check_conditions(const TransformedSystem& sys, const DomainSpec& dom) {
  validate(dom);
  const int nu = sys.n_u();
  const int nv = sys.n_v();
  const Mat& A = sys.split.A;
  ConditionReport rep;
  rep.domain = dom;
  rep.normA = sys.split.normA;
  rep.normBinv = sys.split.normBinv;
  rep.cond1_rhs = (1.0 - rep.normBinv) / rep.normBinv * dom.r_v;
  rep.cond2_rhs = (1.0 / rep.normBinv - rep.normA) / 4.0;

  auto stacked = [&](const Vec& uv) { return sys.FG(uv.head(nu), uv.tail(nv)); };
  const auto samples = sampling::sample_product(nu, nv, dom);
  Vec uv(nu + nv);
  for (const auto& [u, v] : samples) {
    uv << u, v;
    Vec fg;
    Mat jac;
    try {
      fg = stacked(uv);
      jac = numeric::central_jacobian(stacked, uv, nu + nv);
    } catch (const Error&) {
      rep.finite = false;
      break;
    }
    if (!fg.allFinite() || !jac.allFinite()) {
      rep.finite = false;
      break;
    }
    rep.sup_G = std::max(rep.sup_G, fg.tail(nv).norm());
    rep.L = std::max({rep.L, numeric::spectral_norm(jac.bottomRows(nv)), numeric::spectral_norm(jac.topRows(nu))});
    rep.max_next_u = std::max(rep.max_next_u, (A * u + fg.head(nu)).norm());
    ++rep.samples_used;
  }
  if (!rep.finite) {
    rep.sup_G = rep.L = rep.max_next_u = rep.rho = INFINITY;
    return rep;
  }
  rep.rho = rep.normBinv * rep.L;
  rep.cond1_ok = rep.sup_G < rep.cond1_rhs;
  rep.cond2_ok = rep.L < rep.cond2_rhs;
  rep.cond3_ok = rep.max_next_u <= dom.r_u;
  return rep;
}

struct RadiusSearch {
  double r_min = 1e-3;
  double r_max = 1.0;
  int steps = 97;  ///< geometric grid points between r_min and r_max
  int sample_count = 4096;
};

struct VerifiedBall {
  DomainSpec domain;
  ConditionReport report;
};

/// Largest r on the ascending geometric grid such that Conditions 1-3 hold
/// on U_r x V_r for it and every smaller grid radius.
inline std::optional<VerifiedBall> find_verified_ball(const TransformedSystem& sys, const RadiusSearch& rs = {}) {
  std::optional<VerifiedBall> best;
  const double ratio = rs.steps > 1 ? std::pow(rs.r_max / rs.r_min, 1.0 / (rs.steps - 1)) : 1.0;
  double r = rs.r_min;
  for (int k = 0; k < rs.steps; ++k, r *= ratio) {
    const DomainSpec dom{r, r, rs.sample_count};
    ConditionReport rep = check_conditions(sys, dom);
    if (!rep.all_ok()) break;
    best = VerifiedBall{dom, rep};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Policy approximations

struct PolicyApprox {
  std::shared_ptr<const TransformedSystem> system;
  int order = 1;
  double inner_tol = 1e-12;
  int inner_max_iter = 200;
  DomainSpec domain;
  /// Reject top-level arguments outside U_{r_u}.
  bool enforce_domain = true;
};

struct PicardTrace {
  Vec value;
  std::vector<Vec> iterates;  ///< v_0 = 0, v_1, ..., v_k = value
  double last_step = 0.0;
};

namespace detail {

inline std::string fmt_u(const Vec& u) { return detail::describe(u); }

Vec policy_value(const TransformedSystem& sys, int order, const Vec& u, double tol, int max_iter,
                 PicardTrace* trace);

/// T_{order,u}(v) = -B^{-1} G(u,v) + B^{-1} h_{order-1}(Au + F(u,v)).
inline Vec apply_operator(const TransformedSystem& sys, int order, const Vec& u, const Vec& v, double tol,
                          int max_iter) {
  const Vec fg = sys.FG(u, v);
  const Mat& Binv = sys.split.B_inv;
  Vec out = -Binv * fg.tail(sys.n_v());
  if (order > 1) {
    const Vec u_next = sys.split.A * u + fg.head(sys.n_u());
    out += Binv * policy_value(sys, order - 1, u_next, tol, max_iter, nullptr);
  }
  return out;
}

inline Vec policy_value(const TransformedSystem& sys, int order, const Vec& u, double tol, int max_iter,
                        PicardTrace* trace) {
  const int nv = sys.n_v();
  Vec v = Vec::Zero(nv);
  if (order <= 0) return v;
  if (trace) trace->iterates.push_back(v);
  double step = INFINITY;
  for (int it = 0; it < max_iter; ++it) {
    const Vec next = apply_operator(sys, order, u, v, tol, max_iter);
    if (!next.allFinite())
      throw NonContractionError("policy iterate not finite at u = " + fmt_u(u), INFINITY, order);
    step = (next - v).norm();
    v = next;
    if (trace) trace->iterates.push_back(v);
    if (step <= tol) {
      if (trace) trace->last_step = step;
      return v;
    }
  }
  throw NonContractionError("Picard iteration for h_" + std::to_string(order) + " did not converge at u = " +
                                fmt_u(u) + "; contraction conditions likely violated",
                            step, order);
}

inline void check_policy_arg(const PolicyApprox& p, const Vec& u) {
  if (!p.system) throw DomainError("policy has no system");
  if (u.size() != p.system->n_u()) throw DimensionError("policy argument has wrong length");
  if (p.order < 0) throw DomainError("policy order must be >= 0");
  if (p.enforce_domain && u.norm() > p.domain.r_u * (1.0 + 1e-12))
    throw DomainError("|u| = " + format_number(u.norm()) + " outside U_r with r_u = " +
                      format_number(p.domain.r_u));
}

}  // namespace detail

/// h_i(u) as the fixed point of T_{i,u}, by Picard iteration from v = 0.
inline Vec eval_policy(const PolicyApprox& p, const Vec& u) {
  detail::check_policy_arg(p, u);
  return detail::policy_value(*p.system, p.order, u, p.inner_tol, p.inner_max_iter, nullptr);
}

/// Same as eval_policy, also returning the top-level Picard iterates.
inline PicardTrace eval_policy_trace(const PolicyApprox& p, const Vec& u) {
  detail::check_policy_arg(p, u);
  PicardTrace t;
  t.value = detail::policy_value(*p.system, p.order, u, p.inner_tol, p.inner_max_iter, &t);
  return t;
}

/// T_{i,u}(v) for an arbitrary v, with the nested h_{i-1} evaluated to the
/// policy's inner tolerance.
inline Vec apply_operator(const PolicyApprox& p, const Vec& u, const Vec& v) {
  if (p.order <= 0) return Vec::Zero(p.system->n_v());
  return detail::apply_operator(*p.system, p.order, u, v, p.inner_tol, p.inner_max_iter);
}

/// h_{1,1}(u) = -B^{-1} G(u, 0): the first Picard iterate of h_1.
inline Vec first_picard_iterate(const TransformedSystem& sys, const Vec& u) {
  return -sys.split.B_inv * sys.G(u, Vec::Zero(sys.n_v()));
}

/// Explicit graph-transform iteration
/// h_i(u) = -B^{-1} G(u, h_{i-1}(u)) + B^{-1} h_{i-1}(Au + F(u, h_{i-1}(u))).
inline Vec eval_policy_hadamard(const TransformedSystem& sys, int order, const Vec& u) {
  if (order <= 0) return Vec::Zero(sys.n_v());
  const Vec prev = eval_policy_hadamard(sys, order - 1, u);
  const Vec fg = sys.FG(u, prev);
  const Vec u_next = sys.split.A * u + fg.head(sys.n_u());
  return -sys.split.B_inv * fg.tail(sys.n_v()) + sys.split.B_inv * eval_policy_hadamard(sys, order - 1, u_next);
}

struct LyapunovPerronResult {
  Vec value;            ///< truncated sum (partial if diverged)
  bool diverged = false;
  int diverged_at = -1;  ///< step index k at which (u_k, v_k) left the limit
  double max_u = 0.0;    ///< max |u_k| seen
};

/// -sum_{k=0}^{horizon} B^{-k-1} G(u_k, v_k) along the forward orbit of
/// (u0, v0). Divergence is reported when |u_k| exceeds `u_limit` or the orbit
/// stops being finite.
inline LyapunovPerronResult eval_lyapunov_perron(const TransformedSystem& sys, int horizon, const Vec& u0,
                                                 const Vec& v0, double u_limit = INFINITY) {
  if (horizon < 0) throw DomainError("horizon must be >= 0");
  const Mat& A = sys.split.A;
  const Mat& B = sys.split.B;
  const Mat& Binv = sys.split.B_inv;
  LyapunovPerronResult res;
  res.value = Vec::Zero(sys.n_v());
  Vec u = u0;
  Vec v = v0;
  Mat Bpow = Binv;
  for (int k = 0; k <= horizon; ++k) {
    res.max_u = std::max(res.max_u, u.norm());
    if (!u.allFinite() || !v.allFinite() || u.norm() > u_limit) {
      res.diverged = true;
      res.diverged_at = k;
      return res;
    }
    Vec fg;
    try {
      fg = sys.FG(u, v);
    } catch (const Error&) {
      fg = Vec::Constant(sys.n_u() + sys.n_v(), NAN);
    }
    if (!fg.allFinite()) {
      res.diverged = true;
      res.diverged_at = k;
      return res;
    }
    res.value -= Bpow * fg.tail(sys.n_v());
    const Vec un = A * u + fg.head(sys.n_u());
    v = B * v + fg.tail(sys.n_v());
    u = un;
    Bpow = Binv * Bpow;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Bounds

struct LemmaSequence {
  std::vector<double> s;  ///< s_0 = 0, ..., s_n
  double s1_star = 0.0;
  double s2_star = INFINITY;
};

/// s_{i+1} = (rho + (||B^{-1}|| ||A|| + rho) s_i) / (1 - rho - rho s_i), and
/// the roots of rho s^2 - (1 - 2 rho - c) s + rho = 0, c = ||B^{-1}|| ||A||.
inline LemmaSequence lemma_recursion(double rho, double normA, double normBinv, int n) {
  const double c = normBinv * normA;
  if (!(rho >= 0.0) || !(rho < (1.0 - c) / 4.0))
    throw DomainError("lemma recursion requires 0 <= rho < (1 - ||B^{-1}|| ||A||) / 4");
  if (n < 0) throw DomainError("n must be >= 0");
  LemmaSequence out;
  out.s.reserve(n + 1);
  out.s.push_back(0.0);
  for (int i = 0; i < n; ++i) {
    const double si = out.s.back();
    out.s.push_back((rho + (c + rho) * si) / (1.0 - rho - rho * si));
  }
  // Roots multiply to one; the small root in cancellation-free form.
  const double b = 1.0 - 2.0 * rho - c;
  const double disc = std::sqrt(b * b - 4.0 * rho * rho);
  out.s1_star = 2.0 * rho / (b + disc);
  out.s2_star = rho > 0.0 ? (b + disc) / (2.0 * rho) : INFINITY;
  return out;
}

struct ErrorBound {
  double a = 0.0;        ///< 2||B^{-1}|| / (1 + ||B^{-1}|| ||A||)
  double apriori = 0.0;  ///< a^{n-1} ||B^{-1}|| (1 - ||B^{-1}|| L)^{-1} h_tail
  double s1_star = 0.0;
  double s2_star = INFINITY;
  double deriv_bound = INFINITY;  ///< (1 - ||B^{-1}|| L) / (||B^{-1}|| L)
};

inline double rate_constant(double normA, double normBinv) { return 2.0 * normBinv / (1.0 + normBinv * normA); }

/// a (||A|| + theta)^2, the geometric rate of |h_n - h|.
inline double geometric_rate(double a, double normA, double theta) { return a * (normA + theta) * (normA + theta); }

/// sup |h_i| bound: (1 - ||B^{-1}||^{i+1}) ||B^{-1}|| ||G|| / (1 - ||B^{-1}||).
inline double policy_norm_bound(double normBinv, double sup_G, int i) {
  return (1.0 - std::pow(normBinv, i + 1)) * normBinv * sup_G / (1.0 - normBinv);
}

/// h_tail is the caller's bound on |h(u_{t+n})|; defaults to r_v.
inline ErrorBound error_bound(const SpectralSplit& split, const ConditionReport& report, int n,
                              std::optional<double> h_tail = std::nullopt) {
  if (!report.cond2_ok) throw DomainError("error bound requires Condition 2");
  if (n < 1) throw DomainError("error bound requires n >= 1");
  const double tail = h_tail.value_or(report.domain.r_v);
  if (!(tail >= 0.0)) throw DomainError("h_tail must be >= 0");
  const double nb = split.normBinv;
  const double rho = nb * report.L;
  ErrorBound eb;
  eb.a = rate_constant(split.normA, nb);
  eb.apriori = std::pow(eb.a, n - 1) * nb / (1.0 - rho) * tail;
  const LemmaSequence lem = lemma_recursion(rho, split.normA, nb, 0);
  eb.s1_star = lem.s1_star;
  eb.s2_star = lem.s2_star;
  eb.deriv_bound = rho > 0.0 ? (1.0 - rho) / rho : INFINITY;
  return eb;
}

}  // namespace stabman
