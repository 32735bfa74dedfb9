#pragma once

// Stable/unstable block decoupling K = Z diag(A, B) Z^{-1} and the
// transformed system u' = Au + F(u,v), v' = Bv + G(u,v).

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "stabman/first_order.hpp"

namespace stabman {

struct SpectralSplit {
  Mat Z;
  Mat Z_inv;
  Mat A;  ///< stable block, n_u x n_u
  Mat B;  ///< unstable block, n_v x n_v
  Mat B_inv;
  double normA = 0.0;
  double normBinv = 0.0;
  double rhoA = 0.0;     ///< spectral radius of A
  double rhoBinv = 0.0;  ///< spectral radius of B^{-1}
  double gamma_slack = 0.0;
  int n_u = 0;
  int n_v = 0;
};

struct SplitOptions {
  double eps_unit = 1e-8;
  std::array<double, 4> deltas{1.0, 0.5, 0.1, 0.01};
};

namespace detail {

inline lapack_logical select_stable(const double* re, const double* im) {
  return std::hypot(*re, *im) < 1.0 ? 1 : 0;
}

/// Row indices where 1x1 / 2x2 diagonal blocks of a quasi-triangular matrix start.
inline std::vector<int> diagonal_block_starts(const Mat& t) {
  std::vector<int> starts;
  const int n = static_cast<int>(t.rows());
  for (int i = 0; i < n;) {
    starts.push_back(i);
    i += (i + 1 < n && t(i + 1, i) != 0.0) ? 2 : 1;
  }
  return starts;
}

inline Mat diag_similarity(const Mat& m, const Vec& d) {
  return d.cwiseInverse().asDiagonal() * m * d.asDiagonal();
}

/// Diagonal scaling making every 2x2 block of a quasi-triangular matrix
/// normal (equal-magnitude off-diagonals).
inline Vec normalize_2x2_blocks(const Mat& t) {
  Vec d = Vec::Ones(t.rows());
  for (int s : diagonal_block_starts(t)) {
    if (s + 1 < t.rows() && t(s + 1, s) != 0.0 && t(s, s + 1) != 0.0)
      d(s + 1) = std::sqrt(std::abs(t(s + 1, s) / t(s, s + 1)));
  }
  return d;
}

/// diag(delta^0, delta^1, ...) with one exponent per diagonal block.
inline Vec block_powers(const Mat& t, double delta) {
  Vec d(t.rows());
  const auto starts = diagonal_block_starts(t);
  for (std::size_t b = 0; b < starts.size(); ++b) {
    const int end = b + 1 < starts.size() ? starts[b + 1] : static_cast<int>(t.rows());
    for (int i = starts[b]; i < end; ++i) d(i) = std::pow(delta, static_cast<double>(b));
  }
  return d;
}

inline void finish_norms(SpectralSplit& s) {
  s.B_inv = s.n_v > 0 ? Mat(s.B.inverse()) : Mat(0, 0);
  s.normA = numeric::spectral_norm(s.A);
  s.normBinv = numeric::spectral_norm(s.B_inv);
  s.rhoA = numeric::spectral_radius(s.A);
  s.rhoBinv = numeric::spectral_radius(s.B_inv);
  s.gamma_slack = std::max(s.normA - s.rhoA, s.normBinv - s.rhoBinv);
}

}  // namespace detail

/// Eigenvalues of K sorted by modulus.
inline std::vector<std::complex<double>> sorted_eigenvalues(const Mat& K) {
  Eigen::EigenSolver<Mat> es(K, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + K.rows());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  return ev;
}

/// Ordered real Schur form, Sylvester decoupling of the coupling block and a
/// diagonal balancing of each block so that ||A|| < 1 and ||B^{-1}|| < 1.
inline SpectralSplit schur_split(const Mat& K, int n_u, const SplitOptions& opt = {}) {
  const int n = static_cast<int>(K.rows());
  if (K.cols() != n || n_u < 0 || n_u > n) throw DimensionError("schur_split: bad dimensions");
  const int n_v = n - n_u;

  int stable = 0;
  for (const auto& ev : sorted_eigenvalues(K)) {
    const double mod = std::abs(ev);
    if (std::abs(mod - 1.0) <= opt.eps_unit)
      throw UnitRootError("eigenvalue of modulus " + format_number(mod) + " on the unit circle");
    if (mod < 1.0) ++stable;
  }
  if (stable != n_u) throw BlanchardKahnError(stable, n_u);

  SpectralSplit s;
  s.n_u = n_u;
  s.n_v = n_v;

  const bool block_diagonal = (n_u == 0 || n_v == 0) ||
                              (K.topRightCorner(n_u, n_v).cwiseAbs().maxCoeff() == 0.0 &&
                               K.bottomLeftCorner(n_v, n_u).cwiseAbs().maxCoeff() == 0.0);
  if (block_diagonal) {
    s.A = K.topLeftCorner(n_u, n_u);
    s.B = K.bottomRightCorner(n_v, n_v);
    detail::finish_norms(s);
    if (s.normA < 1.0 && s.normBinv < 1.0) {
      s.Z = Mat::Identity(n, n);
      s.Z_inv = Mat::Identity(n, n);
      return s;
    }
  }

  // Ordered real Schur form: K = Q T Q', stable eigenvalues leading.
  Mat T = K;
  Mat Q(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', detail::select_stable, n, T.data(), n, &sdim,
                                  wr.data(), wi.data(), Q.data(), n);
  if (info != 0) throw SpectralError("real Schur factorization failed (info " + std::to_string(info) + ")");
  if (sdim != n_u) throw BlanchardKahnError(static_cast<int>(sdim), n_u);

  // T11 X - X T22 = -T12 zeroes the coupling under [[I, X], [0, I]].
  Mat X = Mat::Zero(n_u, n_v);
  if (n_u > 0 && n_v > 0) {
    const Mat T11 = T.topLeftCorner(n_u, n_u);
    const Mat T22 = T.bottomRightCorner(n_v, n_v);
    X = -T.topRightCorner(n_u, n_v);
    double scale = 1.0;
    info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'N', 'N', -1, n_u, n_v, T11.data(), n_u, T22.data(), n_v, X.data(),
                          n_u, &scale);
    if (info < 0) throw SpectralError("Sylvester solve failed (info " + std::to_string(info) + ")");
    X /= scale;
  }
  Mat Zc = Q;
  if (n_u > 0 && n_v > 0) Zc.rightCols(n_v) += Q.leftCols(n_u) * X;
  Mat A = T.topLeftCorner(n_u, n_u);
  Mat B = T.bottomRightCorner(n_v, n_v);

  // Unit columns, sign fixed by the largest-magnitude entry.
  Vec d(n);
  for (int j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    Zc.col(j).cwiseAbs().maxCoeff(&imax);
    d(j) = (Zc(imax, j) < 0 ? -1.0 : 1.0) / Zc.col(j).norm();
  }
  auto apply = [&](const Vec& du, const Vec& dv) {
    A = detail::diag_similarity(A, du);
    B = detail::diag_similarity(B, dv);
    d.head(n_u) = d.head(n_u).cwiseProduct(du);
    d.tail(n_v) = d.tail(n_v).cwiseProduct(dv);
  };
  {
    const Vec d0 = d;
    d.setOnes();
    apply(d0.head(n_u), d0.tail(n_v));
  }
  apply(detail::normalize_2x2_blocks(A), detail::normalize_2x2_blocks(B));

  // Per-block delta powers, keeping the candidate with the smallest norm.
  auto best_delta = [&](const Mat& t, bool invert) {
    Vec best = Vec::Ones(t.rows());
    double best_norm = INFINITY;
    for (double delta : opt.deltas) {
      const Vec dv = detail::block_powers(t, delta);
      const Mat bal = detail::diag_similarity(t, dv);
      const double nrm = numeric::spectral_norm(invert ? Mat(bal.inverse()) : bal);
      if (nrm < best_norm) {
        best_norm = nrm;
        best = dv;
      }
    }
    return best;
  };
  apply(n_u > 0 ? best_delta(A, false) : Vec(0), n_v > 0 ? best_delta(B, true) : Vec(0));

  s.A = A;
  s.B = B;
  s.Z = Zc * d.asDiagonal();
  Mat unit_upper_inv = Mat::Identity(n, n);
  if (n_u > 0 && n_v > 0) unit_upper_inv.topRightCorner(n_u, n_v) = -X;
  s.Z_inv = d.cwiseInverse().asDiagonal() * unit_upper_inv * Q.transpose();
  detail::finish_norms(s);
  if (!(s.normA < 1.0) || !(s.normBinv < 1.0))
    throw SpectralError("balancing could not reach ||A|| < 1 and ||B^{-1}|| < 1 (got " +
                        format_number(s.normA) + ", " + format_number(s.normBinv) + ")");
  return s;
}

/// Change of basis within each block: Z -> Z diag(du, dv).
inline SpectralSplit rescale_split(const SpectralSplit& s, const Vec& du, const Vec& dv) {
  SpectralSplit out = s;
  Vec d(s.n_u + s.n_v);
  d << du, dv;
  out.Z = s.Z * d.asDiagonal();
  out.Z_inv = d.cwiseInverse().asDiagonal() * s.Z_inv;
  out.A = detail::diag_similarity(s.A, du);
  out.B = detail::diag_similarity(s.B, dv);
  detail::finish_norms(out);
  return out;
}

/// u' = Au + F(u,v), v' = Bv + G(u,v), with (F, G) = Z^{-1} N_1(Z (u, v)).
struct TransformedSystem {
  SpectralSplit split;
  Dims dims;
  /// Stacked (F(u,v), G(u,v)).
  std::function<Vec(const Vec& u, const Vec& v)> FG;
  /// Source first-order system; null for systems assembled directly.
  std::shared_ptr<const FirstOrderSystem> base;

  int n_u() const { return split.n_u; }
  int n_v() const { return split.n_v; }
  Vec F(const Vec& u, const Vec& v) const { return FG(u, v).head(n_u()); }
  Vec G(const Vec& u, const Vec& v) const { return FG(u, v).tail(n_v()); }

  /// Deviations w = (z, x^, y^) = Z (u, v).
  Vec to_deviation(const Vec& u, const Vec& v) const {
    Vec uv(n_u() + n_v());
    uv << u, v;
    return split.Z * uv;
  }
  /// (u, v) = Z^{-1} w.
  Vec from_deviation(const Vec& w) const { return split.Z_inv * w; }
};

struct OriginCheck {
  double value = 0.0;     ///< max |(F,G)(0,0)|
  double jacobian = 0.0;  ///< max |(F,G)'(0,0)| entry
};

inline OriginCheck check_origin(const TransformedSystem& ts) {
  const int nu = ts.n_u();
  const int nv = ts.n_v();
  const Vec zero = Vec::Zero(nu + nv);
  auto stacked = [&](const Vec& uv) { return ts.FG(uv.head(nu), uv.tail(nv)); };
  OriginCheck c;
  const Vec at0 = stacked(zero);
  c.value = at0.size() ? at0.cwiseAbs().maxCoeff() : 0.0;
  // A shorter step than the default: near the origin (F, G) is tiny, so
  // truncation dominates roundoff.
  const Mat j = numeric::central_jacobian(stacked, zero, nu + nv, 0.1);
  c.jacobian = j.size() ? j.cwiseAbs().maxCoeff() : 0.0;
  return c;
}

/// Transformed system assembled from an explicit (A, B, F, G); Z = I.
inline TransformedSystem make_transformed(const Mat& A, const Mat& B,
                                          std::function<Vec(const Vec&, const Vec&)> fg) {
  TransformedSystem ts;
  ts.split.A = A;
  ts.split.B = B;
  ts.split.n_u = static_cast<int>(A.rows());
  ts.split.n_v = static_cast<int>(B.rows());
  const int n = ts.split.n_u + ts.split.n_v;
  ts.split.Z = Mat::Identity(n, n);
  ts.split.Z_inv = Mat::Identity(n, n);
  detail::finish_norms(ts.split);
  ts.dims = Dims{ts.split.n_u, ts.split.n_v, 0};
  ts.FG = std::move(fg);
  return ts;
}

inline TransformedSystem build_transformed(const FirstOrderSystem& sys, const SpectralSplit& split,
                                           double origin_tol = 1e-8) {
  const Dims d = sys.dims();
  if (split.n_u != d.n_u() || split.n_v != d.n_v() || split.Z.rows() != d.n_w())
    throw DimensionError("build_transformed: split does not match the system dimensions");
  TransformedSystem ts;
  ts.split = split;
  ts.dims = d;
  auto base = std::make_shared<const FirstOrderSystem>(sys);
  ts.base = base;
  const Mat Z = split.Z;
  const Mat Zi = split.Z_inv;
  const int nu = split.n_u;
  const int nv = split.n_v;
  ts.FG = [base, Z, Zi, nu, nv](const Vec& u, const Vec& v) -> Vec {
    Vec uv(nu + nv);
    uv << u, v;
    return Zi * base->nonlinear(Z * uv);
  };
  const OriginCheck c = check_origin(ts);
  if (!(c.value <= origin_tol) || !(c.jacobian <= origin_tol))
    throw ConstructionError("transformed system does not vanish to first order at the origin (|FG| = " +
                            format_number(c.value) + ", |FG'| = " + format_number(c.jacobian) +
                            "); check the steady state and derivatives");
  return ts;
}

}  // namespace stabman
