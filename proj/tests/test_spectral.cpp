#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

#include "oracles.hpp"
#include "support.hpp"

using namespace stabman;
using support::scalar;

namespace {

std::vector<double> sorted_moduli(const Mat& m) {
  std::vector<double> out;
  for (const auto& ev : sorted_eigenvalues(m)) out.push_back(std::abs(ev));
  std::sort(out.begin(), out.end());
  return out;
}

Mat block_diag(const SpectralSplit& s) {
  Mat P = Mat::Zero(s.n_u + s.n_v, s.n_u + s.n_v);
  P.topLeftCorner(s.n_u, s.n_u) = s.A;
  P.bottomRightCorner(s.n_v, s.n_v) = s.B;
  return P;
}

void expect_valid_split(const Mat& K, const SpectralSplit& s) {
  const int n = static_cast<int>(K.rows());
  EXPECT_LE((s.Z * s.Z_inv - Mat::Identity(n, n)).norm(), 1e-10);
  EXPECT_LE((s.Z * block_diag(s) * s.Z_inv - K).norm(), 1e-9 * std::max(1.0, K.norm()));
  EXPECT_LT(s.normA, 1.0);
  EXPECT_LT(s.normBinv, 1.0);
  for (double m : sorted_moduli(s.A)) EXPECT_LT(m, 1.0);
  for (double m : sorted_moduli(s.B)) EXPECT_GT(m, 1.0);
  const auto k = sorted_moduli(K), p = sorted_moduli(block_diag(s));
  ASSERT_EQ(k.size(), p.size());
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(k[i], p[i], 1e-8);
}

}  // namespace

TEST(SchurSplit, GrowthBlocksAndBasis) {
  const double a = 0.36, ab = 0.36 * 0.99;
  Mat K(2, 2);
  K << 0, 1, -1 / 0.99, 1 / ab + a;
  const SpectralSplit s = schur_split(K, 1);
  expect_valid_split(K, s);
  EXPECT_NEAR(s.A(0, 0), a, 1e-12);
  EXPECT_NEAR(s.B(0, 0), 1 / ab, 1e-12);
  // Columns are eigenvectors (1, a) and (1, 1/(ab)) up to scale.
  EXPECT_NEAR(s.Z(1, 0) / s.Z(0, 0), a, 1e-12);
  EXPECT_NEAR(s.Z(1, 1) / s.Z(0, 1), 1 / ab, 1e-12);
}

TEST(SchurSplit, BlockDiagonalInputKeepsIdentity) {
  Mat K = Mat::Zero(2, 2);
  K(0, 0) = 0.5;
  K(1, 1) = 3.0;
  const SpectralSplit s = schur_split(K, 1);
  EXPECT_EQ(s.Z, Mat::Identity(2, 2));
  EXPECT_EQ(s.Z_inv, Mat::Identity(2, 2));
}

TEST(SchurSplit, RandomRealSpectrumRecovered) {
  std::mt19937_64 gen(20240601);
  Mat P = Mat::Zero(4, 4);
  P.diagonal() << 1.5, 0.3, 2.0, 0.7;
  for (int trial = 0; trial < 20; ++trial) {
    const Mat K = support::random_similar(P, gen);
    const SpectralSplit s = schur_split(K, 2);
    expect_valid_split(K, s);
    auto a = sorted_moduli(s.A), b = sorted_moduli(s.B);
    EXPECT_NEAR(a[0], 0.3, 1e-8);
    EXPECT_NEAR(a[1], 0.7, 1e-8);
    EXPECT_NEAR(b[0], 1.5, 1e-8);
    EXPECT_NEAR(b[1], 2.0, 1e-8);
  }
}

TEST(SchurSplit, ComplexPairsInBothBlocks) {
  std::mt19937_64 gen(7);
  // Stable pair 0.6 e^{+-0.9i}, unstable pair 1.8 e^{+-2.0i}, real 0.2.
  Mat P = Mat::Zero(5, 5);
  const double r1 = 0.6, t1 = 0.9, r2 = 1.8, t2 = 2.0;
  P.block(0, 0, 2, 2) << r1 * std::cos(t1), -r1 * std::sin(t1), r1 * std::sin(t1), r1 * std::cos(t1);
  P(2, 2) = 0.2;
  P.block(3, 3, 2, 2) << r2 * std::cos(t2), -r2 * std::sin(t2), r2 * std::sin(t2), r2 * std::cos(t2);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat K = support::random_similar(P, gen);
    const SpectralSplit s = schur_split(K, 3);
    expect_valid_split(K, s);
    EXPECT_EQ(s.A.rows(), 3);
    EXPECT_EQ(s.B.rows(), 2);
  }
}

TEST(SchurSplit, BalancingLeavesSpectraUnchanged) {
  std::mt19937_64 gen(99);
  Mat P = Mat::Zero(3, 3);
  // A Jordan-like stable block with a large coupling needs balancing.
  P << 0.9, 10.0, 0.0,  //
      0.0, 0.8, 0.0,    //
      0.0, 0.0, 1.3;
  const Mat K = support::random_similar(P, gen);
  const SpectralSplit s = schur_split(K, 2);
  expect_valid_split(K, s);
  EXPECT_GE(s.gamma_slack, 0.0);
}

TEST(SchurSplit, BalancingOutOfReachReported) {
  // With coupling 40 no delta in {1, 0.5, 0.1, 0.01} brings ||A|| below 1.
  Mat K = Mat::Zero(3, 3);
  K << 0.9, 40.0, 0.0,  //
      0.0, 0.8, 0.0,    //
      0.0, 0.0, 1.3;
  EXPECT_THROW(schur_split(K, 2), SpectralError);
}

TEST(SchurSplit, UnitRootRejected) {
  Mat K(2, 2);
  K << 1.0 + 1e-10, 0.3, 0.0, 2.0;
  EXPECT_THROW(schur_split(K, 1), UnitRootError);
}

TEST(SchurSplit, BlanchardKahnCountReported) {
  Mat K = Mat::Zero(3, 3);
  K.diagonal() << 0.5, 0.6, 2.0;
  try {
    schur_split(K, 1);
    FAIL() << "expected BlanchardKahnError";
  } catch (const BlanchardKahnError& e) {
    EXPECT_EQ(e.found(), 2);
    EXPECT_EQ(e.required(), 1);
  }
}

TEST(TransformedSystem, GrowthGMatchesDisplayedFormula) {
  const oracle::Growth g;
  const auto pl = growth::build_growth_pipeline({});
  const TransformedSystem& ts = *pl.system;
  Mat Zp(2, 2);
  Zp << 1, 1, 0.36, 1 / g.ab();
  EXPECT_LE((ts.split.Z - Zp).norm(), 1e-12);
  for (const auto& [u, v] : std::vector<std::pair<double, double>>{{0.01, 0.005}, {-0.03, 0.02}, {0.0, 0.0}}) {
    EXPECT_NEAR(ts.G(scalar(u), scalar(v))(0), g.G(u, v), 1e-15);
    EXPECT_NEAR(ts.F(scalar(u), scalar(v))(0), g.F(u, v), 1e-15);
  }
}

TEST(TransformedSystem, OriginConditions) {
  for (const auto* pl : {&support::growth().pipeline, &support::growth_balanced().pipeline,
                         &support::exo().pipeline}) {
    const OriginCheck c = check_origin(*pl->system);
    EXPECT_LE(c.value, 1e-8);
    EXPECT_LE(c.jacobian, 1e-8);
  }
}

TEST(TransformedSystem, LinearModelHasZeroRemainder) {
  const Pipeline pl = build_pipeline(support::linear_model());
  Vec u = scalar(0.4), v = scalar(-0.3);
  EXPECT_LE(pl.system->FG(u, v).norm(), 1e-14);
}

TEST(TransformedSystem, MismatchedSplitRejected) {
  const Pipeline pl = build_pipeline(support::linear_model());
  Mat K = Mat::Zero(3, 3);
  K.diagonal() << 0.5, 0.6, 2.0;
  EXPECT_THROW(build_transformed(*pl.first_order, schur_split(K, 2)), DimensionError);
}

TEST(TransformedSystem, WrongSteadyStateFailsOriginCheck) {
  const ModelSpec m = growth::build_growth({});
  SteadyState ss = find_steady_state(m);
  ss.x_bar(0) += 1e-3;
  ss.y_bar(0) += 1e-3;
  const FirstOrderSystem fo = build_first_order(m, ss);
  EXPECT_THROW(build_transformed(fo, schur_split(fo.K, 1)), ConstructionError);
}

TEST(TransformedSystem, RoundTripDeviations) {
  const TransformedSystem& ts = support::growth_balanced().sys();
  const Vec w = ts.to_deviation(scalar(0.02), scalar(-0.01));
  const Vec uv = ts.from_deviation(w);
  EXPECT_NEAR(uv(0), 0.02, 1e-15);
  EXPECT_NEAR(uv(1), -0.01, 1e-15);
}

TEST(TransformedSystem, PolicyInOriginalVariablesIsBasisInvariant) {
  // The exact manifold does not depend on Z; high-order approximants in two
  // bases must give the same k_{t+1} at the same k_t.
  const auto& paper = support::growth();
  const auto& unit = support::growth_balanced();
  const std::vector<double> ks{0.195, 0.199, 0.2, 0.203};
  const auto a = growth::policy_on_capital_grid(paper.sys(), growth::order_residual(paper.policy(4)), ks);
  const auto b = growth::policy_on_capital_grid(unit.sys(), growth::order_residual(unit.policy(4)), ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ASSERT_TRUE(a[i] && b[i]);
    EXPECT_NEAR(a[i]->k_next, b[i]->k_next, 1e-9);
  }
}
