#include <gtest/gtest.h>

#include "support.hpp"

using namespace stabman;
using support::scalar;

namespace {

FirstOrderSystem growth_first_order(double alpha = 0.36, double beta = 0.99) {
  const ModelSpec m = growth::build_growth({alpha, beta});
  return build_first_order(m, find_steady_state(m));
}

}  // namespace

TEST(FirstOrder, GrowthKMatchesDisplayedMatrix) {
  const double a = 0.36, b = 0.99;
  const FirstOrderSystem sys = growth_first_order(a, b);
  Mat expected(2, 2);
  expected << 0, 1, -1 / b, 1 / (a * b) + a;
  EXPECT_LE((sys.K - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FirstOrder, PhiAndGammaLayout) {
  const FirstOrderSystem sys = growth_first_order();
  // Rows: Euler then transition; columns: (x^, y^).
  Mat phi(2, 2);
  phi << 0, 1, 1, 0;
  EXPECT_EQ(sys.phi, phi);
  EXPECT_NEAR(sys.gamma(1, 1), 1.0, 1e-15);
  EXPECT_LE((sys.phi * sys.K - sys.gamma).norm(), 1e-13);
}

TEST(FirstOrder, NonlinearTermVanishesToSecondOrder) {
  const FirstOrderSystem sys = growth_first_order();
  EXPECT_LE(sys.nonlinear(Vec::Zero(2)).norm(), 1e-15);
  for (double e : {1e-2, 1e-3, 1e-4}) {
    Vec w(2);
    w << e, -0.5 * e;
    const double ratio = sys.nonlinear(w).norm() / (e * e);
    EXPECT_LT(ratio, 50.0);
    EXPECT_GT(ratio, 0.01);
  }
}

TEST(FirstOrder, NonlinearTermMatchesDisplayedFormula) {
  const double a = 0.36, b = 0.99, ab = a * b;
  const FirstOrderSystem sys = growth_first_order(a, b);
  const double kb = sys.ss.x_bar(0);
  const double kh = 0.01, zh = 0.01;
  const double N = (1 + ab) * std::pow(kb + zh, a) - ab * std::pow(kb + kh, a) / std::pow(kb + zh, 1 - a) - kb +
                   kh / b - (1 / (ab) + a) * zh;
  Vec w(2);
  w << kh, zh;
  const Vec n1 = sys.nonlinear(w);
  EXPECT_NEAR(n1(0), 0.0, 1e-17);
  EXPECT_NEAR(n1(1), N, 1e-15);
}

TEST(FirstOrder, LinearModelHasNoRemainder) {
  const ModelSpec m = support::linear_model();
  const FirstOrderSystem sys = build_first_order(m, find_steady_state(m));
  Vec w(2);
  w << 0.3, -1.7;
  EXPECT_LE(sys.nonlinear(w).norm(), 1e-15);
}

TEST(FirstOrder, StepIsTheExactRecursion) {
  const double a = 0.36, b = 0.99, ab = a * b;
  const FirstOrderSystem sys = growth_first_order(a, b);
  const double kb = sys.ss.x_bar(0);
  Vec w(2);
  w << 0.01, -0.02;  // k_t = kb + 0.01, k_{t+1} = kb - 0.02
  const Vec next = sys.step(w);
  const double k0 = kb + w(0), k1 = kb + w(1);
  const double k2 = (1 + ab) * std::pow(k1, a) - ab * std::pow(k0, a) * std::pow(k1, a - 1);
  EXPECT_NEAR(next(0), w(1), 1e-15);
  EXPECT_NEAR(next(1), k2 - kb, 1e-15);
}

TEST(FirstOrder, ImplicitStepAgreesWithExplicitSolve) {
  ModelSpec m = growth::build_growth({});
  const SteadyState ss = find_steady_state(m);
  const FirstOrderSystem expl = build_first_order(m, ss);
  m.explicit_next = false;
  const FirstOrderSystem impl = build_first_order(m, ss);
  Vec w(2);
  w << 0.03, 0.01;
  EXPECT_LE((expl.step(w) - impl.step(w)).norm(), 1e-12);
}

TEST(FirstOrder, ExogenousStateStepsWithLambda) {
  const ModelSpec m = exo_test_model(0.1, 0.05);
  const FirstOrderSystem sys = build_first_order(m, find_steady_state(m));
  Vec w(2);
  w << 0.4, 0.2;
  const Vec next = sys.step(w);
  EXPECT_NEAR(next(0), 0.2, 1e-15);
  EXPECT_NEAR(next(1), 2 * 0.2 + 0.1 * 0.16 + 0.05 * 0.4 * 0.2, 1e-15);
}

TEST(FirstOrder, SingularPhiIsUnsupported) {
  // The Euler row does not involve next-period values at all.
  ModelSpec m;
  m.name = "static";
  m.dims = Dims{1, 1, 0};
  m.lambda = Mat::Zero(0, 0);
  m.steady_guess = Vec::Zero(2);
  m.explicit_next = true;
  m.residual = [](const Vec&, const Vec& y, const Vec& xn, const Vec& x, const Vec&) {
    Vec r(2);
    r << y(0) - 0.5 * x(0), xn(0) - y(0);
    return r;
  };
  const SteadyState ss = find_steady_state(m);
  EXPECT_THROW(build_first_order(m, ss), UnsupportedModelError);
}

TEST(FirstOrder, UnitEigenvalueDetectedFromDegenerateSteadyState) {
  const ModelSpec m = growth::build_growth({0.36, 1.0 / 0.36});
  const SteadyState ss = find_steady_state(m);
  EXPECT_THROW(build_first_order(m, ss), UnitRootError);
}
