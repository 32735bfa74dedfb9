#pragma once

// Shared fixtures: built pipelines are cached because the radius search is
// the slowest step of the suite.

#include <random>

#include "stabman/growth.hpp"
#include "stabman/models.hpp"
#include "stabman/solver.hpp"

namespace support {

using stabman::Mat;
using stabman::Vec;

struct Solved {
  stabman::Pipeline pipeline;
  stabman::VerifiedBall ball;

  const stabman::TransformedSystem& sys() const { return *pipeline.system; }
  stabman::PolicyApprox policy(int order) const {
    stabman::PolicyApprox p;
    p.system = pipeline.system;
    p.order = order;
    p.domain = ball.domain;
    return p;
  }
};

inline Solved solve(stabman::Pipeline pl) {
  const auto ball = stabman::find_verified_ball(*pl.system);
  if (!ball) throw std::runtime_error("no verified ball");
  return {std::move(pl), *ball};
}

/// Growth model, alpha = 0.36, beta = 0.99, in the basis k^_t = u + v.
inline const Solved& growth() {
  static const Solved s = solve(stabman::growth::build_growth_pipeline({}));
  return s;
}

/// Growth model with the default unit-column balancing.
inline const Solved& growth_balanced() {
  static const Solved s = solve(stabman::build_pipeline(stabman::growth::build_growth({})));
  return s;
}

inline const Solved& exo() {
  static const Solved s = solve(stabman::build_pipeline(stabman::exo_test_model()));
  return s;
}

/// x' = y, y' = 2.5 y - x: eigenvalues 0.5 and 2.
inline stabman::ModelSpec linear_model() {
  Mat M(2, 4);
  M << 1, -2.5, 0, 1,  //
      0, -1, 1, 0;
  return stabman::make_linear_model({1, 1, 0}, M, Mat::Zero(0, 0));
}

inline Vec scalar(double x) { return Vec::Constant(1, x); }

/// Random orthogonal-ish similarity V diag-or-block(P) V^{-1}, seeded.
inline Mat random_similar(const Mat& P, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = static_cast<int>(P.rows());
  Mat V(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) V(i, j) = unif(gen) + (i == j ? 2.0 : 0.0);
  return V * P * V.inverse();
}

}  // namespace support
