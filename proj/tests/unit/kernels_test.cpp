// Copyright 2026 The fdasf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fdasf/kernels.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

namespace fdasf {
namespace {

using namespace fdasf::testing;

double gtrs_objective(const Matrix& H, const Vector& b, const Vector& x) {
  return x.dot(H * x) - 2.0 * b.dot(x);
}

double min_eig(const Matrix& A) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().minCoeff();
}

TEST(FixColumnSigns, LargestEntryPositive) {
  Matrix X(3, 2);
  X << 0.1, 2.0, -0.9, -3.0, 0.5, 1.0;
  fix_column_signs(X);
  EXPECT_GT(X(1, 0), 0.0);
  EXPECT_GT(X(1, 1), 0.0);
  Matrix Z = Matrix::Zero(2, 1);
  fix_column_signs(Z);
  EXPECT_EQ(Z.norm(), 0.0);
  Matrix T(2, 1);
  T << -1.0, 1.0;  // tie: first entry wins
  fix_column_signs(T);
  EXPECT_EQ(T(0, 0), 1.0);
}

TEST(EvdTopQ, DiagonalMatrix) {
  Vector d(4);
  d << 1.0, 4.0, 2.0, 3.0;
  const auto e = evd_top_q(d.asDiagonal(), 2);
  EXPECT_DOUBLE_EQ(e.values(0), 4.0);
  EXPECT_DOUBLE_EQ(e.values(1), 3.0);
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(3, 1)), 1.0, 1e-15);
  EXPECT_FALSE(e.near_degenerate);
  EXPECT_TRUE(evd_top_q(Matrix::Identity(3, 3), 1).near_degenerate);
  EXPECT_THROW(evd_top_q(Matrix::Identity(3, 3), 4), InvalidArgument);
}

TEST(EvdTopQ, MatchesJacobiOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const Index n = 3 + t;
    const Matrix S = random_symmetric(n, rng);
    const auto e = evd_top_q(S, 2);
    const Vector w = jacobi_eigen(S).first;
    EXPECT_NEAR(e.values(0), w(n - 1), 1e-10);
    EXPECT_NEAR(e.values(1), w(n - 2), 1e-10);
  }
}

TEST(GevdTopQ, ResidualOrthonormalityAndOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + (t * 59) / 99;  // 2 .. 61, capped below
    const Index dim = std::min<Index>(n, 60);
    const Index Q = 1 + t % std::min<Index>(3, dim);
    const Matrix S = random_symmetric(dim, rng);
    const Matrix C = random_spd(dim, rng);
    const auto e = gevd_top_q(S, C, Q);
    const Matrix res = S * e.vectors - C * e.vectors * e.values.asDiagonal();
    EXPECT_LE(res.norm(), 1e-9 * S.norm()) << "dim " << dim;
    EXPECT_LE((e.vectors.transpose() * C * e.vectors - Matrix::Identity(Q, Q)).norm(), 1e-9);
    if (dim <= 25) {
      const Vector w = jacobi_generalized_values(S, C);
      for (Index j = 0; j < Q; ++j) EXPECT_NEAR(e.values(j), w(dim - 1 - j), 1e-8);
    }
  }
}

TEST(GevdTopQ, RejectsIndefiniteMetric) {
  Matrix C = Matrix::Identity(3, 3);
  C(2, 2) = -1.0;
  EXPECT_THROW(gevd_top_q(Matrix::Identity(3, 3), C, 1), SolverError);
}

struct GtrsCase {
  Matrix H, G;
  Vector b;
  double delta2;
};

GtrsCase random_case(Index n, std::mt19937_64& rng, bool indefinite) {
  GtrsCase c;
  c.H = indefinite ? random_symmetric(n, rng) : random_spd(n, rng, 0.1);
  if (indefinite && min_eig(c.H) > -0.05) c.H -= (min_eig(c.H) + 0.5) * Matrix::Identity(n, n);
  c.G = random_spd(n, rng);
  c.b = random_matrix(n, 1, rng);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  c.delta2 = u(rng);
  return c;
}

// Hard case in whitened coordinates: b has no component along the bottom
// eigenvector and the rest is small enough to stay strictly inside.
GtrsCase hard_case(Index n, std::mt19937_64& rng) {
  GtrsCase c;
  const Matrix Qm = random_matrix(n, n, rng).householderQr().householderQ();
  Vector lam(n);
  for (Index i = 0; i < n; ++i) lam(i) = -1.0 + 0.7 * static_cast<double>(i);
  c.H = Qm * lam.asDiagonal() * Qm.transpose();
  c.G = Matrix::Identity(n, n);
  Vector beta = 0.05 * random_matrix(n, 1, rng);
  beta(0) = 0.0;
  c.b = Qm * beta;
  c.delta2 = 1.0;
  return c;
}

void expect_global(const GtrsCase& c, const GtrsResult& r) {
  EXPECT_LE(r.kkt_residual, 1e-9);
  EXPECT_LE(gtrs_kkt_residual(c.H, c.b, c.G, c.delta2, r.x, r.mu), 1e-9);
  // Global optimality certificate: H + mu G positive semidefinite.
  EXPECT_GE(min_eig(c.H + r.mu * c.G), -1e-8);
}

TEST(Gtrs, RandomDefiniteAndIndefinite) {
  std::mt19937_64 rng(4);
  int indefinite = 0, hard = 0;
  for (int t = 0; t < 85; ++t) {
    const bool indef = t < 10;
    const GtrsCase c = random_case(2 + t % 12, rng, indef);
    const auto r = gtrs_solve(c.H, c.b, c.G, c.delta2);
    expect_global(c, r);
    indefinite += indef;
  }
  for (int t = 0; t < 5; ++t) {
    const GtrsCase c = hard_case(3 + t, rng);
    const auto r = gtrs_solve(c.H, c.b, c.G, c.delta2);
    expect_global(c, r);
    EXPECT_TRUE(r.hard_case);
    EXPECT_NEAR(r.mu, 1.0, 1e-9);
    EXPECT_NEAR(r.x.dot(c.G * r.x), c.delta2, 1e-9);
    ++hard;
  }
  // Interior solutions of definite problems with a loose radius.
  for (int t = 0; t < 10; ++t) {
    GtrsCase c = random_case(4, rng, false);
    c.delta2 = 1e6;
    const auto r = gtrs_solve(c.H, c.b, c.G, c.delta2);
    expect_global(c, r);
    EXPECT_TRUE(r.interior);
    EXPECT_EQ(r.mu, 0.0);
  }
  EXPECT_EQ(indefinite, 10);
  EXPECT_EQ(hard, 5);
}

TEST(Gtrs, TwoDimensionalGridOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 12; ++t) {
    const GtrsCase c = random_case(2, rng, t % 2 == 0);
    const auto r = gtrs_solve(c.H, c.b, c.G, c.delta2);
    const double grid = gtrs_grid_min_2d(c.H, c.b, c.G, c.delta2);
    EXPECT_LE(gtrs_objective(c.H, c.b, r.x), grid + 1e-9);
    EXPECT_NEAR(gtrs_objective(c.H, c.b, r.x), grid, 1e-6 * (1.0 + std::abs(grid)));
  }
}

TEST(Gtrs, SingularMetric) {
  // G PSD with a null direction along which H is positive definite.
  Matrix H(2, 2);
  H << 2.0, 0.0, 0.0, -1.0;
  Matrix G(2, 2);
  G << 0.0, 0.0, 0.0, 1.0;
  Vector b(2);
  b << 1.0, 0.5;
  const auto r = gtrs_solve(H, b, G, 1.0);
  EXPECT_LE(r.kkt_residual, 1e-9);
  EXPECT_NEAR(r.x(0), 0.5, 1e-9);
}

TEST(Gtrs, UnboundedIsAnError) {
  // H negative along a direction the constraint does not see.
  Matrix H(2, 2);
  H << -1.0, 0.0, 0.0, 1.0;
  Matrix G(2, 2);
  G << 0.0, 0.0, 0.0, 1.0;
  EXPECT_THROW(gtrs_solve(H, Vector::Ones(2), G, 1.0), SolverError);
}

}  // namespace
}  // namespace fdasf
