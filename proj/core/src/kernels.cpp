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

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdasf {

namespace {

constexpr double kDegenerateGap = 1e-10;
constexpr double kHardCaseTol = 1e-10;
constexpr int kMaxSecularIterations = 300;

Matrix symmetrized(const Matrix& S) { return 0.5 * (S + S.transpose()); }

void check_square(const Matrix& S, const char* what) {
  if (S.rows() != S.cols()) throw InvalidArgument(std::string(what) + " must be square");
}

/// ||z(mu)||^2 for z(mu) = V diag(1 / (lambda + mu)) beta.
double secular_norm2(const Vector& lambda, const Vector& beta, double mu) {
  return (beta.array() / (lambda.array() + mu)).square().sum();
}

GtrsResult gtrs_whitened(const Matrix& H, const Vector& b, const Eigen::LLT<Matrix>& llt,
                         double delta2) {
  const Index n = H.rows();
  const auto L = llt.matrixL();
  const Matrix left = L.solve(H);
  const Matrix Hw = symmetrized(L.solve(left.transpose()));
  const Vector bw = L.solve(b);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Hw);
  if (eig.info() != Eigen::Success) throw SolverError("gtrs: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();  // ascending
  const Matrix& V = eig.eigenvectors();
  const Vector beta = V.transpose() * bw;
  const double lmin = lambda(0);
  const double delta = std::sqrt(delta2);

  GtrsResult out;
  Vector z(n);

  if (lmin > 0.0 && secular_norm2(lambda, beta, 0.0) <= delta2) {
    out.interior = true;
    out.mu = 0.0;
    z = V * (beta.array() / lambda.array()).matrix();
    out.x = L.transpose().solve(z);
    return out;
  }

  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lmin <= 0.0) {
    // Hard case: b has (numerically) no component in the bottom eigenspace
    // and the remaining components fit inside the ball at mu = -lambda_min.
    const double crit_tol = 1e-12 * scale;
    double crit_mass = 0.0;
    double rest = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (lambda(i) - lmin <= crit_tol) {
        crit_mass += beta(i) * beta(i);
      } else {
        rest += std::pow(beta(i) / (lambda(i) - lmin), 2);
      }
    }
    if (std::sqrt(crit_mass) <= kHardCaseTol * (bw.norm() + 1.0) && rest <= delta2) {
      out.hard_case = true;
      out.mu = -lmin;
      z.setZero();
      for (Index i = 0; i < n; ++i) {
        if (lambda(i) - lmin > crit_tol) z += (beta(i) / (lambda(i) - lmin)) * V.col(i);
      }
      z += std::sqrt(std::max(0.0, delta2 - rest)) * V.col(0);
      out.x = L.transpose().solve(z);
      return out;
    }
  }

  // Boundary solution: find mu > max(0, -lambda_min) with ||z(mu)|| = delta by
  // safeguarded Newton on psi(mu) = 1/||z(mu)|| - 1/delta.
  double lo = std::max(0.0, -lmin);
  double hi = std::max(lo, bw.norm() / delta - lmin) + 1.0;
  while (secular_norm2(lambda, beta, hi) > delta2) {
    lo = hi;
    hi = 2.0 * hi + 1.0;
    if (!std::isfinite(hi)) throw SolverError("gtrs: secular bracket expansion failed");
  }
  double mu = hi;
  for (int it = 0; it < kMaxSecularIterations; ++it) {
    out.iterations = it + 1;
    const Eigen::ArrayXd inv = 1.0 / (lambda.array() + mu);
    const double n2 = (beta.array() * inv).square().sum();
    const double norm = std::sqrt(n2);
    const double psi = 1.0 / norm - 1.0 / delta;
    if (std::abs(norm - delta) <= 4.0 * std::numeric_limits<double>::epsilon() * delta) break;
    if (psi < 0.0) {
      lo = mu;
    } else {
      hi = mu;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
    // d/dmu ||z||^2 = -2 sum beta^2 / (lambda + mu)^3
    const double dn2 = -2.0 * (beta.array().square() * inv.cube()).sum();
    const double dpsi = -0.5 * dn2 / (n2 * norm);
    double next = mu - psi / dpsi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  out.mu = mu;
  z = V * (beta.array() / (lambda.array() + mu)).matrix();
  out.x = L.transpose().solve(z);
  return out;
}

/// Fallback when G is (near) singular: bisection on mu with a Cholesky test of
/// H + mu G. The hard case is not resolved on this path.
GtrsResult gtrs_singular(const Matrix& H, const Vector& b, const Matrix& G, double delta2) {
  auto try_solve = [&](double mu, Vector& x) {
    Eigen::LLT<Matrix> llt(H + mu * G);
    if (llt.info() != Eigen::Success) return false;
    x = llt.solve(b);
    return true;
  };
  GtrsResult out;
  Vector x;
  if (try_solve(0.0, x) && x.dot(G * x) <= delta2) {
    out.interior = true;
    out.x = x;
    return out;
  }
  double lo = 0.0;
  double hi = 1.0;
  while (!(try_solve(hi, x) && x.dot(G * x) <= delta2)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e16) throw SolverError("gtrs: problem unbounded below on the feasible set");
  }
  Vector best;
  try_solve(hi, best);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    out.iterations = it + 1;
    const double mid = 0.5 * (lo + hi);
    if (try_solve(mid, x) && x.dot(G * x) <= delta2) {
      hi = mid;
      best = x;
    } else {
      lo = mid;
    }
  }
  out.mu = hi;
  out.x = best;
  return out;
}

}  // namespace

void fix_column_signs(Matrix& X) {
  for (Index j = 0; j < X.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < X.rows(); ++i) {
      const double a = std::abs(X(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (X.rows() > 0 && X(arg, j) < 0.0) X.col(j) = -X.col(j);
  }
}

TopEigen evd_top_q(const Matrix& S, Index Q) {
  check_square(S, "evd_top_q: S");
  const Index n = S.rows();
  if (Q < 1 || Q > n) throw InvalidArgument("evd_top_q: need 1 <= Q <= dim");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(S));
  if (eig.info() != Eigen::Success) throw SolverError("evd_top_q: eigendecomposition failed");
  TopEigen out;
  out.vectors = eig.eigenvectors().rightCols(Q).rowwise().reverse();
  out.values = eig.eigenvalues().tail(Q).reverse();
  if (Q < n) out.near_degenerate = eig.eigenvalues()(n - Q) - eig.eigenvalues()(n - Q - 1) < kDegenerateGap;
  fix_column_signs(out.vectors);
  return out;
}

TopEigen gevd_top_q(const Matrix& S, const Matrix& C, Index Q) {
  check_square(S, "gevd_top_q: S");
  if (C.rows() != S.rows() || C.cols() != S.cols()) {
    throw InvalidArgument("gevd_top_q: S and C must have the same size");
  }
  Eigen::LLT<Matrix> llt(symmetrized(C));
  if (llt.info() != Eigen::Success) {
    throw SolverError("gevd_top_q: metric is not positive definite");
  }
  const auto L = llt.matrixL();
  const Matrix left = L.solve(S);
  const Matrix whitened = L.solve(left.transpose());
  TopEigen out = evd_top_q(whitened, Q);
  out.vectors = L.transpose().solve(out.vectors);
  fix_column_signs(out.vectors);
  return out;
}

GtrsResult gtrs_solve(const Matrix& H, const Vector& b, const Matrix& G, double delta2) {
  check_square(H, "gtrs_solve: H");
  if (G.rows() != H.rows() || G.cols() != H.cols() || b.size() != H.rows()) {
    throw InvalidArgument("gtrs_solve: dimension mismatch");
  }
  if (!(delta2 > 0.0)) throw InvalidArgument("gtrs_solve: radius must be positive");

  const Matrix Gs = symmetrized(G);
  const Matrix Hs = symmetrized(H);
  Eigen::SelfAdjointEigenSolver<Matrix> geig(Gs, Eigen::EigenvaluesOnly);
  const double gmax = geig.eigenvalues().maxCoeff();
  const double gmin = geig.eigenvalues().minCoeff();

  GtrsResult out;
  bool whitened = false;
  if (gmax > 0.0 && gmin > 1e-10 * gmax) {
    Eigen::LLT<Matrix> llt(Gs);
    if (llt.info() == Eigen::Success) {
      out = gtrs_whitened(Hs, b, llt, delta2);
      whitened = true;
    }
  }
  if (!whitened) out = gtrs_singular(Hs, b, Gs, delta2);
  out.kkt_residual = gtrs_kkt_residual(Hs, b, Gs, delta2, out.x, out.mu);
  return out;
}

double gtrs_kkt_residual(const Matrix& H, const Vector& b, const Matrix& G, double delta2,
                         const Vector& x, double mu) {
  const double gap = x.dot(G * x) - delta2;
  const double stationarity = ((H + mu * G) * x - b).norm() / (b.norm() + 1.0);
  return std::max({stationarity, std::abs(mu * gap), std::max(0.0, gap), std::max(0.0, -mu)});
}

}  // namespace fdasf
