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

#pragma once

#include "fdasf/types.hpp"

namespace fdasf {

/// Flip each column so that its largest-magnitude entry is positive (the
/// first such entry on ties). Zero columns are left alone.
void fix_column_signs(Matrix& X);

struct TopEigen {
  Matrix vectors;  // dim x Q, sign-fixed
  Vector values;   // descending
  /// lambda_Q - lambda_{Q+1} < 1e-10: the dominant subspace is not unique.
  bool near_degenerate = false;
};

/// Eigenvectors of the Q algebraically largest eigenvalues of symmetric S.
TopEigen evd_top_q(const Matrix& S, Index Q);

/// Generalized eigenvectors of (S, C), C positive definite, for the Q largest
/// generalized eigenvalues; X^T C X = I_Q. Throws SolverError if C is not PD.
TopEigen gevd_top_q(const Matrix& S, const Matrix& C, Index Q);

struct GtrsResult {
  Vector x;
  double mu = 0.0;  // constraint multiplier
  bool interior = false;
  bool hard_case = false;
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// Global minimizer of x^T H x - 2 b^T x subject to x^T G x <= delta2, with H
/// symmetric (possibly indefinite) and G symmetric PSD. Throws SolverError
/// when the problem is unbounded below on the feasible set.
GtrsResult gtrs_solve(const Matrix& H, const Vector& b, const Matrix& G, double delta2);

/// max(||(H + mu G) x - b|| / (||b|| + 1), |mu (x^T G x - delta2)|,
///     max(0, x^T G x - delta2), max(0, -mu)).
double gtrs_kkt_residual(const Matrix& H, const Vector& b, const Matrix& G, double delta2,
                         const Vector& x, double mu);

}  // namespace fdasf
