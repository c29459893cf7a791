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

#include "fdasf/fracprog.hpp"

#include <memory>
#include <string_view>

namespace fdasf {

/// Trace ratio: maximize tr(X^T Rvv X) / tr(X^T Ryy X) s.t. X^T C X = I_Q.
///
/// Solved as the minimization of f1 = -tr(X^T Rvv X) over f2 = tr(X^T Ryy X);
/// reported ratios carry the positive sign. The metric is C = B B^T with
/// B = fixed[0] (the identity in the network-wide problem).
class TroProblem final : public FractionalProblem {
 public:
  explicit TroProblem(Index Q);

  std::string_view name() const override { return "tro"; }
  Index columns() const override { return Q_; }
  double f1(const Matrix& X, const ProblemData& data) const override;
  double f2(const Matrix& X, const ProblemData& data) const override;
  Matrix grad_f1(const Matrix& X, const ProblemData& data) const override;
  Matrix grad_f2(const Matrix& X, const ProblemData& data) const override;
  std::vector<ConstraintKind> constraint_kinds() const override;
  /// Upper-triangle entries (a <= b, column-major) of X^T C X - I.
  Vector constraint_values(const Matrix& X, const ProblemData& data) const override;
  std::vector<Matrix> constraint_gradients(const Matrix& X, const ProblemData& data) const override;
  double constraint_violation(const Matrix& X, const ProblemData& data) const override;
  AuxResult solve_auxiliary(double rho, const ProblemData& data,
                            const Matrix& reference) const override;
  /// Per-column sign closest to the reference; keeps the solver's sign on ties.
  Matrix select_solution(const Matrix& X, const Matrix& reference) const override;
  Matrix make_feasible(const Matrix& raw, const ProblemData& data) const override;
  double sense() const override { return -1.0; }
  bool uses_v() const override { return true; }

  static Matrix metric(const ProblemData& data);

 private:
  Index Q_;
};

/// Regularized total least squares, Q = 1:
/// min (x^T Ryy x - 2 x^T ryd + rdd) / (1 + x^T I_g x) s.t. x^T L_g x <= 1,
/// with I_g = fixed[0] fixed[0]^T and L_g = fixed[1] fixed[1]^T.
class RtlsProblem final : public FractionalProblem {
 public:
  RtlsProblem() = default;

  std::string_view name() const override { return "rtls"; }
  Index columns() const override { return 1; }
  double f1(const Matrix& X, const ProblemData& data) const override;
  double f2(const Matrix& X, const ProblemData& data) const override;
  Matrix grad_f1(const Matrix& X, const ProblemData& data) const override;
  Matrix grad_f2(const Matrix& X, const ProblemData& data) const override;
  std::vector<ConstraintKind> constraint_kinds() const override;
  Vector constraint_values(const Matrix& X, const ProblemData& data) const override;
  std::vector<Matrix> constraint_gradients(const Matrix& X, const ProblemData& data) const override;
  AuxResult solve_auxiliary(double rho, const ProblemData& data,
                            const Matrix& reference) const override;
  /// Scales the raw vector so that x^T L_g x = 1/2.
  Matrix make_feasible(const Matrix& raw, const ProblemData& data) const override;
  bool uses_d() const override { return true; }

  static Matrix identity_gram(const ProblemData& data);
  static Matrix l_gram(const ProblemData& data);
};

/// Quadratic over linear:
/// min (tr(X^T Ryy X) + tr(X^T A)) / (tr(X^T B) + c) over tr(X^T B) + c > 0,
/// with A = fixed[0], B = fixed[1]. The open constraint is only monitored.
class QolProblem final : public FractionalProblem {
 public:
  QolProblem(Index Q, double c);

  std::string_view name() const override { return "qol"; }
  Index columns() const override { return Q_; }
  double offset() const { return c_; }
  double f1(const Matrix& X, const ProblemData& data) const override;
  double f2(const Matrix& X, const ProblemData& data) const override;
  Matrix grad_f1(const Matrix& X, const ProblemData& data) const override;
  Matrix grad_f2(const Matrix& X, const ProblemData& data) const override;
  std::vector<ConstraintKind> constraint_kinds() const override { return {}; }
  Vector constraint_values(const Matrix&, const ProblemData&) const override { return {}; }
  std::vector<Matrix> constraint_gradients(const Matrix&, const ProblemData&) const override {
    return {};
  }
  /// X = (1/2) Ryy^{-1} (rho B - A).
  AuxResult solve_auxiliary(double rho, const ProblemData& data,
                            const Matrix& reference) const override;
  /// Flips the sign of the raw matrix if needed and shrinks it until f2 > 0.
  Matrix make_feasible(const Matrix& raw, const ProblemData& data) const override;

 private:
  Index Q_;
  double c_;
};

struct TroData {
  Matrix Rvv;
  Matrix Ryy;
  Matrix metric;  // identity in the network-wide problem
};

struct RtlsData {
  Matrix Ryy;
  Vector ryd;
  double rdd = 0.0;
  Matrix identity_gram;
  Matrix L_gram;
};

struct QolData {
  Matrix Ryy;
  Matrix A;
  Matrix B;
  double c = 0.0;
};

/// Typed views converted to the generic container. Gram matrices are factored
/// (Cholesky, or a symmetric square root when only PSD) into a fixed matrix
/// whose outer product reproduces them.
ProblemData to_problem_data(const TroData& data);
ProblemData to_problem_data(const RtlsData& data);
ProblemData to_problem_data(const QolData& data);

/// Throws InvalidArgument when a typed view breaks its invariants.
void validate(const TroData& data, Index Q);
void validate(const RtlsData& data);
void validate(const QolData& data);

/// Quantities of the closed-form QoL optimum, with a = tr(A^T R^{-1} A),
/// b = tr(A^T R^{-1} B), e = tr(B^T R^{-1} B):
/// g(rho) = -e rho^2 / 4 + (b / 2 - c) rho - a / 4, rho* its larger root,
/// X* = -(1/2) R^{-1} (A + mu B) with mu = -rho*.
struct QolClosedForm {
  double a = 0.0;
  double b = 0.0;
  double e = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  Matrix X;
};

QolClosedForm qol_closed_form(const Matrix& Ryy, const Matrix& A, const Matrix& B, double c);

/// Offset c = b / 2 + sqrt(a e): strictly inside the feasibility region, with
/// discriminant 3 a e for the root equation.
double qol_default_offset(const Matrix& Ryy, const Matrix& A, const Matrix& B);

/// True when 2c >= b + sqrt(a e) or 2c <= b - sqrt(a e).
bool qol_feasible(const Matrix& Ryy, const Matrix& A, const Matrix& B, double c);

std::unique_ptr<FractionalProblem> tro_problem(Index Q);
std::unique_ptr<FractionalProblem> rtls_problem();
std::unique_ptr<FractionalProblem> qol_problem(Index Q, double c);

}  // namespace fdasf
