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

#include <string_view>
#include <vector>

namespace fdasf {

/// Statistics and deterministic matrices a fractional program is evaluated on.
///
/// The same container describes the network-wide problem (dimension M) and a
/// compressed local problem (dimension M~): only the sizes differ. `fixed`
/// holds the problem's deterministic matrices B (identity image, L image,
/// A/B images, ...), each dim() x L.
struct ProblemData {
  Matrix Ryy;
  Matrix Rvv;
  Vector ryd;
  double rdd = 0.0;
  std::vector<Matrix> fixed;

  /// Variable row count; falls back to the fixed matrices when no
  /// statistics are attached.
  Index dim() const {
    if (Ryy.size() > 0) return Ryy.rows();
    return fixed.empty() ? 0 : fixed.front().rows();
  }
};

enum class ConstraintKind { Inequality, Equality };

struct AuxResult {
  Matrix X;
  double objective = 0.0;  // f1(X) - rho * f2(X)
  int iterations = 0;
  double residual = 0.0;
};

/// min_X f1(X) / f2(X) over a constraint set written as h_j(X) <= 0
/// (inequalities) and h_j(X) = 0 (equalities).
class FractionalProblem {
 public:
  virtual ~FractionalProblem() = default;

  virtual std::string_view name() const = 0;
  /// Q, the number of columns of X.
  virtual Index columns() const = 0;

  virtual double f1(const Matrix& X, const ProblemData& data) const = 0;
  virtual double f2(const Matrix& X, const ProblemData& data) const = 0;
  virtual Matrix grad_f1(const Matrix& X, const ProblemData& data) const = 0;
  virtual Matrix grad_f2(const Matrix& X, const ProblemData& data) const = 0;

  virtual std::vector<ConstraintKind> constraint_kinds() const = 0;
  virtual Vector constraint_values(const Matrix& X, const ProblemData& data) const = 0;
  virtual std::vector<Matrix> constraint_gradients(const Matrix& X,
                                                   const ProblemData& data) const = 0;

  /// Largest violation: |h_j| for equalities, max(0, h_j) for inequalities.
  virtual double constraint_violation(const Matrix& X, const ProblemData& data) const;

  /// Open-set conditions that are monitored but never enforced (f2 > 0).
  virtual bool valid(const Matrix& X, const ProblemData& data) const;

  /// Canonical global minimizer of f1 - rho * f2. `reference` is the
  /// previous iterate; solvers may use it as a warm start.
  virtual AuxResult solve_auxiliary(double rho, const ProblemData& data,
                                    const Matrix& reference) const = 0;

  /// Member of the solver's finite solution set closest to `reference`.
  /// The default treats solutions as unique.
  virtual Matrix select_solution(const Matrix& X, const Matrix& reference) const;

  /// Map a raw random matrix into the feasible set without solving anything.
  virtual Matrix make_feasible(const Matrix& raw, const ProblemData& data) const = 0;

  /// +1 when the reported ratio is the minimized one, -1 when the problem is a
  /// maximization that is solved internally as the negated minimization.
  virtual double sense() const { return 1.0; }
  double reported(double rho) const { return sense() * rho; }

  virtual bool uses_v() const { return false; }
  virtual bool uses_d() const { return false; }
};

/// f1(X) / f2(X); throws FeasibilityError when f2(X) <= 0.
double evaluate_ratio(const FractionalProblem& problem, const Matrix& X, const ProblemData& data);

/// f(X, rho) = f1(X) - rho * f2(X).
double aux_objective(const FractionalProblem& problem, const Matrix& X, double rho,
                     const ProblemData& data);

enum class StopRule { IterateChange, RatioChange };

struct DinkelbachOptions {
  double tol = 1e-8;
  int max_iter = 10;
  StopRule stop = StopRule::IterateChange;
  bool keep_iterates = false;
};

struct DinkelbachTrace {
  std::vector<double> rho_sequence;  // rho^0 = r(X0), then one entry per solve
  std::vector<double> f2_sequence;   // f2 at the iterate behind each rho
  std::vector<Matrix> iterates;      // filled when keep_iterates is set
  int aux_solve_count = 0;
  bool converged = false;
};

struct DinkelbachResult {
  Matrix X;
  double rho = 0.0;
  DinkelbachTrace trace;
};

/// rho^0 = r(X0); X^{i+1} = argmin f(X, rho^i); rho^{i+1} = r(X^{i+1}).
/// Stops once the change between consecutive iterates drops below tol, or
/// after max_iter solves. Every auxiliary solve is counted.
DinkelbachResult dinkelbach_solve(const FractionalProblem& problem, const ProblemData& data,
                                  const Matrix& X0, const DinkelbachOptions& options = {});

/// g(rho) = min_X f(X, rho), evaluated through the auxiliary solver.
double g_value(const FractionalProblem& problem, double rho, const ProblemData& data,
               const Matrix& reference);

}  // namespace fdasf
