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

#include "fdasf/fracprog.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fdasf {

double FractionalProblem::constraint_violation(const Matrix& X, const ProblemData& data) const {
  const auto kinds = constraint_kinds();
  if (kinds.empty()) return 0.0;
  const Vector h = constraint_values(X, data);
  double worst = 0.0;
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    const double hj = h(static_cast<Index>(j));
    worst = std::max(worst, kinds[j] == ConstraintKind::Equality ? std::abs(hj) : std::max(0.0, hj));
  }
  return worst;
}

bool FractionalProblem::valid(const Matrix& X, const ProblemData& data) const {
  return f2(X, data) > 0.0;
}

Matrix FractionalProblem::select_solution(const Matrix& X, const Matrix&) const { return X; }

double evaluate_ratio(const FractionalProblem& problem, const Matrix& X, const ProblemData& data) {
  const double den = problem.f2(X, data);
  if (!(den > 0.0)) {
    throw FeasibilityError(std::string(problem.name()) +
                           ": non-positive denominator f2 = " + std::to_string(den));
  }
  return problem.f1(X, data) / den;
}

double aux_objective(const FractionalProblem& problem, const Matrix& X, double rho,
                     const ProblemData& data) {
  return problem.f1(X, data) - rho * problem.f2(X, data);
}

DinkelbachResult dinkelbach_solve(const FractionalProblem& problem, const ProblemData& data,
                                  const Matrix& X0, const DinkelbachOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("Dinkelbach tolerance must be positive");
  if (options.max_iter < 1) throw InvalidArgument("Dinkelbach needs max_iter >= 1");

  DinkelbachResult result;
  result.X = X0;
  result.rho = evaluate_ratio(problem, X0, data);
  auto& trace = result.trace;
  trace.rho_sequence.push_back(result.rho);
  trace.f2_sequence.push_back(problem.f2(X0, data));
  if (options.keep_iterates) trace.iterates.push_back(X0);

  for (int it = 0; it < options.max_iter; ++it) {
    AuxResult aux = problem.solve_auxiliary(result.rho, data, result.X);
    ++trace.aux_solve_count;
    Matrix next = problem.select_solution(aux.X, result.X);
    const double f2 = problem.f2(next, data);
    if (!(f2 > 0.0)) {
      throw FeasibilityError(std::string(problem.name()) +
                             ": Dinkelbach iterate with non-positive denominator");
    }
    const double rho = problem.f1(next, data) / f2;
    const double change = options.stop == StopRule::IterateChange
                              ? (next - result.X).norm()
                              : std::abs(rho - result.rho);
    result.X = std::move(next);
    result.rho = rho;
    trace.rho_sequence.push_back(rho);
    trace.f2_sequence.push_back(f2);
    if (options.keep_iterates) trace.iterates.push_back(result.X);
    if (change < options.tol) {
      trace.converged = true;
      break;
    }
  }
  return result;
}

double g_value(const FractionalProblem& problem, double rho, const ProblemData& data,
               const Matrix& reference) {
  const AuxResult aux = problem.solve_auxiliary(rho, data, reference);
  return aux_objective(problem, aux.X, rho, data);
}

}  // namespace fdasf
