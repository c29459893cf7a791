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

#include "fdasf/dasf.hpp"
#include "fdasf/fracprog.hpp"
#include "fdasf/netgraph.hpp"

#include <string>

namespace fdasf {

struct KktReport {
  double stationarity = 0.0;     // ||grad r + sum_j mu_j grad h_j||_F
  double primal = 0.0;           // largest constraint violation
  double dual = 0.0;             // largest negative inequality multiplier
  double complementarity = 0.0;  // largest |mu_j h_j|
  double total = 0.0;            // sum of the four terms
  Index active = 0;              // constraints entering the multiplier fit
  bool licq = true;              // active gradients linearly independent
  Vector multipliers;            // one per constraint, zero when inactive
};

/// First-order optimality residual of the ratio at X. Multipliers are fitted
/// by least squares over the equalities and the inequalities with
/// h_j >= -active_tol.
KktReport kkt_residual(const FractionalProblem& problem, const Matrix& X, const ProblemData& data,
                       double active_tol = 1e-7);

struct ConstraintBoundReport {
  int J = 0;
  Index Q = 0;
  double bound_a = 0.0;  // Q^2
  double bound_b = 0.0;  // min(Q^2 / (K-1) sum_k |N_k|, (1 + min_k |N_k|) Q^2)
  bool holds_a = false;
  bool holds_b = false;

  bool any() const { return holds_a || holds_b; }
  std::string summary() const;
};

/// Advisory check of the constraint count against the two sufficient bounds.
ConstraintBoundReport check_constraint_bounds(int J, Index Q, const Topology& topology);

/// Dense M x M~ compression map of a local view: identity in the updating
/// node's block-row, X_k in the column block of k's cluster. Debug use only.
Matrix explicit_compression_matrix(const Topology& topology, const LocalView& view,
                                   const DistributedState& state);

}  // namespace fdasf
