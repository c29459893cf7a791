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

#include "fdasf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdasf {

KktReport kkt_residual(const FractionalProblem& problem, const Matrix& X, const ProblemData& data,
                       double active_tol) {
  const double f1 = problem.f1(X, data);
  const double f2 = problem.f2(X, data);
  if (!(f2 > 0.0)) throw FeasibilityError("kkt_residual: non-positive denominator");
  const double r = f1 / f2;
  const Matrix grad_r = (problem.grad_f1(X, data) - r * problem.grad_f2(X, data)) / f2;

  const auto kinds = problem.constraint_kinds();
  const Index J = static_cast<Index>(kinds.size());
  KktReport out;
  out.multipliers = Vector::Zero(J);
  if (J == 0) {
    out.stationarity = grad_r.norm();
    out.total = out.stationarity;
    return out;
  }

  const Vector h = problem.constraint_values(X, data);
  const auto grads = problem.constraint_gradients(X, data);
  std::vector<Index> active;
  for (Index j = 0; j < J; ++j) {
    if (kinds[j] == ConstraintKind::Equality || h(j) >= -active_tol) active.push_back(j);
    const double viol = kinds[j] == ConstraintKind::Equality ? std::abs(h(j)) : std::max(0.0, h(j));
    out.primal = std::max(out.primal, viol);
  }
  out.active = static_cast<Index>(active.size());

  const Index n = grad_r.size();
  if (!active.empty()) {
    Matrix G(n, out.active);
    for (Index a = 0; a < out.active; ++a) {
      G.col(a) = grads[active[a]].reshaped();
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(G);
    qr.setThreshold(1e-10);
    out.licq = qr.rank() == out.active;
    const Vector mu = qr.solve(Vector(-grad_r.reshaped()));
    for (Index a = 0; a < out.active; ++a) out.multipliers(active[a]) = mu(a);
    out.stationarity = (grad_r.reshaped() + G * mu).norm();
  } else {
    out.stationarity = grad_r.norm();
  }
  for (Index j = 0; j < J; ++j) {
    if (kinds[j] == ConstraintKind::Inequality) {
      out.dual = std::max(out.dual, std::max(0.0, -out.multipliers(j)));
    }
    out.complementarity = std::max(out.complementarity, std::abs(out.multipliers(j) * h(j)));
  }
  out.total = out.stationarity + out.primal + out.dual + out.complementarity;
  return out;
}

std::string ConstraintBoundReport::summary() const {
  std::ostringstream os;
  os << "J=" << J << " Q=" << Q << ": J<=Q^2 (" << bound_a << ") "
     << (holds_a ? "holds" : "fails") << "; degree bound (" << bound_b << ") "
     << (holds_b ? "holds" : "fails");
  return os.str();
}

ConstraintBoundReport check_constraint_bounds(int J, Index Q, const Topology& topology) {
  ConstraintBoundReport out;
  out.J = J;
  out.Q = Q;
  const double q2 = static_cast<double>(Q * Q);
  out.bound_a = q2;
  out.holds_a = J <= out.bound_a;
  const int K = topology.node_count();
  if (K >= 2) {
    double degree_sum = 0.0;
    int min_degree = topology.degree(0);
    for (NodeId k = 0; k < K; ++k) {
      degree_sum += topology.degree(k);
      min_degree = std::min(min_degree, topology.degree(k));
    }
    out.bound_b = std::min(q2 / (K - 1) * degree_sum, (1.0 + min_degree) * q2);
    out.holds_b = J <= out.bound_b;
  }
  return out;
}

Matrix explicit_compression_matrix(const Topology& topology, const LocalView& view,
                                   const DistributedState& state) {
  const Index M = topology.total_channels();
  Matrix C = Matrix::Zero(M, view.dim());
  C.block(topology.channel_offset(view.q), 0, view.own_channels, view.own_channels).setIdentity();
  for (std::size_t j = 0; j < view.clusters.size(); ++j) {
    const Index col = view.own_channels + static_cast<Index>(j) * view.Q;
    for (NodeId k : view.clusters[j]) {
      C.block(topology.channel_offset(k), col, topology.channels(k), view.Q) = state.blocks[k];
    }
  }
  return C;
}

}  // namespace fdasf
