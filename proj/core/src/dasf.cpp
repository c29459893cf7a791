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

#include "fdasf/dasf.hpp"

#include "fdasf/rng.hpp"
#include "fdasf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fdasf {

namespace {

Matrix symmetrized(const Matrix& S) { return 0.5 * (S + S.transpose()); }

double relative_gap(double local, double global) {
  return std::abs(local - global) / std::max(1.0, std::abs(global));
}

long long payload_size(const CompressedNode& node) {
  long long n = node.y.size() + node.v.size();
  for (const auto& f : node.fixed) n += f.size();
  return n;
}

void accumulate(CompressedNode& into, const CompressedNode& from) {
  if (from.y.size() > 0) into.y += from.y;
  if (from.v.size() > 0) into.v += from.v;
  for (std::size_t l = 0; l < into.fixed.size(); ++l) into.fixed[l] += from.fixed[l];
}

Matrix hstack(const Matrix& own, const std::vector<CompressedNode>& fused, bool use_v) {
  Index cols = own.cols();
  for (const auto& f : fused) cols += use_v ? f.v.cols() : f.y.cols();
  Matrix out(own.rows(), cols);
  out.leftCols(own.cols()) = own;
  Index at = own.cols();
  for (const auto& f : fused) {
    const Matrix& part = use_v ? f.v : f.y;
    out.middleCols(at, part.cols()) = part;
    at += part.cols();
  }
  return out;
}

}  // namespace

Matrix DistributedState::stacked() const {
  Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Matrix X(rows, columns());
  Index at = 0;
  for (const auto& b : blocks) {
    X.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return X;
}

DistributedState DistributedState::from_stacked(const Matrix& X, const Topology& topology) {
  if (X.rows() != topology.total_channels()) {
    throw InvalidArgument("state: stacked filter has " + std::to_string(X.rows()) +
                          " rows, network has " + std::to_string(topology.total_channels()));
  }
  DistributedState state;
  for (NodeId k = 0; k < topology.node_count(); ++k) {
    state.blocks.push_back(X.middleRows(topology.channel_offset(k), topology.channels(k)));
  }
  return state;
}

Matrix compress_signal(const Matrix& Xk, const Matrix& yk) {
  if (yk.cols() != Xk.rows()) throw InvalidArgument("compress: signal/filter size mismatch");
  return yk * Xk;
}

Matrix compress_fixed(const Matrix& Xk, const Matrix& Bk) {
  if (Bk.rows() != Xk.rows()) throw InvalidArgument("compress: matrix/filter size mismatch");
  return Xk.transpose() * Bk;
}

FusedData fuse_forward(const PrunedTree& tree, const std::vector<CompressedNode>& node_data) {
  const int K = tree.node_count();
  if (static_cast<int>(node_data.size()) != K) {
    throw InvalidArgument("fuse_forward: need compressed data for every node");
  }
  std::vector<CompressedNode> partial(static_cast<std::size_t>(K));
  FusedData out;
  // Reverse BFS order visits every child before its parent.
  for (auto it = tree.bfs_order.rbegin(); it != tree.bfs_order.rend(); ++it) {
    const NodeId k = *it;
    if (k == tree.root) continue;
    CompressedNode sum = node_data[k];
    for (NodeId c : tree.children[k]) accumulate(sum, partial[c]);
    out.scalars_up += payload_size(sum);
    partial[k] = std::move(sum);
  }
  for (NodeId n : tree.root_neighbors) out.from_neighbors.push_back(std::move(partial[n]));
  return out;
}

Matrix compress_rows(const Topology& topology, const LocalView& view,
                     const DistributedState& state, const Matrix& A) {
  const Index Q = view.Q;
  Matrix out = Matrix::Zero(view.dim(), A.cols());
  out.topRows(view.own_channels) =
      A.middleRows(topology.channel_offset(view.q), topology.channels(view.q));
  for (std::size_t j = 0; j < view.clusters.size(); ++j) {
    auto block = out.middleRows(view.own_channels + static_cast<Index>(j) * Q, Q);
    for (NodeId k : view.clusters[j]) {
      block.noalias() +=
          state.blocks[k].transpose() * A.middleRows(topology.channel_offset(k), topology.channels(k));
    }
  }
  return out;
}

LocalView build_local_view(const Topology& topology, const PrunedTree& tree,
                           const DistributedState& state, const FractionalProblem& problem,
                           const std::vector<Matrix>& fixed, const IterationInput& input) {
  const int K = topology.node_count();
  const NodeId q = tree.root;
  const Index Q = state.columns();
  const bool empirical = input.mode() == StatsMode::Empirical;
  if (!empirical && input.exact == nullptr) throw InvalidArgument("local view: no statistics");
  if (empirical && problem.uses_v() && input.batch->v.size() == 0) {
    throw InvalidArgument("local view: problem needs v but the batch has none");
  }

  std::vector<CompressedNode> node_data(static_cast<std::size_t>(K));
  for (NodeId k = 0; k < K; ++k) {
    if (k == q) continue;
    const Matrix& Xk = state.blocks[k];
    auto& node = node_data[k];
    if (empirical) {
      node.y = compress_signal(Xk, input.batch->node_y(topology, k));
      if (problem.uses_v()) node.v = compress_signal(Xk, input.batch->node_v(topology, k));
    }
    for (const auto& B : fixed) {
      node.fixed.push_back(
          compress_fixed(Xk, B.middleRows(topology.channel_offset(k), topology.channels(k))));
    }
  }
  FusedData fused = fuse_forward(tree, node_data);

  LocalView view;
  view.q = q;
  view.own_channels = topology.channels(q);
  view.Q = Q;
  view.neighbors = tree.root_neighbors;
  view.clusters = tree.clusters;
  view.scalars_up = fused.scalars_up;
  if (!empirical) {
    // Nodes would still ship N-sample compressed signals.
    const long long signals = problem.uses_v() ? 2 : 1;
    view.scalars_up += static_cast<long long>(K - 1) * signals * input.nominal_samples * Q;
  }

  const Index dim = view.dim();
  const Index off_q = topology.channel_offset(q);
  const Index Mq = view.own_channels;
  for (std::size_t l = 0; l < fixed.size(); ++l) {
    Matrix Bt(dim, fixed[l].cols());
    Bt.topRows(Mq) = fixed[l].middleRows(off_q, Mq);
    for (std::size_t j = 0; j < fused.from_neighbors.size(); ++j) {
      Bt.middleRows(Mq + static_cast<Index>(j) * Q, Q) = fused.from_neighbors[j].fixed[l];
    }
    view.data.fixed.push_back(std::move(Bt));
  }

  if (empirical) {
    const SampleBatch& batch = *input.batch;
    const double inv_n = 1.0 / static_cast<double>(batch.samples());
    view.y = hstack(batch.node_y(topology, q), fused.from_neighbors, false);
    view.data.Ryy = symmetrized(inv_n * (view.y.transpose() * view.y));
    if (problem.uses_v()) {
      view.v = hstack(batch.node_v(topology, q), fused.from_neighbors, true);
      view.data.Rvv = symmetrized(inv_n * (view.v.transpose() * view.v));
    }
    if (problem.uses_d()) {
      view.d = batch.d;
      view.data.ryd = inv_n * (view.y.transpose() * view.d);
      view.data.rdd = inv_n * view.d.squaredNorm();
    }
  } else {
    const ExactStats& ex = *input.exact;
    auto project = [&](const Matrix& R) {
      const Matrix left = compress_rows(topology, view, state, R);
      return symmetrized(compress_rows(topology, view, state, left.transpose()));
    };
    view.data.Ryy = project(ex.Ryy);
    if (problem.uses_v()) view.data.Rvv = project(ex.Rvv);
    if (problem.uses_d()) {
      view.data.ryd = compress_rows(topology, view, state, ex.ryd);
      view.data.rdd = ex.rdd;
    }
  }

  view.reference = Matrix::Zero(dim, Q);
  view.reference.topRows(Mq) = state.blocks[q];
  for (std::size_t j = 0; j < view.neighbors.size(); ++j) {
    view.reference.middleRows(Mq + static_cast<Index>(j) * Q, Q).setIdentity();
  }
  return view;
}

double local_rho(const LocalView& view, const FractionalProblem& problem) {
  return evaluate_ratio(problem, view.reference, view.data);
}

LocalSolution local_solve(const LocalView& view, const FractionalProblem& problem, double rho,
                          Mode mode, const DinkelbachOptions& inner) {
  LocalSolution out;
  if (mode == Mode::FDASF) {
    AuxResult aux = problem.solve_auxiliary(rho, view.data, view.reference);
    out.X = problem.select_solution(aux.X, view.reference);
    out.aux_solves = 1;
  } else {
    DinkelbachResult res = dinkelbach_solve(problem, view.data, view.reference, inner);
    out.X = problem.select_solution(res.X, view.reference);
    out.aux_solves = res.trace.aux_solve_count;
  }
  return out;
}

Matrix select_solution(const std::vector<Matrix>& candidates, const Matrix& reference) {
  if (candidates.empty()) throw InvalidArgument("select_solution: empty candidate set");
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double dist = (candidates[i] - reference).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return candidates[best];
}

std::vector<Matrix> sign_orbit(const Matrix& X) {
  const Index Q = X.cols();
  if (Q > 20) throw InvalidArgument("sign_orbit: too many columns");
  std::vector<Matrix> out;
  const unsigned long count = 1UL << Q;
  out.reserve(count);
  for (unsigned long mask = 0; mask < count; ++mask) {
    Matrix Y = X;
    for (Index j = 0; j < Q; ++j) {
      if (mask & (1UL << j)) Y.col(j) = -Y.col(j);
    }
    out.push_back(std::move(Y));
  }
  return out;
}

long long disseminate_update(DistributedState& state, const Topology& topology,
                             const LocalView& view, const Matrix& local_solution) {
  if (local_solution.rows() != view.dim() || local_solution.cols() != view.Q) {
    throw InvalidArgument("disseminate: local solution has the wrong shape");
  }
  const Index Q = view.Q;
  state.blocks[view.q] = local_solution.topRows(view.own_channels);
  long long scalars = 0;
  for (std::size_t j = 0; j < view.clusters.size(); ++j) {
    const Matrix G = local_solution.middleRows(view.own_channels + static_cast<Index>(j) * Q, Q);
    for (NodeId k : view.clusters[j]) {
      state.blocks[k] = state.blocks[k] * G;
      scalars += Q * Q;
    }
  }
  (void)topology;
  return scalars;
}

NodeId updating_node(int iteration, int node_count, const std::vector<NodeId>& schedule) {
  if (!schedule.empty()) return schedule[static_cast<std::size_t>(iteration) % schedule.size()];
  return iteration % node_count;
}

ProblemData global_data(const IterationInput& input, const std::vector<Matrix>& fixed,
                        const FractionalProblem& problem) {
  ProblemData data;
  data.fixed = fixed;
  if (input.mode() == StatsMode::Empirical) {
    const SampleBatch& batch = *input.batch;
    const double inv_n = 1.0 / static_cast<double>(batch.samples());
    data.Ryy = symmetrized(inv_n * (batch.y.transpose() * batch.y));
    if (problem.uses_v()) data.Rvv = symmetrized(inv_n * (batch.v.transpose() * batch.v));
    if (problem.uses_d()) {
      data.ryd = inv_n * (batch.y.transpose() * batch.d);
      data.rdd = inv_n * batch.d.squaredNorm();
    }
  } else {
    data.Ryy = input.exact->Ryy;
    if (problem.uses_v()) data.Rvv = input.exact->Rvv;
    if (problem.uses_d()) {
      data.ryd = input.exact->ryd;
      data.rdd = input.exact->rdd;
    }
  }
  return data;
}

IterationMetrics iterate(DistributedState& state, const Topology& topology,
                         const FractionalProblem& problem, const std::vector<Matrix>& fixed,
                         const IterationInput& input, const EngineOptions& options) {
  const int K = topology.node_count();
  if (static_cast<int>(state.blocks.size()) != K) {
    throw InvalidArgument("iterate: state does not match the topology");
  }
  if (state.columns() > topology.min_channels()) {
    throw InvalidArgument("iterate: Q exceeds the channel count of some node");
  }
  IterationMetrics m;
  const NodeId q = updating_node(state.iteration, K, options.schedule);
  m.updating_node = q;
  const std::uint64_t tree_seed =
      options.prune_seed == 0
          ? 0
          : derive_seed(options.prune_seed, static_cast<std::uint64_t>(state.iteration)) | 1ULL;
  const PrunedTree tree = prune_to_tree(topology, q, tree_seed);

  const LocalView view = build_local_view(topology, tree, state, problem, fixed, input);
  m.rho = local_rho(view, problem);
  const LocalSolution sol = local_solve(view, problem, m.rho, options.mode, options.inner);
  m.aux_solves = sol.aux_solves;

  const double f2_after = problem.f2(sol.X, view.data);
  m.valid = problem.valid(sol.X, view.data);
  m.rho_after = f2_after > 0.0 ? problem.f1(sol.X, view.data) / f2_after
                               : std::numeric_limits<double>::quiet_NaN();

  Matrix C;
  if (options.verify) {
    C = explicit_compression_matrix(topology, view, state);
    const ProblemData global = global_data(input, fixed, problem);
    const Matrix X = state.stacked();
    double err = std::max(relative_gap(problem.f1(view.reference, view.data), problem.f1(X, global)),
                          relative_gap(problem.f2(view.reference, view.data), problem.f2(X, global)));
    const Vector h_local = problem.constraint_values(view.reference, view.data);
    const Vector h_global = problem.constraint_values(X, global);
    for (Index j = 0; j < h_local.size(); ++j) err = std::max(err, relative_gap(h_local(j), h_global(j)));
    err = std::max(err, (C * view.reference - X).norm() / std::max(1.0, X.norm()));
    m.consistency_error = err;
  }

  const long long down = disseminate_update(state, topology, view, sol.X);
  m.scalars_transmitted = view.scalars_up + down;

  const Matrix X_new = state.stacked();
  if (options.verify) {
    const double scale = std::max(X_new.norm(), std::numeric_limits<double>::min());
    m.update_error = (X_new - C * sol.X).norm() / scale;
  }
  ProblemData constraints_only;
  constraints_only.fixed = fixed;
  m.constraint_residual = problem.constraint_violation(X_new, constraints_only);
  ++state.iteration;
  return m;
}

}  // namespace fdasf
