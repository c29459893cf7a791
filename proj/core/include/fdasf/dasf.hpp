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
#include "fdasf/netgraph.hpp"
#include "fdasf/signals.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fdasf {

enum class Mode { FDASF, DASF };
enum class StatsMode { Empirical, Exact };

/// Per-node blocks X_k of the network-wide filter, in node order.
struct DistributedState {
  std::vector<Matrix> blocks;
  int iteration = 0;

  Index columns() const { return blocks.empty() ? 0 : blocks.front().cols(); }
  Matrix stacked() const;
  static DistributedState from_stacked(const Matrix& X, const Topology& topology);
};

/// Statistics for one iteration: a fresh sample batch, or the exact moments.
struct IterationInput {
  const SampleBatch* batch = nullptr;
  const ExactStats* exact = nullptr;
  /// Window length used for communication accounting in exact mode.
  Index nominal_samples = 0;

  StatsMode mode() const { return batch ? StatsMode::Empirical : StatsMode::Exact; }
  Index samples() const { return batch ? batch->samples() : nominal_samples; }
};

/// What one node contributes: compressed signals (rows are samples) and the
/// images X_k^T B_k of the deterministic matrices.
struct CompressedNode {
  Matrix y;
  Matrix v;
  std::vector<Matrix> fixed;
};

/// y_k X_k (samples as rows, so this is X_k^T y_k per sample).
Matrix compress_signal(const Matrix& Xk, const Matrix& yk);
/// X_k^T B_k.
Matrix compress_fixed(const Matrix& Xk, const Matrix& Bk);

struct FusedData {
  /// Sums over each cluster, aligned with tree.root_neighbors.
  std::vector<CompressedNode> from_neighbors;
  long long scalars_up = 0;
};

/// Leaf-first sum-and-forward toward the root. `node_data` is indexed by node
/// id; the root's entry is ignored. Every non-root node sends one message to
/// its parent carrying the sum of its own and its children's payloads.
FusedData fuse_forward(const PrunedTree& tree, const std::vector<CompressedNode>& node_data);

struct LocalView {
  NodeId q = 0;
  Index own_channels = 0;  // M_q
  Index Q = 0;
  std::vector<NodeId> neighbors;               // ascending
  std::vector<std::vector<NodeId>> clusters;   // aligned with neighbors
  Matrix y;                                    // N x M~, empirical mode only
  Matrix v;
  Vector d;
  ProblemData data;                            // local statistics + fixed images
  Matrix reference;                            // [X_q; I_Q; ...; I_Q]
  long long scalars_up = 0;

  Index dim() const { return own_channels + static_cast<Index>(neighbors.size()) * Q; }
};

/// Compress, fuse and concatenate the data available at the root of `tree`.
/// `fixed` are the network-wide deterministic matrices (M x L each).
LocalView build_local_view(const Topology& topology, const PrunedTree& tree,
                           const DistributedState& state, const FractionalProblem& problem,
                           const std::vector<Matrix>& fixed, const IterationInput& input);

/// C^T A for the implicit compression map C of `view` (A has M rows).
Matrix compress_rows(const Topology& topology, const LocalView& view,
                     const DistributedState& state, const Matrix& A);

/// rho^i evaluated on the local view at the reference point.
double local_rho(const LocalView& view, const FractionalProblem& problem);

struct LocalSolution {
  Matrix X;
  int aux_solves = 0;
};

/// F-DASF: one auxiliary solve at rho. DASF: a full Dinkelbach loop started at
/// the reference. The result is tie-broken against the reference.
LocalSolution local_solve(const LocalView& view, const FractionalProblem& problem, double rho,
                          Mode mode, const DinkelbachOptions& inner = {});

/// Candidate closest to the reference in Frobenius norm (first on ties).
Matrix select_solution(const std::vector<Matrix>& candidates, const Matrix& reference);

/// All 2^Q column-sign variants of X, starting with X itself.
std::vector<Matrix> sign_orbit(const Matrix& X);

/// Install X_q and apply X_k <- X_k G_n in every cluster. Returns the number of
/// scalars sent down the tree.
long long disseminate_update(DistributedState& state, const Topology& topology,
                             const LocalView& view, const Matrix& local_solution);

struct EngineOptions {
  Mode mode = Mode::FDASF;
  DinkelbachOptions inner;
  /// Zero keeps the deterministic smallest-id tree; otherwise the tree of
  /// iteration i is drawn with derive_seed(prune_seed, i).
  std::uint64_t prune_seed = 0;
  /// Updating node per iteration index; empty means round robin.
  std::vector<NodeId> schedule;
  /// Cross-check local and network-wide evaluations and the update rule
  /// against a dense compression matrix.
  bool verify = false;
};

struct IterationMetrics {
  NodeId updating_node = 0;
  double rho = 0.0;        // at the input state, internal sign convention
  double rho_after = 0.0;  // at the new state, same data
  int aux_solves = 0;
  long long scalars_transmitted = 0;
  double constraint_residual = 0.0;  // of the new state
  bool valid = true;                 // open-set conditions of the new state
  std::optional<double> consistency_error;  // verify mode
  std::optional<double> update_error;       // verify mode
};

NodeId updating_node(int iteration, int node_count, const std::vector<NodeId>& schedule = {});

/// One full iteration: prune, compress, fuse, solve locally, disseminate.
IterationMetrics iterate(DistributedState& state, const Topology& topology,
                         const FractionalProblem& problem, const std::vector<Matrix>& fixed,
                         const IterationInput& input, const EngineOptions& options);

/// Network-wide statistics of one iteration's input plus the fixed matrices.
ProblemData global_data(const IterationInput& input, const std::vector<Matrix>& fixed,
                        const FractionalProblem& problem);

}  // namespace fdasf
