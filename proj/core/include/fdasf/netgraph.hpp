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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdasf {

using Edge = std::pair<NodeId, NodeId>;

/// Undirected, connected sensor network. Node k measures channels(k) signal
/// channels, stored contiguously (in node order) in the network-wide signal.
class Topology {
 public:
  /// Throws InvalidArgument on self-loops, out-of-range ids, non-positive
  /// channel counts or a disconnected graph.
  Topology(int node_count, const std::vector<Edge>& edges, std::vector<int> channels);

  int node_count() const { return static_cast<int>(neighbors_.size()); }
  const std::vector<NodeId>& neighbors(NodeId k) const { return neighbors_.at(k); }
  int degree(NodeId k) const { return static_cast<int>(neighbors_.at(k).size()); }
  bool adjacent(NodeId a, NodeId b) const;

  /// Edges as (min, max) pairs in lexicographic order.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  int channels(NodeId k) const { return channels_.at(k); }
  const std::vector<int>& channel_counts() const { return channels_; }
  Index channel_offset(NodeId k) const { return offsets_.at(k); }
  Index total_channels() const { return offsets_.back(); }
  int min_channels() const;

 private:
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<int> channels_;
  std::vector<Index> offsets_;
};

/// True when every node is reachable from node 0 through the adjacency lists.
bool is_connected(const std::vector<std::vector<NodeId>>& adjacency);

class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Erdős–Rényi draw conditioned on connectivity: disconnected draws are
/// redrawn with derived seeds, up to 1000 attempts.
Topology generate_erdos_renyi(int node_count, double edge_probability,
                              std::vector<int> channels, std::uint64_t seed);

/// Spanning tree used for one iteration of in-network fusion.
struct PrunedTree {
  NodeId root = 0;
  std::vector<NodeId> parent;                  // -1 at the root
  std::vector<Edge> kept_edges;                // (min, max), sorted
  std::vector<std::vector<NodeId>> neighbors;  // tree adjacency, ascending
  std::vector<std::vector<NodeId>> children;   // ascending
  std::vector<NodeId> bfs_order;               // root first
  std::vector<NodeId> root_neighbors;          // ascending id
  std::vector<std::vector<NodeId>> clusters;   // clusters[j] hangs off root_neighbors[j]
  std::vector<int> cluster_index;              // per node; -1 at the root

  int node_count() const { return static_cast<int>(parent.size()); }
  /// Cluster hanging off root neighbor n (throws if n is not one).
  const std::vector<NodeId>& cluster_of_neighbor(NodeId n) const;
};

/// Breadth-first shortest-path tree rooted at `root`. Ties between equally
/// short paths go to the smallest parent id; a non-zero seed instead picks a
/// parent uniformly among the tied candidates. Every edge at the root is kept.
PrunedTree prune_to_tree(const Topology& topology, NodeId root, std::uint64_t seed = 0);

/// {"K": int, "edges": [[i,j],...], "channels": [int,...]}, 1-based ids.
std::string topology_to_json(const Topology& topology);
Topology topology_from_json(std::string_view text);

}  // namespace fdasf
