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

#include "fdasf/netgraph.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>

namespace fdasf {

namespace {

constexpr int kMaxErdosRenyiAttempts = 1000;

void check_node(NodeId k, int node_count) {
  if (k < 0 || k >= node_count) {
    throw InvalidArgument("node id " + std::to_string(k) + " out of range");
  }
}

}  // namespace

bool is_connected(const std::vector<std::vector<NodeId>>& adjacency) {
  if (adjacency.empty()) return false;
  std::vector<char> seen(adjacency.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId k = stack.back();
    stack.pop_back();
    for (NodeId n : adjacency[k]) {
      if (!seen[n]) {
        seen[n] = 1;
        ++reached;
        stack.push_back(n);
      }
    }
  }
  return reached == adjacency.size();
}

Topology::Topology(int node_count, const std::vector<Edge>& edges, std::vector<int> channels)
    : neighbors_(node_count > 0 ? node_count : 0), channels_(std::move(channels)) {
  if (node_count < 1) throw InvalidArgument("topology needs at least one node");
  if (static_cast<int>(channels_.size()) != node_count) {
    throw InvalidArgument("channel list length must equal the node count");
  }
  for (int m : channels_) {
    if (m < 1) throw InvalidArgument("every node needs at least one channel");
  }
  for (const auto& [a, b] : edges) {
    check_node(a, node_count);
    check_node(b, node_count);
    if (a == b) throw InvalidArgument("self-loops are not allowed");
    if (std::find(neighbors_[a].begin(), neighbors_[a].end(), b) == neighbors_[a].end()) {
      neighbors_[a].push_back(b);
      neighbors_[b].push_back(a);
    }
  }
  for (auto& list : neighbors_) std::sort(list.begin(), list.end());
  if (!is_connected(neighbors_)) throw TopologyError("topology is not connected");

  offsets_.resize(channels_.size() + 1, 0);
  std::partial_sum(channels_.begin(), channels_.end(), offsets_.begin() + 1,
                   [](Index acc, int m) { return acc + m; });
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& list = neighbors_.at(a);
  return std::binary_search(list.begin(), list.end(), b);
}

std::vector<Edge> Topology::edges() const {
  std::vector<Edge> out;
  for (NodeId a = 0; a < node_count(); ++a) {
    for (NodeId b : neighbors_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

std::size_t Topology::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : neighbors_) twice += list.size();
  return twice / 2;
}

int Topology::min_channels() const {
  return *std::min_element(channels_.begin(), channels_.end());
}

Topology generate_erdos_renyi(int node_count, double edge_probability,
                              std::vector<int> channels, std::uint64_t seed) {
  if (node_count < 2) throw InvalidArgument("Erdos-Renyi generation needs K >= 2");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
    throw InvalidArgument("edge probability must lie in [0, 1]");
  }
  if (static_cast<int>(channels.size()) != node_count) {
    throw InvalidArgument("channel list length must equal the node count");
  }
  for (int attempt = 0; attempt < kMaxErdosRenyiAttempts; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::bernoulli_distribution coin(edge_probability);
    std::vector<std::vector<NodeId>> adjacency(node_count);
    std::vector<Edge> edges;
    for (NodeId a = 0; a < node_count; ++a) {
      for (NodeId b = a + 1; b < node_count; ++b) {
        if (coin(rng)) {
          edges.emplace_back(a, b);
          adjacency[a].push_back(b);
          adjacency[b].push_back(a);
        }
      }
    }
    if (is_connected(adjacency)) return Topology(node_count, edges, std::move(channels));
  }
  throw TopologyError("no connected Erdos-Renyi draw after 1000 attempts (p too small for K)");
}

const std::vector<NodeId>& PrunedTree::cluster_of_neighbor(NodeId n) const {
  const auto it = std::find(root_neighbors.begin(), root_neighbors.end(), n);
  if (it == root_neighbors.end()) {
    throw InvalidArgument("node " + std::to_string(n) + " is not adjacent to the root");
  }
  return clusters[static_cast<std::size_t>(it - root_neighbors.begin())];
}

PrunedTree prune_to_tree(const Topology& topology, NodeId root, std::uint64_t seed) {
  const int K = topology.node_count();
  check_node(root, K);

  std::vector<int> depth(K, -1);
  std::vector<NodeId> order;
  order.reserve(K);
  std::queue<NodeId> frontier;
  depth[root] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    const NodeId k = frontier.front();
    frontier.pop();
    order.push_back(k);
    for (NodeId n : topology.neighbors(k)) {
      if (depth[n] < 0) {
        depth[n] = depth[k] + 1;
        frontier.push(n);
      }
    }
  }

  PrunedTree tree;
  tree.root = root;
  tree.parent.assign(K, -1);
  std::mt19937_64 rng(seed);
  for (NodeId k = 0; k < K; ++k) {
    if (k == root) continue;
    std::vector<NodeId> candidates;
    for (NodeId n : topology.neighbors(k)) {
      if (depth[n] == depth[k] - 1) candidates.push_back(n);
    }
    // Neighbour lists are sorted, so candidates.front() is the smallest id.
    if (seed == 0 || candidates.size() == 1) {
      tree.parent[k] = candidates.front();
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      tree.parent[k] = candidates[pick(rng)];
    }
  }

  tree.neighbors.assign(K, {});
  tree.children.assign(K, {});
  for (NodeId k = 0; k < K; ++k) {
    const NodeId p = tree.parent[k];
    if (p < 0) continue;
    tree.kept_edges.emplace_back(std::min(k, p), std::max(k, p));
    tree.neighbors[k].push_back(p);
    tree.neighbors[p].push_back(k);
    tree.children[p].push_back(k);
  }
  std::sort(tree.kept_edges.begin(), tree.kept_edges.end());
  for (auto& list : tree.neighbors) std::sort(list.begin(), list.end());
  for (auto& list : tree.children) std::sort(list.begin(), list.end());

  // BFS order over the tree itself, children visited in ascending id.
  tree.bfs_order.clear();
  tree.bfs_order.push_back(root);
  for (std::size_t head = 0; head < tree.bfs_order.size(); ++head) {
    for (NodeId c : tree.children[tree.bfs_order[head]]) tree.bfs_order.push_back(c);
  }

  tree.root_neighbors = tree.children[root];
  tree.clusters.assign(tree.root_neighbors.size(), {});
  tree.cluster_index.assign(K, -1);
  for (std::size_t j = 0; j < tree.root_neighbors.size(); ++j) {
    tree.cluster_index[tree.root_neighbors[j]] = static_cast<int>(j);
  }
  for (std::size_t pos = 1; pos < tree.bfs_order.size(); ++pos) {
    const NodeId k = tree.bfs_order[pos];
    if (tree.cluster_index[k] < 0) tree.cluster_index[k] = tree.cluster_index[tree.parent[k]];
  }
  for (NodeId k = 0; k < K; ++k) {
    if (tree.cluster_index[k] >= 0) tree.clusters[tree.cluster_index[k]].push_back(k);
  }
  return tree;
}

std::string topology_to_json(const Topology& topology) {
  nlohmann::json doc;
  doc["K"] = topology.node_count();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : topology.edges()) edges.push_back({a + 1, b + 1});
  doc["edges"] = std::move(edges);
  doc["channels"] = topology.channel_counts();
  return doc.dump();
}

Topology topology_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("topology JSON: ") + e.what());
  }
  try {
    const int K = doc.at("K").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
      if (e.size() != 2) throw InvalidArgument("topology JSON: edges must be pairs");
      edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
    }
    auto channels = doc.at("channels").get<std::vector<int>>();
    return Topology(K, edges, std::move(channels));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("topology JSON: ") + e.what());
  }
}

}  // namespace fdasf
