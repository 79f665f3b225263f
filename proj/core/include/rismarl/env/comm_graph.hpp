// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace rismarl {

enum NodeType : int { kApNode = 0, kRisNode = 1 };
inline constexpr int kNumNodeTypes = 2;

enum EdgeType : int { kApToRis = 0, kRisToAp = 1, kApToAp = 2 };
inline constexpr int kNumEdgeTypes = 3;

inline constexpr int edge_source_type(int edge_type) { return edge_type == kRisToAp ? kRisNode : kApNode; }
inline constexpr int edge_target_type(int edge_type) { return edge_type == kApToRis ? kRisNode : kApNode; }

struct GraphNode {
  int type = kApNode;
  Eigen::VectorXd feature;
};

struct GraphEdge {
  int src = 0;
  int dst = 0;
  int type = kApToAp;
  Eigen::VectorXd feature;
};

/// Typed directed agent graph. Complex quantities are flattened as (re, im) pairs.
struct CommGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::vector<int>> inbound;   // edge ids ending at each node
  std::vector<std::vector<int>> outbound;  // edge ids leaving each node
  std::array<int, kNumNodeTypes> node_dim{0, 0};
  std::array<int, kNumEdgeTypes> edge_dim{0, 0, 0};

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  /// Rebuilds adjacency lists and checks per-type feature dimensions.
  void finalize();
  /// Relabels nodes: node i of the result is node perm[i] of this graph.
  CommGraph permuted(const std::vector<int>& perm) const;
};

}  // namespace rismarl
