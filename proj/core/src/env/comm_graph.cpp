// SPDX-License-Identifier: Apache-2.0
#include "rismarl/env/comm_graph.hpp"

#include "rismarl/common.hpp"

namespace rismarl {

void CommGraph::finalize() {
  inbound.assign(nodes.size(), {});
  outbound.assign(nodes.size(), {});
  std::array<int, kNumNodeTypes> nd{-1, -1};
  std::array<int, kNumEdgeTypes> ed{-1, -1, -1};
  for (const auto& n : nodes) {
    require(n.type >= 0 && n.type < kNumNodeTypes, "CommGraph: bad node type");
    auto& d = nd[n.type];
    require(d < 0 || d == n.feature.size(), "CommGraph: node feature dimension differs within a type");
    d = static_cast<int>(n.feature.size());
  }
  for (int e = 0; e < num_edges(); ++e) {
    const auto& edge = edges[e];
    require(edge.type >= 0 && edge.type < kNumEdgeTypes, "CommGraph: bad edge type");
    require(edge.src >= 0 && edge.src < num_nodes() && edge.dst >= 0 && edge.dst < num_nodes(),
            "CommGraph: edge endpoint out of range");
    require(nodes[edge.src].type == edge_source_type(edge.type) &&
                nodes[edge.dst].type == edge_target_type(edge.type),
            "CommGraph: edge type does not match endpoint types");
    auto& d = ed[edge.type];
    require(d < 0 || d == edge.feature.size(), "CommGraph: edge feature dimension differs within a type");
    d = static_cast<int>(edge.feature.size());
    outbound[edge.src].push_back(e);
    inbound[edge.dst].push_back(e);
  }
  for (int t = 0; t < kNumNodeTypes; ++t)
    if (nd[t] >= 0) node_dim[t] = nd[t];
  for (int t = 0; t < kNumEdgeTypes; ++t)
    if (ed[t] >= 0) edge_dim[t] = ed[t];
}

CommGraph CommGraph::permuted(const std::vector<int>& perm) const {
  require(static_cast<int>(perm.size()) == num_nodes(), "CommGraph::permuted: bad permutation size");
  std::vector<int> inv(perm.size(), -1);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    require(perm[i] >= 0 && perm[i] < num_nodes() && inv[perm[i]] < 0, "CommGraph::permuted: not a permutation");
    inv[perm[i]] = static_cast<int>(i);
  }
  CommGraph g;
  g.node_dim = node_dim;
  g.edge_dim = edge_dim;
  for (int i : perm) g.nodes.push_back(nodes[i]);
  for (const auto& e : edges) g.edges.push_back({inv[e.src], inv[e.dst], e.type, e.feature});
  g.finalize();
  g.node_dim = node_dim;
  g.edge_dim = edge_dim;
  return g;
}

}  // namespace rismarl
