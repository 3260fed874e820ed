#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "lazycg/core.hpp"

namespace lazycg {

/// Edge between two node ids. Directed for path polytopes (u -> v),
/// undirected for spanning tree polytopes.
struct Edge {
  int u = 0;
  int v = 0;
};

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  // returns false if a and b were already connected
  bool unite(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent_[ra] = rb;
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Topological order of a digraph given as an edge list, empty if it has a
// cycle. Kahn's algorithm; among ready nodes the smallest id goes first, so
// the order is deterministic.
inline std::vector<int> topological_order(int nodes, const std::vector<Edge>& arcs) {
  std::vector<int> indeg(nodes, 0);
  std::vector<std::vector<int>> out(nodes);
  for (const Edge& e : arcs) {
    ++indeg[e.v];
    out[e.u].push_back(e.v);
  }
  std::vector<int> ready;
  for (int i = 0; i < nodes; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::vector<int> order;
  order.reserve(nodes);
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    int node = *it;
    ready.erase(it);
    order.push_back(node);
    for (int w : out[node]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  if (static_cast<int>(order.size()) != nodes) order.clear();
  return order;
}

// Number of spanning trees by the matrix-tree theorem: determinant of the
// Laplacian with one row and column removed. Parallel edges count separately.
inline double spanning_tree_count(int nodes, const std::vector<Edge>& edges) {
  if (nodes <= 1) return 1.0;
  const int m = nodes - 1;
  std::vector<std::vector<double>> lap(m, std::vector<double>(m, 0.0));
  for (const Edge& e : edges) {
    if (e.u < m) lap[e.u][e.u] += 1.0;
    if (e.v < m) lap[e.v][e.v] += 1.0;
    if (e.u < m && e.v < m) {
      lap[e.u][e.v] -= 1.0;
      lap[e.v][e.u] -= 1.0;
    }
  }
  // Gaussian elimination with partial pivoting
  double det = 1.0;
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int row = col + 1; row < m; ++row) {
      if (std::fabs(lap[row][col]) > std::fabs(lap[pivot][col])) pivot = row;
    }
    if (std::fabs(lap[pivot][col]) < 1e-12) return 0.0;
    if (pivot != col) {
      std::swap(lap[pivot], lap[col]);
      det = -det;
    }
    det *= lap[col][col];
    for (int row = col + 1; row < m; ++row) {
      const double factor = lap[row][col] / lap[col][col];
      for (int k = col; k < m; ++k) lap[row][k] -= factor * lap[col][k];
    }
  }
  return std::fabs(det);
}

// Path of tree edges between two nodes, as indices into `edges` restricted to
// `tree` (incidence flags over edges). Plain DFS; the tree is tiny.
inline std::vector<int> tree_path(int nodes, const std::vector<Edge>& edges,
                                  const std::vector<char>& tree, int from, int to) {
  std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (neighbor, edge index)
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!tree[i]) continue;
    adj[edges[i].u].push_back({edges[i].v, static_cast<int>(i)});
    adj[edges[i].v].push_back({edges[i].u, static_cast<int>(i)});
  }
  std::vector<int> parent_edge(nodes, -1), parent_node(nodes, -1);
  std::vector<char> seen(nodes, 0);
  std::vector<int> stack = {from};
  seen[from] = 1;
  while (!stack.empty()) {
    int node = stack.back();
    stack.pop_back();
    if (node == to) break;
    for (auto [nb, ei] : adj[node]) {
      if (!seen[nb]) {
        seen[nb] = 1;
        parent_edge[nb] = ei;
        parent_node[nb] = node;
        stack.push_back(nb);
      }
    }
  }
  std::vector<int> path;
  if (!seen[to]) return path;
  for (int node = to; node != from; node = parent_node[node]) path.push_back(parent_edge[node]);
  return path;
}

}  // namespace lazycg
