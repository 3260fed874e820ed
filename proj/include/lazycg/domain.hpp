#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lazycg/core.hpp"
#include "lazycg/graph.hpp"

namespace lazycg {

/// Extreme point of a feasible region. `is_integral` promises every
/// coordinate is exactly 0.0 or 1.0.
struct Vertex {
  Vector coords;
  bool is_integral = false;
};

inline bool same_vertex(const Vertex& a, const Vertex& b) { return a.coords == b.coords; }

enum class DomainKind {
  ProbabilitySimplex,
  Hypercube,
  ShortestPathPolytope,
  SpanningTreePolytope,
  VertexList,
};

// Coordinates above this threshold count as support everywhere in this
// library (restricted oracles, away steps, sparsity counts).
inline constexpr double kSupportEps = 1e-12;

inline std::vector<char> support_mask(const Vector& x, double eps = kSupportEps) {
  std::vector<char> mask(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) mask[i] = std::fabs(x[i]) > eps ? 1 : 0;
  return mask;
}

inline bool support_contained_in(const Vector& v, const std::vector<char>& mask) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i]) > kSupportEps && !mask[i]) return false;
  }
  return true;
}

/// Feasible region for the solvers: a polytope given by one of a fixed set of
/// structured kinds, with linear minimization, support-restricted linear
/// maximization, single-move augmentation, and bounded vertex enumeration.
///
/// All operations are deterministic. Ties are broken per kind:
/// the simplex and vertex lists prefer the lowest index, the hypercube
/// prefers 0 over 1 per coordinate, the graph kinds inherit determinism from
/// a fixed edge processing order.
class Domain {
 public:
  static constexpr double kEnumerationCap = 1e6;

  /// Unit simplex in R^n: vertices are the n standard basis vectors.
  static Domain simplex(int n) {
    require(n >= 1, "simplex: n must be >= 1");
    Domain d;
    d.kind_ = DomainKind::ProbabilitySimplex;
    d.n_ = n;
    d.l2_diameter_ = std::sqrt(2.0);
    d.l1_diameter_ = 2.0;
    d.max_vertex_norm2_ = 1.0;
    d.mu_ = 1.0;  // the simplex satisfies the local decomposition with mu = 1
    d.zero_one_ = true;
    return d;
  }

  /// Unit hypercube [0,1]^n.
  static Domain hypercube(int n) {
    require(n >= 1, "hypercube: n must be >= 1");
    Domain d;
    d.kind_ = DomainKind::Hypercube;
    d.n_ = n;
    d.l2_diameter_ = std::sqrt(static_cast<double>(n));
    d.l1_diameter_ = static_cast<double>(n);
    d.max_vertex_norm2_ = std::sqrt(static_cast<double>(n));
    d.zero_one_ = true;
    return d;
  }

  /// Convex hull of edge-incidence vectors of source-sink paths in a DAG.
  /// Coordinates are indexed by arcs. Arc costs may be negative.
  static Domain shortest_path(int nodes, std::vector<Edge> arcs, int source, int sink) {
    require(nodes >= 2, "shortest_path: need at least two nodes");
    require(source != sink, "shortest_path: source and sink must differ");
    require(source >= 0 && source < nodes && sink >= 0 && sink < nodes,
            "shortest_path: source or sink out of range");
    require(!arcs.empty(), "shortest_path: arc list is empty");
    for (const Edge& e : arcs) {
      require(e.u >= 0 && e.u < nodes && e.v >= 0 && e.v < nodes,
              "shortest_path: arc endpoint out of range");
      require(e.u != e.v, "shortest_path: self-loops are not allowed");
    }
    Domain d;
    d.kind_ = DomainKind::ShortestPathPolytope;
    d.n_ = static_cast<int>(arcs.size());
    d.nodes_ = nodes;
    d.edges_ = std::move(arcs);
    d.source_ = source;
    d.sink_ = sink;
    d.topo_ = topological_order(nodes, d.edges_);
    require(!d.topo_.empty(), "shortest_path: the arc set has a directed cycle");
    // longest path by edge count bounds every vertex's support size
    const double longest = d.path_extremum_length();
    require(longest >= 0.0, "shortest_path: sink is unreachable from source");
    d.l2_diameter_ = std::sqrt(2.0 * longest);
    d.l1_diameter_ = 2.0 * longest;
    d.max_vertex_norm2_ = std::sqrt(longest);
    d.zero_one_ = true;
    return d;
  }

  /// Convex hull of edge-incidence vectors of spanning trees of a connected
  /// undirected graph. Coordinates are indexed by edges.
  static Domain spanning_tree(int nodes, std::vector<Edge> edges) {
    require(nodes >= 2, "spanning_tree: need at least two nodes");
    require(!edges.empty(), "spanning_tree: edge list is empty");
    for (const Edge& e : edges) {
      require(e.u >= 0 && e.u < nodes && e.v >= 0 && e.v < nodes,
              "spanning_tree: edge endpoint out of range");
      require(e.u != e.v, "spanning_tree: self-loops are not allowed");
    }
    UnionFind uf(nodes);
    int components = nodes;
    for (const Edge& e : edges) {
      if (uf.unite(e.u, e.v)) --components;
    }
    require(components == 1, "spanning_tree: the graph is not connected");
    Domain d;
    d.kind_ = DomainKind::SpanningTreePolytope;
    d.n_ = static_cast<int>(edges.size());
    d.nodes_ = nodes;
    d.edges_ = std::move(edges);
    const double tree_edges = static_cast<double>(nodes - 1);
    d.l2_diameter_ = std::sqrt(2.0 * tree_edges);
    d.l1_diameter_ = 2.0 * tree_edges;
    d.max_vertex_norm2_ = std::sqrt(tree_edges);
    d.zero_one_ = true;
    return d;
  }

  /// Convex hull of an explicit list of points.
  static Domain vertex_list(std::vector<Vertex> vertices) {
    require(!vertices.empty(), "vertex_list: vertex list is empty");
    const std::size_t n = vertices[0].coords.size();
    require(n >= 1, "vertex_list: vertices must have at least one coordinate");
    Domain d;
    d.kind_ = DomainKind::VertexList;
    d.n_ = static_cast<int>(n);
    d.zero_one_ = true;
    for (Vertex& v : vertices) {
      require(v.coords.size() == n, "vertex_list: inconsistent vertex dimensions");
      require(all_finite(v.coords), "vertex_list: vertex has non-finite coordinates");
      bool integral = true;
      for (double c : v.coords) {
        if (c != 0.0 && c != 1.0) integral = false;
      }
      v.is_integral = integral;
      if (!integral) d.zero_one_ = false;
    }
    d.vertices_ = std::move(vertices);
    // exact diameters; vertex lists are small enough for the pairwise scan
    double d2 = 0.0, d1 = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < d.vertices_.size(); ++i) {
      mx = std::max(mx, norm2(d.vertices_[i].coords));
      for (std::size_t j = i + 1; j < d.vertices_.size(); ++j) {
        const Vector diff = subtract(d.vertices_[i].coords, d.vertices_[j].coords);
        d2 = std::max(d2, norm2(diff));
        d1 = std::max(d1, norm1(diff));
      }
    }
    d.l2_diameter_ = d2;
    d.l1_diameter_ = d1;
    d.max_vertex_norm2_ = mx;
    return d;
  }

  DomainKind kind() const { return kind_; }
  int dimension() const { return n_; }
  double l2_diameter() const { return l2_diameter_; }
  double l1_diameter() const { return l1_diameter_; }
  // largest l2 norm over vertices; bounds ||x|| over the whole hull
  double max_vertex_norm2() const { return max_vertex_norm2_; }
  bool is_zero_one() const { return zero_one_; }

  bool has_mu() const { return mu_.has_value(); }
  double mu() const {
    if (!mu_) throw InputError("domain: locality parameter mu is not set");
    return *mu_;
  }
  void set_mu(double mu) {
    require(std::isfinite(mu) && mu >= 1.0, "domain: mu must be finite and >= 1");
    mu_ = mu;
  }

  /// argmin_v c.v over vertices. Deterministic under the per-kind tie rule.
  Vertex lmo(const Vector& c) const {
    check_objective(c);
    switch (kind_) {
      case DomainKind::ProbabilitySimplex: {
        std::size_t best = 0;
        for (std::size_t i = 1; i < c.size(); ++i) {
          if (c[i] < c[best]) best = i;
        }
        return unit_vertex(best);
      }
      case DomainKind::Hypercube: {
        Vertex v{Vector(n_, 0.0), true};
        for (int i = 0; i < n_; ++i) {
          if (c[i] < 0.0) v.coords[i] = 1.0;
        }
        return v;
      }
      case DomainKind::ShortestPathPolytope: {
        auto v = path_extremum(c, nullptr, /*maximize=*/false);
        if (!v) throw InvariantError("shortest_path: sink unreachable despite validation");
        return *v;
      }
      case DomainKind::SpanningTreePolytope: {
        auto v = kruskal(c, nullptr, /*maximize=*/false);
        if (!v) throw InvariantError("spanning_tree: graph disconnected despite validation");
        return *v;
      }
      case DomainKind::VertexList: {
        std::size_t best = 0;
        double best_score = dot(c, vertices_[0].coords);
        for (std::size_t i = 1; i < vertices_.size(); ++i) {
          const double s = dot(c, vertices_[i].coords);
          if (s < best_score) {
            best = i;
            best_score = s;
          }
        }
        return vertices_[best];
      }
    }
    throw InvariantError("lmo: unknown domain kind");
  }

  /// argmax_v c.v over vertices whose support is contained in `support`
  /// (a mask of length dimension()). Empty optional when no vertex fits,
  /// which is a legitimate outcome rather than an error.
  std::optional<Vertex> lmo_restricted(const Vector& c, const std::vector<char>& support) const {
    check_objective(c);
    require(support.size() == static_cast<std::size_t>(n_),
            "lmo_restricted: support mask has wrong length");
    switch (kind_) {
      case DomainKind::ProbabilitySimplex: {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (!support[i]) continue;
          if (!best || c[i] > c[*best]) best = i;
        }
        if (!best) return std::nullopt;
        return unit_vertex(*best);
      }
      case DomainKind::Hypercube: {
        Vertex v{Vector(n_, 0.0), true};
        for (int i = 0; i < n_; ++i) {
          if (support[i] && c[i] > 0.0) v.coords[i] = 1.0;
        }
        return v;
      }
      case DomainKind::ShortestPathPolytope:
        return path_extremum(c, &support, /*maximize=*/true);
      case DomainKind::SpanningTreePolytope:
        return kruskal(c, &support, /*maximize=*/true);
      case DomainKind::VertexList: {
        std::optional<std::size_t> best;
        double best_score = 0.0;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
          if (!support_contained_in(vertices_[i].coords, support)) continue;
          const double s = dot(c, vertices_[i].coords);
          if (!best || s > best_score) {
            best = i;
            best_score = s;
          }
        }
        if (!best) return std::nullopt;
        return vertices_[*best];
      }
    }
    throw InvariantError("lmo_restricted: unknown domain kind");
  }

  /// Single local move: a vertex strictly cheaper than `x` under `c` when the
  /// kind admits one, otherwise `x` itself. `x` itself is returned exactly
  /// when `x` minimizes c over the vertex set.
  ///
  /// Moves per kind: the hypercube flips the improving coordinate with the
  /// largest |c_i| (lowest index on ties); the spanning tree polytope applies
  /// the best single edge exchange; the simplex, path polytope, and 0/1
  /// vertex lists move to the best vertex outright.
  Vertex augment(const Vector& c, const Vertex& x) const {
    check_objective(c);
    if (!zero_one_) throw InputError("augment: only 0/1 domains are supported");
    require(x.coords.size() == static_cast<std::size_t>(n_), "augment: point has wrong dimension");
    check_is_vertex(x);
    switch (kind_) {
      case DomainKind::Hypercube: {
        int best = -1;
        double best_abs = 0.0;
        for (int i = 0; i < n_; ++i) {
          const bool improving = (x.coords[i] == 1.0 && c[i] > 0.0) || (x.coords[i] == 0.0 && c[i] < 0.0);
          if (improving && std::fabs(c[i]) > best_abs) {
            best = i;
            best_abs = std::fabs(c[i]);
          }
        }
        if (best < 0) return x;
        Vertex y = x;
        y.coords[best] = 1.0 - y.coords[best];
        return y;
      }
      case DomainKind::SpanningTreePolytope: {
        std::vector<char> in_tree(n_, 0);
        for (int i = 0; i < n_; ++i) in_tree[i] = x.coords[i] == 1.0 ? 1 : 0;
        int best_out = -1, best_in = -1;
        double best_gain = 0.0;
        for (int out = 0; out < n_; ++out) {
          if (in_tree[out]) continue;
          std::vector<int> cycle = tree_path(nodes_, edges_, in_tree, edges_[out].u, edges_[out].v);
          std::sort(cycle.begin(), cycle.end());
          for (int in : cycle) {
            const double gain = c[in] - c[out];
            if (gain > best_gain) {
              best_gain = gain;
              best_out = out;
              best_in = in;
            }
          }
        }
        if (best_out < 0) return x;
        Vertex y = x;
        y.coords[best_out] = 1.0;
        y.coords[best_in] = 0.0;
        return y;
      }
      case DomainKind::ProbabilitySimplex:
      case DomainKind::ShortestPathPolytope:
      case DomainKind::VertexList: {
        const Vertex v = lmo(c);
        return dot(c, v.coords) < dot(c, x.coords) ? v : x;
      }
    }
    throw InvariantError("augment: unknown domain kind");
  }

  /// Exact vertex count (may be an estimate computed in floating point for
  /// the graph kinds, exact for all sizes this library enumerates).
  double vertex_count_estimate() const {
    switch (kind_) {
      case DomainKind::ProbabilitySimplex:
        return static_cast<double>(n_);
      case DomainKind::Hypercube:
        return std::ldexp(1.0, n_);
      case DomainKind::ShortestPathPolytope:
        return path_count();
      case DomainKind::SpanningTreePolytope:
        return spanning_tree_count(nodes_, edges_);
      case DomainKind::VertexList:
        return static_cast<double>(vertices_.size());
    }
    throw InvariantError("vertex_count_estimate: unknown domain kind");
  }

  /// All vertices in a deterministic order. Refuses when the count exceeds
  /// kEnumerationCap; the exception message carries the estimate.
  std::vector<Vertex> enumerate_vertices() const {
    const double estimate = vertex_count_estimate();
    if (!(estimate <= kEnumerationCap)) {
      std::ostringstream msg;
      msg << "enumerate_vertices: estimated " << estimate << " vertices exceeds the cap of "
          << static_cast<long long>(kEnumerationCap);
      throw InputError(msg.str());
    }
    std::vector<Vertex> out;
    switch (kind_) {
      case DomainKind::ProbabilitySimplex:
        for (int i = 0; i < n_; ++i) out.push_back(unit_vertex(i));
        return out;
      case DomainKind::Hypercube:
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n_); ++idx) {
          Vertex v{Vector(n_, 0.0), true};
          for (int i = 0; i < n_; ++i) {
            if (idx & (std::uint64_t{1} << i)) v.coords[i] = 1.0;
          }
          out.push_back(std::move(v));
        }
        return out;
      case DomainKind::ShortestPathPolytope: {
        std::vector<int> chosen;
        enumerate_paths(source_, chosen, out);
        return out;
      }
      case DomainKind::SpanningTreePolytope: {
        std::vector<int> chosen;
        UnionFind uf(nodes_);
        enumerate_trees(0, chosen, uf, out);
        return out;
      }
      case DomainKind::VertexList:
        return vertices_;
    }
    throw InvariantError("enumerate_vertices: unknown domain kind");
  }

  /// Deterministic vertex used as the default start point: the minimizer of
  /// the all-zero objective under the tie rules.
  Vertex canonical_vertex() const { return lmo(Vector(n_, 0.0)); }

 private:
  Domain() = default;

  static void require(bool ok, const char* msg) {
    if (!ok) throw InputError(msg);
  }

  void check_objective(const Vector& c) const {
    require(c.size() == static_cast<std::size_t>(n_), "domain: objective has wrong dimension");
    require(all_finite(c), "domain: objective has non-finite entries");
  }

  Vertex unit_vertex(std::size_t i) const {
    Vertex v{Vector(n_, 0.0), true};
    v.coords[i] = 1.0;
    return v;
  }

  void check_is_vertex(const Vertex& x) const {
    switch (kind_) {
      case DomainKind::Hypercube:
        for (double v : x.coords) require(v == 0.0 || v == 1.0, "augment: point is not a hypercube vertex");
        return;
      case DomainKind::ProbabilitySimplex: {
        int ones = 0;
        for (double v : x.coords) {
          require(v == 0.0 || v == 1.0, "augment: point is not a simplex vertex");
          if (v == 1.0) ++ones;
        }
        require(ones == 1, "augment: point is not a simplex vertex");
        return;
      }
      case DomainKind::SpanningTreePolytope: {
        int count = 0;
        UnionFind uf(nodes_);
        for (int i = 0; i < n_; ++i) {
          require(x.coords[i] == 0.0 || x.coords[i] == 1.0, "augment: point is not a tree vertex");
          if (x.coords[i] == 1.0) {
            ++count;
            require(uf.unite(edges_[i].u, edges_[i].v), "augment: selected edges contain a cycle");
          }
        }
        require(count == nodes_ - 1, "augment: selected edges do not form a spanning tree");
        return;
      }
      case DomainKind::ShortestPathPolytope: {
        int selected = 0;
        for (double v : x.coords) {
          require(v == 0.0 || v == 1.0, "augment: point is not a path vertex");
          if (v == 1.0) ++selected;
        }
        int cur = source_, steps = 0;
        while (cur != sink_ && steps <= selected) {
          int next = -1;
          for (int i = 0; i < n_; ++i) {
            if (x.coords[i] == 1.0 && edges_[i].u == cur) {
              require(next < 0, "augment: selected arcs branch at a node");
              next = edges_[i].v;
            }
          }
          require(next >= 0, "augment: selected arcs do not reach the sink");
          cur = next;
          ++steps;
        }
        require(cur == sink_ && steps == selected, "augment: selected arcs are not a source-sink path");
        return;
      }
      case DomainKind::VertexList:
        for (const Vertex& v : vertices_) {
          if (same_vertex(v, x)) return;
        }
        throw InputError("augment: point is not in the vertex list");
    }
  }

  // Shortest or longest source-sink path by total arc cost; nullptr support
  // means all arcs are allowed. Nodes are relaxed in topological order, so
  // negative costs are fine and ties keep the earliest arc.
  std::optional<Vertex> path_extremum(const Vector& c, const std::vector<char>* support,
                                      bool maximize) const {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nodes_, maximize ? -inf : inf);
    std::vector<int> pred(nodes_, -1);
    dist[source_] = 0.0;
    std::vector<std::vector<int>> out(nodes_);
    for (int i = 0; i < n_; ++i) {
      if (support && !(*support)[i]) continue;
      out[edges_[i].u].push_back(i);
    }
    for (int node : topo_) {
      if (!std::isfinite(dist[node])) continue;
      for (int i : out[node]) {
        const double cand = dist[node] + c[i];
        const bool better = maximize ? cand > dist[edges_[i].v] : cand < dist[edges_[i].v];
        if (better) {
          dist[edges_[i].v] = cand;
          pred[edges_[i].v] = i;
        }
      }
    }
    if (!std::isfinite(dist[sink_])) return std::nullopt;
    Vertex v{Vector(n_, 0.0), true};
    for (int node = sink_; node != source_;) {
      const int i = pred[node];
      v.coords[i] = 1.0;
      node = edges_[i].u;
    }
    return v;
  }

  // Longest path from source to sink by edge count, -1 if unreachable.
  double path_extremum_length() const {
    Vector ones(n_, 1.0);
    auto v = path_extremum(ones, nullptr, /*maximize=*/true);
    if (!v) return -1.0;
    double len = 0.0;
    for (double e : v->coords) len += e;
    return len;
  }

  double path_count() const {
    std::vector<double> count(nodes_, 0.0);
    count[source_] = 1.0;
    for (int node : topo_) {
      if (count[node] == 0.0) continue;
      for (int i = 0; i < n_; ++i) {
        if (edges_[i].u == node) count[edges_[i].v] += count[node];
      }
    }
    return count[sink_];
  }

  // Kruskal over the allowed edges; cost order is ascending for minimization,
  // descending for maximization, with the edge index breaking ties either way.
  std::optional<Vertex> kruskal(const Vector& c, const std::vector<char>* support,
                                bool maximize) const {
    std::vector<int> order;
    order.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      if (support && !(*support)[i]) continue;
      order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (c[a] != c[b]) return maximize ? c[a] > c[b] : c[a] < c[b];
      return a < b;
    });
    UnionFind uf(nodes_);
    Vertex v{Vector(n_, 0.0), true};
    int picked = 0;
    for (int i : order) {
      if (uf.unite(edges_[i].u, edges_[i].v)) {
        v.coords[i] = 1.0;
        if (++picked == nodes_ - 1) return v;
      }
    }
    return std::nullopt;
  }

  void enumerate_paths(int node, std::vector<int>& chosen, std::vector<Vertex>& out) const {
    if (node == sink_) {
      Vertex v{Vector(n_, 0.0), true};
      for (int i : chosen) v.coords[i] = 1.0;
      out.push_back(std::move(v));
      return;
    }
    for (int i = 0; i < n_; ++i) {
      if (edges_[i].u != node) continue;
      chosen.push_back(i);
      enumerate_paths(edges_[i].v, chosen, out);
      chosen.pop_back();
    }
  }

  void enumerate_trees(int next_edge, std::vector<int>& chosen, UnionFind& uf,
                       std::vector<Vertex>& out) const {
    if (static_cast<int>(chosen.size()) == nodes_ - 1) {
      Vertex v{Vector(n_, 0.0), true};
      for (int i : chosen) v.coords[i] = 1.0;
      out.push_back(std::move(v));
      return;
    }
    if (next_edge >= n_) return;
    if (n_ - next_edge < nodes_ - 1 - static_cast<int>(chosen.size())) return;
    // take next_edge if it joins two components
    UnionFind with = uf;
    if (with.unite(edges_[next_edge].u, edges_[next_edge].v)) {
      chosen.push_back(next_edge);
      enumerate_trees(next_edge + 1, chosen, with, out);
      chosen.pop_back();
    }
    enumerate_trees(next_edge + 1, chosen, uf, out);
  }

  DomainKind kind_ = DomainKind::VertexList;
  int n_ = 0;
  double l2_diameter_ = 0.0;
  double l1_diameter_ = 0.0;
  double max_vertex_norm2_ = 0.0;
  std::optional<double> mu_;
  bool zero_one_ = false;

  // graph kinds
  int nodes_ = 0;
  std::vector<Edge> edges_;
  int source_ = 0;
  int sink_ = 0;
  std::vector<int> topo_;

  // vertex list kind
  std::vector<Vertex> vertices_;
};

}  // namespace lazycg
