#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qwalk/graph.hpp"

// Small named graph families used by verification runs and tests.
namespace qwalk::catalog {

struct NamedGraph {
  std::string name;
  Graph graph;
};

inline Graph path(std::size_t n) {
  std::vector<NodePair> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph::from_edges(n, e);
}

inline Graph cycle(std::size_t n) {
  std::vector<NodePair> e;
  for (NodeId i = 0; i < n; ++i) e.push_back({i, static_cast<NodeId>((i + 1) % n)});
  return Graph::from_edges(n, e);
}

// Node 0 is the center.
inline Graph star(std::size_t n) {
  std::vector<NodePair> e;
  for (NodeId i = 1; i < n; ++i) e.push_back({0, i});
  return Graph::from_edges(n, e);
}

inline Graph complete(std::size_t n) {
  std::vector<NodePair> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph::from_edges(n, e);
}

inline Graph complete_bipartite(std::size_t a, std::size_t b) {
  std::vector<NodePair> e;
  for (NodeId i = 0; i < a; ++i)
    for (NodeId j = 0; j < b; ++j) e.push_back({i, static_cast<NodeId>(a + j)});
  return Graph::from_edges(a + b, e);
}

// Two K_m joined by one bridge edge (m-1, m).
inline Graph barbell(std::size_t m) {
  std::vector<NodePair> e;
  for (NodeId side = 0; side < 2; ++side) {
    const auto base = static_cast<NodeId>(side * m);
    for (NodeId i = 0; i < m; ++i)
      for (NodeId j = i + 1; j < m; ++j) e.push_back({base + i, base + j});
  }
  e.push_back({static_cast<NodeId>(m - 1), static_cast<NodeId>(m)});
  return Graph::from_edges(2 * m, e);
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  auto e = a.edges();
  const auto shift = static_cast<NodeId>(a.node_count());
  for (auto p : b.edges()) e.push_back({p.u + shift, p.v + shift});
  return Graph::from_edges(a.node_count() + b.node_count(), e);
}

// Circulant graph: i ~ i +- s (mod n) for each step s. Regular.
inline Graph circulant(std::size_t n, const std::vector<std::size_t>& steps) {
  std::vector<NodePair> e;
  for (NodeId i = 0; i < n; ++i)
    for (auto s : steps) e.push_back({i, static_cast<NodeId>((i + s) % n)});
  return Graph::from_edges(n, e);
}

inline Graph hypercube(unsigned dim) {
  const std::size_t n = std::size_t{1} << dim;
  std::vector<NodePair> e;
  for (NodeId i = 0; i < n; ++i)
    for (unsigned b = 0; b < dim; ++b) {
      NodeId j = i ^ (NodeId{1} << b);
      if (i < j) e.push_back({i, j});
    }
  return Graph::from_edges(n, e);
}

inline Graph petersen() {
  std::vector<NodePair> e;
  for (NodeId i = 0; i < 5; ++i) {
    e.push_back({i, (i + 1) % 5});
    e.push_back({i, i + 5});
    e.push_back({i + 5, (i + 2) % 5 + 5});
  }
  return Graph::from_edges(10, e);
}

// G(n, p) with a seeded engine.
inline Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<NodePair> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) e.push_back({i, j});
  return Graph::from_edges(n, e);
}

// Every graph family on 2..max_nodes nodes: path, cycle, star, complete,
// complete bipartite, barbell, and two-component unions.
inline std::vector<NamedGraph> small_catalog(std::size_t max_nodes = 6) {
  std::vector<NamedGraph> out;
  for (std::size_t n = 2; n <= max_nodes; ++n) {
    out.push_back({"path-" + std::to_string(n), path(n)});
    if (n >= 3) out.push_back({"cycle-" + std::to_string(n), cycle(n)});
    if (n >= 4) out.push_back({"star-" + std::to_string(n), star(n)});
    out.push_back({"complete-" + std::to_string(n), complete(n)});
    for (std::size_t a = 1; a <= n / 2; ++a) {
      if (a == 1 && n - a <= 2) continue;  // already covered by paths
      out.push_back({"bipartite-" + std::to_string(a) + "x" + std::to_string(n - a), complete_bipartite(a, n - a)});
    }
    if (n % 2 == 0 && n >= 4) out.push_back({"barbell-" + std::to_string(n / 2), barbell(n / 2)});
  }
  out.push_back({"two-triangles", disjoint_union(complete(3), complete(3))});
  out.push_back({"edge-plus-isolated", Graph::from_edges(3, std::vector<NodePair>{{0, 1}})});
  return out;
}

}  // namespace qwalk::catalog
