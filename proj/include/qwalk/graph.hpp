#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/error.hpp"

namespace qwalk {

using NodeId = std::uint32_t;

struct NodePair {
  NodeId u = 0;
  NodeId v = 0;

  NodePair canonical() const { return u <= v ? *this : NodePair{v, u}; }
  auto operator<=>(const NodePair&) const = default;
};

// Immutable undirected simple graph in CSR form. Rows are sorted, symmetric,
// free of self-loops and duplicates.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Symmetrizes, deduplicates and drops self-loops. Every id must be < node_count.
  static Graph from_edges(std::size_t node_count, std::span<const NodePair> edges) {
    std::vector<NodePair> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& e : edges) {
      if (e.u >= node_count || e.v >= node_count) {
        throw Error("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                    ") references a node outside [0," + std::to_string(node_count) + ")");
      }
      if (e.u == e.v) continue;
      directed.push_back(e);
      directed.push_back({e.v, e.u});
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.offsets_.assign(node_count + 1, 0);
    g.degrees_.assign(node_count, 0);
    g.neighbors_.reserve(directed.size());
    for (const auto& e : directed) {
      ++g.degrees_[e.u];
      g.neighbors_.push_back(e.v);
    }
    for (std::size_t i = 0; i < node_count; ++i) {
      g.offsets_[i + 1] = g.offsets_[i] + g.degrees_[i];
    }
    return g;
  }

  // Adopts raw CSR arrays after checking every structural invariant.
  static Graph from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> neighbors) {
    if (offsets.empty() || offsets.front() != 0 || offsets.back() != neighbors.size()) {
      throw FormatError("CSR offsets are inconsistent with the neighbor array");
    }
    const std::size_t n = offsets.size() - 1;
    Graph g;
    g.offsets_ = std::move(offsets);
    g.neighbors_ = std::move(neighbors);
    g.degrees_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (g.offsets_[i + 1] < g.offsets_[i]) throw FormatError("CSR offsets decrease");
      g.degrees_[i] = static_cast<std::uint32_t>(g.offsets_[i + 1] - g.offsets_[i]);
      auto row = g.neighbors(static_cast<NodeId>(i));
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] >= n) throw FormatError("neighbor id out of range");
        if (row[k] == i) throw FormatError("self-loop in CSR row " + std::to_string(i));
        if (k > 0 && row[k - 1] >= row[k]) throw FormatError("CSR row not strictly sorted");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (NodeId v : g.neighbors(static_cast<NodeId>(i))) {
        if (!g.has_edge(v, static_cast<NodeId>(i))) throw FormatError("CSR adjacency not symmetric");
      }
    }
    return g;
  }

  std::size_t node_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  std::size_t entry_count() const { return neighbors_.size(); }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }
  std::uint32_t degree(NodeId u) const { return degrees_[u]; }

  bool has_edge(NodeId u, NodeId v) const {
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& neighbor_array() const { return neighbors_; }
  const std::vector<std::uint32_t>& degrees() const { return degrees_; }

  double mean_degree() const {
    return node_count() == 0 ? 0.0 : static_cast<double>(entry_count()) / static_cast<double>(node_count());
  }

  // Undirected edges with u < v, in CSR order.
  std::vector<NodePair> edges() const {
    std::vector<NodePair> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  bool operator==(const Graph& other) const {
    return offsets_ == other.offsets_ && neighbors_ == other.neighbors_;
  }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<std::uint32_t> degrees_;
};

struct SplitSet {
  std::vector<NodePair> train;
  std::vector<NodePair> valid;
  std::vector<NodePair> test;

  // Throws on out-of-range ids, self-pairs, or overlap between the three lists.
  void validate(std::size_t node_count) const {
    std::vector<std::pair<NodePair, int>> all;
    int which = 0;
    for (const auto* list : {&train, &valid, &test}) {
      for (const auto& p : *list) {
        if (p.u >= node_count || p.v >= node_count) {
          throw Error("split pair (" + std::to_string(p.u) + "," + std::to_string(p.v) +
                      ") out of range for " + std::to_string(node_count) + " nodes");
        }
        if (p.u == p.v) throw Error("split contains a self-pair on node " + std::to_string(p.u));
        all.emplace_back(p.canonical(), which);
      }
      ++which;
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i) {
      if (all[i].first == all[i - 1].first && all[i].second != all[i - 1].second) {
        throw Error("pair (" + std::to_string(all[i].first.u) + "," + std::to_string(all[i].first.v) +
                    ") appears in more than one split");
      }
    }
  }
};

inline Graph merge_validation_edges(const Graph& graph, const SplitSet& splits) {
  auto edges = graph.edges();
  edges.insert(edges.end(), splits.valid.begin(), splits.valid.end());
  return Graph::from_edges(graph.node_count(), edges);
}

// Train ∪ valid ∪ test over the given node count.
inline Graph full_graph(std::size_t node_count, const SplitSet& splits) {
  std::vector<NodePair> edges;
  edges.reserve(splits.train.size() + splits.valid.size() + splits.test.size());
  for (const auto* list : {&splits.train, &splits.valid, &splits.test}) {
    edges.insert(edges.end(), list->begin(), list->end());
  }
  return Graph::from_edges(node_count, edges);
}

// Shuffles the undirected edge list with a seeded engine and cuts it by fraction.
inline SplitSet random_split(const Graph& graph, double train_fraction, double valid_fraction,
                             std::uint64_t seed) {
  if (train_fraction < 0 || valid_fraction < 0 || train_fraction + valid_fraction > 1.0) {
    throw Error("split fractions must be non-negative and sum to at most 1");
  }
  auto edges = graph.edges();
  std::mt19937_64 rng(seed);
  std::shuffle(edges.begin(), edges.end(), rng);
  const auto m = edges.size();
  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(m) + 0.5);
  const auto n_valid = std::min(m - n_train, static_cast<std::size_t>(valid_fraction * static_cast<double>(m) + 0.5));
  SplitSet s;
  s.train.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train),
                 edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), edges.end());
  return s;
}

}  // namespace qwalk
