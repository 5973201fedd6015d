#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

namespace detail {

// Calls f(k) for every common neighbor k of j and t.
template <typename F>
void for_each_common_neighbor(const Graph& g, NodeId j, NodeId t, F&& f) {
  auto a = g.neighbors(j);
  auto b = g.neighbors(t);
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x] < b[y]) {
      ++x;
    } else if (b[y] < a[x]) {
      ++y;
    } else {
      f(a[x]);
      ++x;
      ++y;
    }
  }
}

inline void check_ids(const Graph& g, NodeId j, NodeId t) {
  if (j >= g.node_count() || t >= g.node_count()) throw Error("node id out of range");
}

}  // namespace detail

inline double cn_score(const Graph& g, NodeId j, NodeId t) {
  detail::check_ids(g, j, t);
  std::size_t count = 0;
  detail::for_each_common_neighbor(g, j, t, [&](NodeId) { ++count; });
  return static_cast<double>(count);
}

// Natural log; common neighbors of degree < 2 are skipped.
inline double aa_score(const Graph& g, NodeId j, NodeId t) {
  detail::check_ids(g, j, t);
  double s = 0.0;
  detail::for_each_common_neighbor(g, j, t, [&](NodeId k) {
    if (g.degree(k) >= 2) s += 1.0 / std::log(static_cast<double>(g.degree(k)));
  });
  return s;
}

inline double ra_score(const Graph& g, NodeId j, NodeId t) {
  detail::check_ids(g, j, t);
  double s = 0.0;
  detail::for_each_common_neighbor(g, j, t, [&](NodeId k) { s += 1.0 / static_cast<double>(g.degree(k)); });
  return s;
}

// Walk counts A^l e_j for l = 1..max_len, by repeated sparse products.
inline std::vector<std::vector<double>> katz_walks(const Graph& g, NodeId j, int max_len) {
  std::vector<std::vector<double>> walks;
  std::vector<double> x(g.node_count(), 0.0), y(g.node_count());
  x[j] = 1.0;
  for (int l = 1; l <= max_len; ++l) {
    for (NodeId u = 0; u < g.node_count(); ++u) {
      double acc = 0.0;
      for (NodeId v : g.neighbors(u)) acc += x[v];
      y[u] = acc;
    }
    walks.push_back(y);
    std::swap(x, y);
  }
  return walks;
}

namespace detail {

inline void check_katz(double beta, int max_len) {
  if (!(beta > 0.0)) throw Error("katz beta must be > 0");
  if (max_len < 1) throw Error("katz max_len must be >= 1");
}

}  // namespace detail

// sum_{l=1}^{max_len} beta^l (A^l)_{j,t}
inline double katz_score(const Graph& g, NodeId j, NodeId t, double beta, int max_len) {
  detail::check_ids(g, j, t);
  detail::check_katz(beta, max_len);
  auto walks = katz_walks(g, j, max_len);
  double s = 0.0, weight = 1.0;
  for (int l = 1; l <= max_len; ++l) {
    weight *= beta;
    s += weight * walks[static_cast<std::size_t>(l - 1)][t];
    if (!std::isfinite(s)) throw NumericalError("katz accumulation is not finite; beta too large");
  }
  return s;
}

// BFS hop distances from `source`, optionally ignoring one undirected edge.
// Unreached nodes get UINT32_MAX; the search stops once `stop_at` is settled.
inline std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source, NodeId skip_u = UINT32_MAX,
                                                NodeId skip_v = UINT32_MAX, NodeId stop_at = UINT32_MAX) {
  std::vector<std::uint32_t> dist(g.node_count(), UINT32_MAX);
  std::vector<NodeId> frontier{source}, next;
  dist[source] = 0;
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (NodeId u : frontier) {
      for (NodeId v : g.neighbors(u)) {
        if (dist[v] != UINT32_MAX) continue;
        if ((u == skip_u && v == skip_v) || (u == skip_v && v == skip_u)) continue;
        dist[v] = level;
        if (v == stop_at) return dist;
        next.push_back(v);
      }
    }
    std::swap(frontier, next);
  }
  return dist;
}

// 1 / BFS distance with the edge (j,t) itself removed; 0 when unreachable.
inline double shortest_path_score(const Graph& g, NodeId j, NodeId t) {
  detail::check_ids(g, j, t);
  if (j == t) return 0.0;
  auto dist = bfs_distances(g, j, j, t, t);
  return dist[t] == UINT32_MAX ? 0.0 : 1.0 / static_cast<double>(dist[t]);
}

struct Heuristic {
  enum class Kind { cn, aa, ra, katz, shortest_path };
  Kind kind = Kind::cn;
  double katz_beta = 0.1;
  int katz_max_len = 5;

  std::string name() const {
    switch (kind) {
      case Kind::cn: return "cn";
      case Kind::aa: return "aa";
      case Kind::ra: return "ra";
      case Kind::katz: return "katz";
      case Kind::shortest_path: return "shortest-path";
    }
    return "?";
  }
};

inline Heuristic parse_heuristic(std::string_view s) {
  Heuristic h;
  if (s == "cn") h.kind = Heuristic::Kind::cn;
  else if (s == "aa") h.kind = Heuristic::Kind::aa;
  else if (s == "ra") h.kind = Heuristic::Kind::ra;
  else if (s == "katz") h.kind = Heuristic::Kind::katz;
  else if (s == "shortest-path" || s == "sp") h.kind = Heuristic::Kind::shortest_path;
  else throw Error("unknown heuristic '" + std::string(s) + "'");
  return h;
}

inline double heuristic_score(const Graph& g, const Heuristic& h, NodeId j, NodeId t) {
  switch (h.kind) {
    case Heuristic::Kind::cn: return cn_score(g, j, t);
    case Heuristic::Kind::aa: return aa_score(g, j, t);
    case Heuristic::Kind::ra: return ra_score(g, j, t);
    case Heuristic::Kind::katz: return katz_score(g, j, t, h.katz_beta, h.katz_max_len);
    case Heuristic::Kind::shortest_path: return shortest_path_score(g, j, t);
  }
  return 0.0;
}

// Batch form. Katz and shortest path share one traversal per distinct source.
inline std::vector<double> heuristic_batch(const Graph& g, const Heuristic& h, std::span<const NodePair> pairs,
                                           unsigned threads = 1) {
  for (const auto& p : pairs) detail::check_ids(g, p.u, p.v);
  std::vector<double> scores(pairs.size());
  const bool per_source = h.kind == Heuristic::Kind::katz || h.kind == Heuristic::Kind::shortest_path;
  if (!per_source) {
    parallel_for(pairs.size(), threads, [&](std::size_t i) { scores[i] = heuristic_score(g, h, pairs[i].u, pairs[i].v); }, 256);
    return scores;
  }
  if (h.kind == Heuristic::Kind::katz) detail::check_katz(h.katz_beta, h.katz_max_len);

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].u < pairs[b].u; });
  std::vector<std::size_t> group_begin;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || pairs[order[i]].u != pairs[order[i - 1]].u) group_begin.push_back(i);
  }
  group_begin.push_back(order.size());

  parallel_for(group_begin.size() - 1, threads, [&](std::size_t grp) {
    const NodeId j = pairs[order[group_begin[grp]]].u;
    if (h.kind == Heuristic::Kind::katz) {
      auto walks = katz_walks(g, j, h.katz_max_len);
      for (std::size_t idx = group_begin[grp]; idx < group_begin[grp + 1]; ++idx) {
        const NodeId t = pairs[order[idx]].v;
        double s = 0.0, weight = 1.0;
        for (int l = 1; l <= h.katz_max_len; ++l) {
          weight *= h.katz_beta;
          s += weight * walks[static_cast<std::size_t>(l - 1)][t];
        }
        if (!std::isfinite(s)) throw NumericalError("katz accumulation is not finite; beta too large");
        scores[order[idx]] = s;
      }
    } else {
      std::vector<std::uint32_t> dist;
      for (std::size_t idx = group_begin[grp]; idx < group_begin[grp + 1]; ++idx) {
        const NodeId t = pairs[order[idx]].v;
        if (g.has_edge(j, t) || j == t) {
          scores[order[idx]] = shortest_path_score(g, j, t);
          continue;
        }
        if (dist.empty()) dist = bfs_distances(g, j);
        scores[order[idx]] = dist[t] == UINT32_MAX ? 0.0 : 1.0 / static_cast<double>(dist[t]);
      }
    }
  }, 1);
  return scores;
}

}  // namespace qwalk
