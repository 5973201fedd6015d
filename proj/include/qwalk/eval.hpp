#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/heuristics.hpp"

namespace qwalk {

inline constexpr std::size_t kAllCorruptions = std::numeric_limits<std::size_t>::max();

struct NegativePolicy {
  enum class Kind { uniform, corruption, hard };
  Kind kind = Kind::corruption;
  // uniform: total shared negatives; corruption: per side; hard: per positive.
  std::size_t count = kAllCorruptions;
  std::uint64_t seed = 0;
  // Weight of normalized CN in the hard-negative mix; the rest goes to shortest path.
  double heuristic_mix = 0.5;
};

inline std::string_view to_string(NegativePolicy::Kind k) {
  switch (k) {
    case NegativePolicy::Kind::uniform: return "uniform";
    case NegativePolicy::Kind::corruption: return "corruption";
    case NegativePolicy::Kind::hard: return "hard";
  }
  return "?";
}

inline NegativePolicy::Kind parse_policy_kind(std::string_view s) {
  if (s == "uniform") return NegativePolicy::Kind::uniform;
  if (s == "corruption") return NegativePolicy::Kind::corruption;
  if (s == "hard") return NegativePolicy::Kind::hard;
  throw Error("unknown negative policy '" + std::string(s) + "'");
}

enum class TiePolicy { average, optimistic, pessimistic };

inline std::string_view to_string(TiePolicy p) {
  switch (p) {
    case TiePolicy::average: return "average";
    case TiePolicy::optimistic: return "optimistic";
    case TiePolicy::pessimistic: return "pessimistic";
  }
  return "?";
}

inline TiePolicy parse_tie_policy(std::string_view s) {
  if (s == "average") return TiePolicy::average;
  if (s == "optimistic") return TiePolicy::optimistic;
  if (s == "pessimistic") return TiePolicy::pessimistic;
  throw Error("unknown tie policy '" + std::string(s) + "'");
}

// Stream-splitting mix (splitmix64 finalizer) for per-query seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// `count` distinct non-edges (a < b) drawn by rejection from uniform node pairs.
inline std::vector<NodePair> sample_uniform_negatives(const Graph& full, std::size_t count, std::uint64_t seed) {
  const std::size_t n = full.node_count();
  const double possible = static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0) / 2.0;
  const double available = possible - static_cast<double>(full.edge_count());
  if (static_cast<double>(count) > available) {
    throw SamplingError("graph has " + std::to_string(static_cast<std::uint64_t>(available)) +
                        " non-edges, cannot draw " + std::to_string(count) + " negatives");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::set<NodePair> seen;
  std::vector<NodePair> out;
  out.reserve(count);
  const std::size_t budget = std::max<std::size_t>(1000, 100 * count);
  for (std::size_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt >= budget) {
      throw SamplingError("retry budget exhausted after " + std::to_string(out.size()) + " of " +
                          std::to_string(count) + " negatives");
    }
    const NodePair p = NodePair{pick(rng), pick(rng)}.canonical();
    if (p.u == p.v || full.has_edge(p.u, p.v) || !seen.insert(p).second) continue;
    out.push_back(p);
  }
  return out;
}

// Non-edge corruptions of (u, a): {(x, a)} then {(u, y)}, excluding self-pairs,
// existing edges and the positive itself.
struct CorruptionCandidates {
  std::vector<NodePair> first_side;   // (x, a)
  std::vector<NodePair> second_side;  // (u, y)
};

inline CorruptionCandidates corruption_candidates(NodePair positive, const Graph& full) {
  const auto [u, a] = positive;
  if (u >= full.node_count() || a >= full.node_count()) throw Error("positive pair out of range");
  CorruptionCandidates c;
  for (NodeId x = 0; x < full.node_count(); ++x) {
    if (x != u && x != a && !full.has_edge(x, a)) c.first_side.push_back({x, a});
  }
  for (NodeId y = 0; y < full.node_count(); ++y) {
    if (y != u && y != a && !full.has_edge(u, y)) c.second_side.push_back({u, y});
  }
  return c;
}

struct CorruptionSample {
  std::vector<NodePair> pairs;
  std::size_t requested = 0;  // count_per_side * 2, or the full set size
  bool exhausted = false;     // some side had fewer candidates than requested
};

namespace detail {

// Uniform subset of `k` elements, returned in original order.
inline std::vector<NodePair> choose_subset(const std::vector<NodePair>& items, std::size_t k, std::mt19937_64& rng) {
  if (k >= items.size()) return items;
  std::vector<std::size_t> idx(items.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<NodePair> out;
  out.reserve(k);
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace detail

inline CorruptionSample corruption_negatives(NodePair positive, const Graph& full, std::size_t count_per_side,
                                             std::uint64_t seed) {
  auto cand = corruption_candidates(positive, full);
  std::mt19937_64 rng(seed);
  CorruptionSample s;
  for (const auto* side : {&cand.first_side, &cand.second_side}) {
    auto chosen = detail::choose_subset(*side, count_per_side, rng);
    if (count_per_side != kAllCorruptions && chosen.size() < count_per_side) s.exhausted = true;
    s.pairs.insert(s.pairs.end(), chosen.begin(), chosen.end());
  }
  s.requested = count_per_side == kAllCorruptions ? s.pairs.size() : 2 * count_per_side;
  return s;
}

// Corruptions ranked by mix * minmax(CN) + (1 - mix) * minmax(1/dist), both
// measured on `structure`; seeded random keys break score ties.
inline std::vector<NodePair> hard_negatives(NodePair positive, const Graph& full, const Graph& structure,
                                            std::size_t count, double heuristic_mix, std::uint64_t seed) {
  if (heuristic_mix < 0.0 || heuristic_mix > 1.0) throw Error("heuristic mix must lie in [0, 1]");
  if (structure.node_count() != full.node_count()) throw Error("structure and full graphs differ in size");
  auto cand = corruption_candidates(positive, full);
  std::vector<NodePair> pairs = cand.first_side;
  pairs.insert(pairs.end(), cand.second_side.begin(), cand.second_side.end());
  if (pairs.empty() || count == 0) return {};

  // Each side keeps one endpoint fixed, so one BFS per side covers it.
  const auto dist_a = bfs_distances(structure, positive.v);
  const auto dist_u = bfs_distances(structure, positive.u);
  std::vector<double> cn(pairs.size()), sp(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    cn[i] = cn_score(structure, pairs[i].u, pairs[i].v);
    const bool first = i < cand.first_side.size();
    const std::uint32_t d = first ? dist_a[pairs[i].u] : dist_u[pairs[i].v];
    sp[i] = d == UINT32_MAX || d == 0 ? 0.0 : 1.0 / static_cast<double>(d);
  }
  auto minmax_normalize = [](std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, b = *hi;
    for (double& x : v) x = b > a ? (x - a) / (b - a) : 0.0;
  };
  minmax_normalize(cn);
  minmax_normalize(sp);

  std::mt19937_64 rng(seed);
  struct Ranked {
    double score;
    std::uint64_t key;
    std::size_t index;
  };
  std::vector<Ranked> ranked(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ranked[i] = {heuristic_mix * cn[i] + (1.0 - heuristic_mix) * sp[i], rng(), i};
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.key != y.key) return x.key < y.key;
    return x.index < y.index;
  });
  const std::size_t take = std::min(count, ranked.size());
  std::vector<NodePair> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(pairs[ranked[i].index]);
  return out;
}

// 1-based rank of the positive among its negatives.
//   average: 1 + #greater + floor(#equal / 2); optimistic drops ties;
//   pessimistic counts every tie against the positive.
inline std::size_t compute_rank(double positive_score, std::span<const double> negative_scores,
                                TiePolicy policy = TiePolicy::average) {
  if (!std::isfinite(positive_score)) throw NumericalError("non-finite positive score");
  std::size_t greater = 0, equal = 0;
  for (double s : negative_scores) {
    if (!std::isfinite(s)) throw NumericalError("non-finite negative score");
    if (s > positive_score) ++greater;
    else if (s == positive_score) ++equal;
  }
  switch (policy) {
    case TiePolicy::average: return 1 + greater + equal / 2;
    case TiePolicy::optimistic: return 1 + greater;
    case TiePolicy::pessimistic: return 1 + greater + equal;
  }
  return 1 + greater;
}

struct Metrics {
  double mrr = 0.0;
  std::map<int, double> hits;
  std::size_t queries = 0;
};

inline Metrics aggregate(std::span<const std::size_t> ranks, std::span<const int> hits_k) {
  if (ranks.empty()) throw Error("cannot aggregate an empty rank list");
  Metrics m;
  m.queries = ranks.size();
  double reciprocal = 0.0;
  for (auto r : ranks) {
    if (r < 1) throw Error("ranks are 1-based");
    reciprocal += 1.0 / static_cast<double>(r);
  }
  m.mrr = reciprocal / static_cast<double>(ranks.size());
  for (int k : hits_k) {
    std::size_t hit = 0;
    for (auto r : ranks) hit += r <= static_cast<std::size_t>(k) ? 1 : 0;
    m.hits[k] = static_cast<double>(hit) / static_cast<double>(ranks.size());
  }
  return m;
}

// Negatives frozen once per positive, reused by every scorer in a comparison.
struct FrozenNegatives {
  NegativePolicy policy;
  bool shared = false;                       // uniform: one list for all queries
  std::vector<NodePair> shared_pairs;
  std::vector<std::vector<NodePair>> per_query;
  std::vector<std::size_t> requested;        // per query

  std::span<const NodePair> for_query(std::size_t i) const {
    return shared ? std::span<const NodePair>(shared_pairs) : std::span<const NodePair>(per_query[i]);
  }
};

// Sequential over one seed stream per query, so results do not depend on threading.
inline FrozenNegatives freeze_negatives(std::span<const NodePair> positives, const Graph& full, const Graph& structure,
                                        const NegativePolicy& policy) {
  FrozenNegatives f;
  f.policy = policy;
  switch (policy.kind) {
    case NegativePolicy::Kind::uniform: {
      const std::size_t count = policy.count == kAllCorruptions ? positives.size() : policy.count;
      f.shared = true;
      f.shared_pairs = sample_uniform_negatives(full, count, policy.seed);
      f.requested.assign(positives.size(), count);
      break;
    }
    case NegativePolicy::Kind::corruption:
      for (std::size_t i = 0; i < positives.size(); ++i) {
        auto s = corruption_negatives(positives[i], full, policy.count, mix_seed(policy.seed, i));
        f.per_query.push_back(std::move(s.pairs));
        f.requested.push_back(s.requested);
      }
      break;
    case NegativePolicy::Kind::hard: {
      const std::size_t count = policy.count == kAllCorruptions ? 500 : policy.count;
      for (std::size_t i = 0; i < positives.size(); ++i) {
        f.per_query.push_back(hard_negatives(positives[i], full, structure, count, policy.heuristic_mix,
                                             mix_seed(policy.seed, i)));
        f.requested.push_back(count);
      }
      break;
    }
  }
  return f;
}

// FNV-1a over the pair list, for comparing negative sets across reports.
inline std::uint64_t hash_pairs(std::span<const NodePair> pairs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : pairs) {
    eat(p.u);
    eat(p.v);
  }
  return h;
}

struct RankedQuery {
  NodePair positive;
  double positive_score = 0.0;
  std::vector<double> negative_scores;
  std::size_t rank = 1;
  std::size_t requested = 0;
  std::uint64_t negatives_hash = 0;
};

struct EvalOptions {
  TiePolicy tie = TiePolicy::average;
  std::vector<int> hits_k = {10, 50};
};

struct EvalReport {
  std::string scorer;
  NegativePolicy policy;
  TiePolicy tie = TiePolicy::average;
  Metrics metrics;
  std::vector<RankedQuery> per_query;
};

using PairScorer = std::function<std::vector<double>(std::span<const NodePair>)>;

inline EvalReport evaluate(std::string scorer_id, const PairScorer& scorer, std::span<const NodePair> positives,
                           const FrozenNegatives& negatives, const EvalOptions& opt = {}) {
  if (positives.empty()) throw Error("no positive pairs to evaluate");
  // One flat batch: positives first, then the negatives.
  std::vector<NodePair> flat(positives.begin(), positives.end());
  std::vector<std::size_t> neg_begin;
  if (negatives.shared) {
    neg_begin.push_back(flat.size());
    flat.insert(flat.end(), negatives.shared_pairs.begin(), negatives.shared_pairs.end());
  } else {
    if (negatives.per_query.size() != positives.size()) throw Error("negative sets do not match the positives");
    for (const auto& q : negatives.per_query) {
      neg_begin.push_back(flat.size());
      flat.insert(flat.end(), q.begin(), q.end());
    }
  }
  const auto scores = scorer(flat);
  if (scores.size() != flat.size()) throw Error("scorer returned the wrong number of scores");

  EvalReport report;
  report.scorer = std::move(scorer_id);
  report.policy = negatives.policy;
  report.tie = opt.tie;
  std::vector<std::size_t> ranks;
  ranks.reserve(positives.size());
  const std::uint64_t shared_hash = negatives.shared ? hash_pairs(negatives.shared_pairs) : 0;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    RankedQuery q;
    q.positive = positives[i];
    q.positive_score = scores[i];
    const auto negs = negatives.for_query(i);
    const std::size_t begin = negatives.shared ? neg_begin[0] : neg_begin[i];
    q.negative_scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(begin),
                             scores.begin() + static_cast<std::ptrdiff_t>(begin + negs.size()));
    q.rank = compute_rank(q.positive_score, q.negative_scores, opt.tie);
    q.requested = negatives.requested.empty() ? negs.size() : negatives.requested[i];
    q.negatives_hash = negatives.shared ? shared_hash : hash_pairs(negs);
    ranks.push_back(q.rank);
    report.per_query.push_back(std::move(q));
  }
  report.metrics = aggregate(ranks, opt.hits_k);
  return report;
}

// Ranks every test edge against negatives drawn from the full graph
// (train graph ∪ valid ∪ test); scorers only ever see `train`.
inline EvalReport run_evaluation(const Graph& train, const SplitSet& splits, const PairScorer& scorer,
                                 std::string scorer_id, const NegativePolicy& policy, const EvalOptions& opt = {}) {
  splits.validate(train.node_count());
  auto edges = train.edges();
  for (const auto* list : {&splits.train, &splits.valid, &splits.test}) edges.insert(edges.end(), list->begin(), list->end());
  const Graph full = Graph::from_edges(train.node_count(), edges);
  const auto frozen = freeze_negatives(splits.test, full, train, policy);
  return evaluate(std::move(scorer_id), scorer, splits.test, frozen, opt);
}

}  // namespace qwalk
