#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/eval.hpp"
#include "qwalk/graph.hpp"

namespace qwalk {

#ifndef QWALK_VERSION
#define QWALK_VERSION "0.0.0"
#endif

inline constexpr const char* kToolName = "qwalk";
inline constexpr const char* kToolVersion = QWALK_VERSION;

// Stamped into every output file.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// 17 significant digits; round-trips any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string provenance_comment(const Provenance& p) {
  return std::string("# tool=") + kToolName + " version=" + kToolVersion + " config_hash=" + p.config_hash +
         " seed=" + std::to_string(p.seed);
}

inline nlohmann::json provenance_json(const Provenance& p) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"config_hash", p.config_hash}, {"seed", p.seed}};
}

// CSV: a provenance comment line, then `source,target,score`.
inline void write_score_csv(std::ostream& out, std::span<const NodePair> pairs, std::span<const double> scores,
                            const Provenance& p) {
  out << provenance_comment(p) << '\n' << "source,target,score\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out << pairs[i].u << ',' << pairs[i].v << ',' << format_double(scores[i]) << '\n';
  }
}

// JSON: {"provenance": {...}, "scores": {"j,t": score, ...}}
inline nlohmann::json score_table_json(std::span<const NodePair> pairs, std::span<const double> scores,
                                       const Provenance& p) {
  nlohmann::json table = nlohmann::json::object();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    table[std::to_string(pairs[i].u) + "," + std::to_string(pairs[i].v)] = scores[i];
  }
  return {{"provenance", provenance_json(p)}, {"scores", std::move(table)}};
}

inline nlohmann::json policy_json(const NegativePolicy& policy) {
  nlohmann::json j = {{"kind", std::string(to_string(policy.kind))}, {"seed", policy.seed}};
  if (policy.count == kAllCorruptions) j["count"] = "all";
  else j["count"] = policy.count;
  if (policy.kind == NegativePolicy::Kind::hard) j["heuristic_mix"] = policy.heuristic_mix;
  return j;
}

inline nlohmann::json metrics_json(const Metrics& m) {
  nlohmann::json hits = nlohmann::json::object();
  for (auto [k, v] : m.hits) hits[std::to_string(k)] = v;
  return {{"mrr", m.mrr}, {"hits", hits}, {"queries", m.queries}};
}

inline nlohmann::json eval_report_json(const EvalReport& r, const Provenance& p) {
  nlohmann::json queries = nlohmann::json::array();
  for (const auto& q : r.per_query) {
    queries.push_back({{"u", q.positive.u},
                       {"a", q.positive.v},
                       {"pos_score", q.positive_score},
                       {"rank", q.rank},
                       {"n_negs", q.negative_scores.size()},
                       {"n_requested", q.requested},
                       {"neg_hash", hex64(q.negatives_hash)}});
  }
  return {{"provenance", provenance_json(p)},
          {"scorer", r.scorer},
          {"policy", policy_json(r.policy)},
          {"seed", p.seed},
          {"tie_policy", std::string(to_string(r.tie))},
          {"metrics", metrics_json(r.metrics)},
          {"queries", std::move(queries)}};
}

// One row per scorer, shaped for cross-scorer comparison tables.
inline void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports, std::span<const int> hits_k,
                              const Provenance& p) {
  out << provenance_comment(p) << '\n' << "scorer,policy,queries,mrr";
  for (int k : hits_k) out << ",hits@" << k;
  out << '\n';
  for (const auto& r : reports) {
    out << r.scorer << ',' << to_string(r.policy.kind) << ',' << r.metrics.queries << ','
        << format_double(r.metrics.mrr);
    for (int k : hits_k) {
      auto it = r.metrics.hits.find(k);
      out << ',' << (it == r.metrics.hits.end() ? std::string() : format_double(it->second));
    }
    out << '\n';
  }
}

}  // namespace qwalk
