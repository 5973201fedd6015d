// Acceptance suite: one PASS/FAIL line per criterion.
//
//   qwalk_acceptance          all criteria; Cora runs only if QWALK_CORA_EDGES is set
//   qwalk_acceptance cora     the Cora ablation alone; exit 77 when no dataset is given

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/cli.hpp"
#include "qwalk/qwalk.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, not_run };

struct Line {
  std::string name;
  Outcome outcome;
  std::string detail;
};

std::vector<Line> g_lines;

void report(const std::string& name, Outcome o, const std::string& detail) {
  const char* tag = o == Outcome::pass ? "PASS" : o == Outcome::fail ? "FAIL" : "NOT RUN";
  std::printf("%-8s %-28s %s\n", tag, name.c_str(), detail.c_str());
  std::fflush(stdout);
  g_lines.push_back({name, o, detail});
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr WeightScheme kSchemes[] = {WeightScheme::uniform, WeightScheme::inverse_degree,
                                     WeightScheme::inverse_log_degree};

// ---------------------------------------------------------------------------

void path_integral() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto graphs = catalog::small_catalog(6);
  std::set<std::string> families;
  double worst = 0.0;
  std::size_t checks = 0;
  for (const auto& [name, g] : graphs) {
    families.insert(name.substr(0, name.find('-')));
    const auto n = static_cast<NodeId>(g.node_count());
    for (auto scheme : kSchemes) {
      const auto op = build_transition_operator(g, scheme);
      for (int k = 1; k <= 4; ++k)
        for (NodeId j = 0; j < n; ++j)
          for (NodeId t = 0; t < n; ++t) {
            const double amp = path_sum_amplitude(g, scheme, j, t, k, true);
            worst = std::max(worst, std::abs(amp * amp - score_pair(op, j, t, WalkConfig{k, true, scheme, ScoringMode::naive})));
            ++checks;
          }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = families.size() >= 5 && worst <= 1e-9 && secs <= 10.0;
  report("path-integral-equivalence", ok ? Outcome::pass : Outcome::fail,
         std::to_string(graphs.size()) + " graphs / " + std::to_string(families.size()) + " families, " +
             std::to_string(checks) + " checks, max residual " + fmt(worst) + " (tol 1e-9), " + fmt(secs) + " s (limit 10 s)");
}

// (P^2)_{tj} - P_{tj} relation evaluated straight from adjacency and degrees.
double identity_rhs_from_graph(const Graph& g, NodeId j, NodeId t) {
  auto p = [&](NodeId a, NodeId b) {
    if (!g.has_edge(a, b)) return 0.0;
    return 1.0 / std::sqrt(static_cast<double>(g.degree(a)) * g.degree(b));
  };
  double p2 = 0.0;
  for (NodeId k : g.neighbors(t)) p2 += p(t, k) * p(k, j);
  return 4.0 * p2 - 4.0 * p(t, j) + (j == t ? 1.0 : 0.0);
}

// True when ordering by `a` and ordering by `b` agree, treating equal values
// (within tol) as one group.
bool same_order_modulo_ties(const std::vector<double>& a, const std::vector<double>& b, double tol_a, double tol_b) {
  std::vector<std::size_t> idx(a.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return b[x] < b[y]; });
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const double db = b[idx[i]] - b[idx[i - 1]];
    const double da = a[idx[i]] - a[idx[i - 1]];
    const bool tie_b = std::abs(db) <= tol_b;
    const bool tie_a = std::abs(da) <= tol_a;
    if (tie_b != tie_a) return false;
    if (!tie_b && da <= 0) return false;
  }
  return true;
}

void unification() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int pairs = 0;
  for (int gi = 0; gi < 10; ++gi) {
    const std::size_t n = 20 + static_cast<std::size_t>(rng() % 181);
    const double p = std::uniform_real_distribution<double>(1.5, 8.0)(rng) / static_cast<double>(n);
    const auto g = catalog::erdos_renyi(n, p, rng());
    const auto op = build_transition_operator(g);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    for (int i = 0; i < 100; ++i, ++pairs) {
      const NodeId j = pick(rng), t = pick(rng);
      const auto rec = unification_check(g, op, j, t);
      worst = std::max({worst, rec.identity_residual, std::abs(rec.quantum_amp - identity_rhs_from_graph(g, j, t))});
    }
  }

  struct Regular {
    std::string name;
    Graph g;
  };
  const std::vector<Regular> regular = {{"circulant-12{1,2}", catalog::circulant(12, {1, 2})},
                                        {"circulant-15{1,3,5}", catalog::circulant(15, {1, 3, 5})},
                                        {"hypercube-4", catalog::hypercube(4)},
                                        {"petersen", catalog::petersen()}};
  const std::pair<WeightScheme, const char*> matched[] = {
      {WeightScheme::uniform, "cn"}, {WeightScheme::inverse_degree, "ra"}, {WeightScheme::inverse_log_degree, "aa"}};
  int agreements = 0, total = 0;
  std::string mismatch;
  for (const auto& [name, g] : regular) {
    // Link-prediction candidates: distinct, non-adjacent pairs.
    std::vector<NodePair> cand;
    for (NodeId j = 0; j < g.node_count(); ++j)
      for (NodeId t = 0; t < g.node_count(); ++t)
        if (j != t && !g.has_edge(j, t)) cand.push_back({j, t});
    for (auto [scheme, hname] : matched) {
      const auto op = build_transition_operator(g, scheme);
      const auto q = score_batch(op, cand, WalkConfig{2, false, scheme});
      const auto h = heuristic_batch(g, parse_heuristic(hname), cand);
      ++total;
      if (same_order_modulo_ties(q, h, 1e-12, 1e-12)) ++agreements;
      else mismatch += " " + name + "/" + hname;
    }
  }
  const bool ok = worst <= 1e-10 && agreements == total;
  report("unification-identity", ok ? Outcome::pass : Outcome::fail,
         std::to_string(pairs) + " random pairs, max residual " + fmt(worst) + " (tol 1e-10); argsort agreement " +
             std::to_string(agreements) + "/" + std::to_string(total) + " regular-graph/heuristic combos" + mismatch);
}

void complete_graph_envelope() {
  bool ok = true;
  int graphs = 0;
  double worst_excess = -1e300;
  std::string ratio_note;
  for (std::size_t n = 3; n <= 10; ++n) {
    const auto op = build_transition_operator(catalog::complete(n));
    const auto r = eigendecompose(op);
    if (!r.bound_assumption_ok) continue;
    ++graphs;
    for (NodeId j = 0; j < n; ++j) {
      const auto tr = noise_norm_trajectory(op, r, j, 0, 10, false, 1e-9);
      ok = ok && tr.bound_applicable && tr.within_bound;
      for (std::size_t m = 0; m < tr.norms.size(); ++m) worst_excess = std::max(worst_excess, tr.norms[m] - tr.envelope[m]);
    }
    for (int k = 1; k < 10; ++k) {
      if (!(suppression_ratio(r.gap, k + 1) < suppression_ratio(r.gap, k))) {
        ok = false;
        ratio_note += " non-monotone at n=" + std::to_string(n) + ",k=" + std::to_string(k);
      }
    }
  }
  ok = ok && graphs == 8;
  report("noise-envelope-complete", ok ? Outcome::pass : Outcome::fail,
         std::to_string(graphs) + "/8 K_n with bound assumption, m<=10, max(norm - envelope) " + fmt(worst_excess) +
             " (tol 1e-9); ratio strictly decreasing for k=1..10" + ratio_note);
}

void spectral_propagation() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  std::size_t max_n = 0;
  for (int gi = 0; gi < 10; ++gi) {
    const std::size_t n = 64 + static_cast<std::size_t>(rng() % 449);
    max_n = std::max(max_n, n);
    const auto g = catalog::erdos_renyi(n, 4.0 / static_cast<double>(n), rng());
    const auto op = build_transition_operator(g);
    const auto r = eigendecompose(op);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    for (int s = 0; s < 5; ++s) {
      const NodeId j = pick(rng);
      for (int k = 1; k <= 10; ++k) {
        const auto walk = evolve(op, j, j, WalkConfig{k, false});
        const auto spec = eigen_propagate(r, j, k);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(walk[i] - spec[i]));
      }
    }
  }
  report("spectral-propagation", worst <= 1e-8 ? Outcome::pass : Outcome::fail,
         "10 random graphs (N <= " + std::to_string(max_n) + "), k=1..10, max residual " + fmt(worst) + " (tol 1e-8)");
}

void batched_equivalence() {
  std::mt19937_64 rng(7);
  double worst = 0.0, worst_rel = 0.0, largest = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 60);
    const double p = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    const auto g = catalog::erdos_renyi(n, p, rng());
    const auto scheme = kSchemes[rng() % 3];
    const bool oracle = rng() % 4 != 0;
    const int k = 1 + static_cast<int>(rng() % 6);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    const NodePair pair{pick(rng), pick(rng)};
    const auto op = build_transition_operator(g, scheme);
    WalkConfig cfg{k, oracle, scheme, ScoringMode::batched};
    const double fast = score_batch(op, std::span<const NodePair>(&pair, 1), cfg)[0];
    cfg.scoring_mode = ScoringMode::naive;
    const double slow = score_pair(op, pair.u, pair.v, cfg);
    worst = std::max(worst, std::abs(fast - slow));
    largest = std::max(largest, std::abs(slow));
    if (slow != 0.0) worst_rel = std::max(worst_rel, std::abs(fast - slow) / std::abs(slow));
  }
  report("batched-equivalence", worst <= 1e-10 ? Outcome::pass : Outcome::fail,
         "1000 instances (k<=6), max |batched - naive| " + fmt(worst) + " (tol 1e-10), max relative " + fmt(worst_rel) +
             ", largest score " + fmt(largest));
}

void metric_fixtures() {
  const std::vector<int> hits = {10};
  const std::vector<std::size_t> a = {1, 2, 4}, b = {1, 3, 11};
  const double mrr = aggregate(a, hits).mrr;
  const double h10 = aggregate(b, hits).hits.at(10);
  const std::vector<double> strict = {0.1, 0.5, 0.95}, ties = {0.5, 0.5};
  bool ranks_ok = true;
  for (auto tie : {TiePolicy::average, TiePolicy::optimistic, TiePolicy::pessimistic})
    ranks_ok = ranks_ok && compute_rank(0.9, strict, tie) == 2;
  ranks_ok = ranks_ok && compute_rank(0.5, ties, TiePolicy::average) == 2 &&
             compute_rank(0.5, ties, TiePolicy::pessimistic) == 3 && compute_rank(0.5, ties, TiePolicy::optimistic) == 1;
  const bool ok = std::abs(mrr - 7.0 / 12.0) <= 1e-12 && std::abs(h10 - 2.0 / 3.0) <= 1e-12 && ranks_ok;
  report("metric-fixtures", ok ? Outcome::pass : Outcome::fail,
         "MRR[1,2,4] err " + fmt(std::abs(mrr - 7.0 / 12.0)) + ", Hits@10[1,3,11] err " + fmt(std::abs(h10 - 2.0 / 3.0)) +
             " (tol 1e-12), tie fixtures " + (ranks_ok ? "ok" : "wrong"));
}

// ---------------------------------------------------------------------------

bool cora_ablation(const char* path) {
  const auto t0 = std::chrono::steady_clock::now();
  Graph g;
  try {
    g = load_edge_list_file(path);
  } catch (const std::exception& e) {
    report("cora-ablation", Outcome::fail, std::string("cannot load dataset: ") + e.what());
    return false;
  }
  const unsigned threads = default_thread_count();
  const int seeds = 5;
  double avg_on = 0.0, avg_off = 0.0, best_avg_on = 0.0, best_avg_off = 0.0, max_drop = 0.0;
  std::string per_seed;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto split = random_split(g, 0.85, 0.05, static_cast<std::uint64_t>(seed));
    const Graph train = Graph::from_edges(g.node_count(), split.train);
    const auto frozen = freeze_negatives(split.test, g, train, NegativePolicy{NegativePolicy::Kind::corruption, kAllCorruptions,
                                                                              static_cast<std::uint64_t>(seed)});
    const auto op = build_transition_operator(train);
    double best_on = 0.0, best_off = 0.0;
    for (int k = 1; k <= 10; ++k) {
      double mrr[2];
      for (bool oracle : {true, false}) {
        const WalkConfig cfg{k, oracle};
        PairScorer s = [&](std::span<const NodePair> p) { return score_batch(op, p, cfg, threads); };
        mrr[oracle] = evaluate("q", s, split.test, frozen).metrics.mrr;
      }
      if (k == 2) {
        avg_on += mrr[1] / seeds;
        avg_off += mrr[0] / seeds;
      }
      best_on = std::max(best_on, mrr[1]);
      best_off = std::max(best_off, mrr[0]);
      const auto p_on = score_batch(op, split.test, WalkConfig{k, true}, threads);
      const auto p_off = score_batch(op, split.test, WalkConfig{k, false}, threads);
      for (std::size_t i = 0; i < p_on.size(); ++i)
        if (p_off[i] > 0.0) max_drop = std::max(max_drop, p_on[i] / p_off[i]);
    }
    best_avg_on += best_on / seeds;
    best_avg_off += best_off / seeds;
    per_seed += " s" + std::to_string(seed) + ":" + fmt(100 * best_on) + "/" + fmt(100 * best_off);
  }
  const double secs = seconds_since(t0);
  const double target = 30.15, mrr_pts = 100.0 * avg_on;
  const bool oracle_not_worse = best_avg_on + 1e-12 >= best_avg_off;
  const bool ok = oracle_not_worse && max_drop >= 10.0;
  report("cora-ablation", ok ? Outcome::pass : Outcome::fail,
         "N=" + std::to_string(g.node_count()) + " M=" + std::to_string(g.edge_count()) + ", best-k MRR on/off " + fmt(100 * best_avg_on) + "/" +
             fmt(100 * best_avg_off) + (oracle_not_worse ? " (on >= off)" : " (on < off)") + ", max target-probability ratio " + fmt(max_drop) +
             " (need >= 10); k=2 MRR " + fmt(mrr_pts) + " vs 30.15 (gap " + fmt(mrr_pts - target) +
             " pts, informational); best on/off per seed" + per_seed + "; " + fmt(secs) + " s");
  return ok;
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qwalk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    if (slurp(e.path()) != slurp(b / e.path().filename())) return false;
  }
  return files > 0;
}

void determinism() {
  const auto base = fs::temp_directory_path() / "qwalk-acceptance";
  fs::remove_all(base);
  const std::string cfg = std::string(QWALK_FIXTURES) + "/eval.toml";
  bool ok = true;
  std::size_t files = 0;
  std::string detail;
  for (const char* policy : {"corruption", "uniform", "hard"}) {
    const auto a = base / (std::string("eval-") + policy + "-1"), b = base / (std::string("eval-") + policy + "-2");
    const int ra = run_cli({"eval", "--config", cfg, "--policy", policy, "--negatives", "20", "--threads", "1", "--out", a.string()});
    const int rb = run_cli({"eval", "--config", cfg, "--policy", policy, "--negatives", "20", "--threads", "3", "--out", b.string()});
    ok = ok && ra == 0 && rb == 0 && same_tree(a, b, files);
  }
  const auto va = base / "verify-1", vb = base / "verify-2";
  ok = ok && run_cli({"verify", "--out", va.string()}) == 0 && run_cli({"verify", "--out", vb.string()}) == 0 &&
       same_tree(va, vb, files);
  report("determinism", ok ? Outcome::pass : Outcome::fail,
         std::to_string(files) + " report files byte-identical across repeated eval (3 policies, 1 vs 3 threads) and verify runs");
}

}  // namespace

int main(int argc, char** argv) {
  const char* cora = std::getenv("QWALK_CORA_EDGES");
  if (argc > 1 && std::string(argv[1]) == "cora") {
    if (!cora || !*cora) {
      report("cora-ablation", Outcome::not_run, "set QWALK_CORA_EDGES to a Cora edge list to run");
      return 77;
    }
    return cora_ablation(cora) ? 0 : 1;
  }

  path_integral();
  unification();
  complete_graph_envelope();
  spectral_propagation();
  batched_equivalence();
  metric_fixtures();
  if (cora && *cora) cora_ablation(cora);
  else report("cora-ablation", Outcome::not_run, "set QWALK_CORA_EDGES to a Cora edge list to run");
  determinism();

  int failed = 0, not_run = 0;
  for (const auto& l : g_lines) {
    failed += l.outcome == Outcome::fail;
    not_run += l.outcome == Outcome::not_run;
  }
  std::printf("%zu criteria: %zu passed, %d failed, %d not run\n", g_lines.size(),
              g_lines.size() - static_cast<std::size_t>(failed + not_run), failed, not_run);
  return failed == 0 ? 0 : 1;
}
