#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwalk/catalog.hpp"
#include "qwalk/config.hpp"
#include "qwalk/edge_io.hpp"
#include "qwalk/eval.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/heuristics.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/report.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/transition.hpp"
#include "qwalk/walk.hpp"

// Subcommands behind the `qwalk` executable: ingest, score, eval, ablate, verify.
namespace qwalk::cli {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2 };

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct Context {
  Settings settings;
  std::ostream& out;
  std::ostream& err;

  unsigned threads() const {
    auto t = settings.get_uint("threads", 0);
    return t > 0 ? static_cast<unsigned>(t) : default_thread_count();
  }
  std::uint64_t seed() const { return settings.get_uint("seed", 0); }
  // Output location and thread count do not change results.
  std::string result_config() const { return settings.canonical({"out", "threads"}); }
  Provenance provenance() const { return {hex64(fnv1a64(result_config())), seed()}; }
  std::filesystem::path out_dir() const {
    std::filesystem::path dir = settings.get_or("out", "qwalk-out");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
  }
};

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

inline void write_config_echo(const Context& ctx, const std::filesystem::path& dir) {
  auto f = open_output(dir / "config.echo.txt");
  f << provenance_comment(ctx.provenance()) << '\n' << ctx.result_config();
}

// ---------------------------------------------------------------------------
// Data loading

struct Dataset {
  std::size_t node_count = 0;
  Graph base;   // the whole input edge set
  Graph train;  // what scorers see
  SplitSet splits;
  bool has_splits = false;
  std::optional<IdMap> ids;
};

inline EdgeListOptions edge_options(const Settings& s) {
  EdgeListOptions o;
  o.one_indexed = s.get_bool("one_indexed", false);
  if (auto n = s.get("node_count")) o.node_count = s.get_uint("node_count", 0);
  return o;
}

inline void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error("file not found: " + path);
}

// Parses "85/5/10" into train/valid fractions.
inline std::pair<double, double> parse_split_ratio(const std::string& text) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto slash = text.find('/', pos);
    auto item = text.substr(pos, slash == std::string::npos ? std::string::npos : slash - pos);
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error("bad split ratio '" + text + "'");
    }
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  if (parts.size() != 3) throw Error("split ratio needs three parts, e.g. 85/5/10");
  const double total = parts[0] + parts[1] + parts[2];
  if (!(total > 0)) throw Error("split ratio must be positive");
  return {parts[0] / total, parts[1] / total};
}

inline Dataset load_dataset(const Context& ctx, bool need_splits) {
  const auto& s = ctx.settings;
  auto opt = edge_options(s);
  Dataset d;
  if (auto path = s.get("id_map")) {
    require_file(*path);
    std::ifstream in(*path);
    d.ids = IdMap::read(in);
  }
  const IdMap* ids = d.ids ? &*d.ids : nullptr;

  bool have_base = false;
  if (auto path = s.get("graph")) {
    require_file(*path);
    std::ifstream in(*path, std::ios::binary);
    d.base = read_graph_binary(in);
    have_base = true;
  } else if (auto path = s.get("edges")) {
    require_file(*path);
    if (ids) {
      auto pairs = read_pairs_file(*path, opt, ids);
      d.base = Graph::from_edges(ids->size(), pairs);
    } else {
      d.base = load_edge_list_file(*path, opt);
    }
    have_base = true;
  }

  if (auto train_path = s.get("train")) {
    for (const char* key : {"train", "valid", "test"}) {
      if (auto p = s.get(key)) require_file(*p);
    }
    d.splits.train = read_pairs_file(*train_path, opt, ids);
    if (auto p = s.get("valid")) d.splits.valid = read_pairs_file(*p, opt, ids);
    if (auto p = s.get("test")) d.splits.test = read_pairs_file(*p, opt, ids);
    std::size_t n = have_base ? d.base.node_count() : (ids ? ids->size() : 0);
    if (opt.node_count) n = std::max<std::size_t>(n, *opt.node_count);
    for (const auto* list : {&d.splits.train, &d.splits.valid, &d.splits.test}) {
      for (const auto& p : *list) n = std::max<std::size_t>(n, std::max(p.u, p.v) + std::size_t{1});
    }
    d.node_count = n;
    d.splits.validate(n);
    d.train = Graph::from_edges(n, d.splits.train);
    if (!have_base) d.base = full_graph(n, d.splits);
    d.has_splits = true;
  } else if (have_base) {
    d.node_count = d.base.node_count();
    if (need_splits) {
      auto [train_frac, valid_frac] = parse_split_ratio(s.get_or("split", "85/5/10"));
      d.splits = random_split(d.base, train_frac, valid_frac, ctx.seed());
      d.train = Graph::from_edges(d.node_count, d.splits.train);
      d.has_splits = true;
    } else {
      d.train = d.base;
    }
  } else {
    throw Error("no input graph: set 'edges', 'graph' or 'train'");
  }

  if (s.get_bool("merge_valid", false) && d.has_splits) d.train = merge_validation_edges(d.train, d.splits);
  if (need_splits && d.splits.test.empty()) throw Error("no test edges to evaluate");
  return d;
}

// ---------------------------------------------------------------------------
// Scorers

inline int resolve_steps(const Context& ctx) {
  const auto& s = ctx.settings;
  int k = 0;
  if (s.has("k")) {
    k = static_cast<int>(s.get_int("k", 2));
  } else if (auto name = s.get("dataset")) {
    if (auto profile = find_profile(*name)) {
      k = profile->steps;
    } else {
      ctx.err << "warning: unknown dataset profile '" << *name << "', using k=2\n";
      k = 2;
    }
  } else {
    k = 2;
  }
  if (k < 1 || k > 32) throw Error("k must lie in [1, 32], got " + std::to_string(k));
  return k;
}

inline WalkConfig walk_config(const Context& ctx) {
  const auto& s = ctx.settings;
  WalkConfig cfg;
  cfg.steps = resolve_steps(ctx);
  cfg.oracle_enabled = s.get_bool("oracle", true);
  cfg.scheme = parse_weight_scheme(s.get_or("scheme", "uniform"));
  cfg.normalize = s.get_bool("normalize", false);
  const auto mode = s.get_or("scoring_mode", "batched");
  if (mode == "batched") cfg.scoring_mode = ScoringMode::batched;
  else if (mode == "naive") cfg.scoring_mode = ScoringMode::naive;
  else throw Error("scoring_mode must be 'batched' or 'naive'");
  return cfg;
}

struct NamedScorer {
  std::string id;
  PairScorer score;
};

inline std::string quantum_id(const WalkConfig& cfg) {
  return "quantum k=" + std::to_string(cfg.steps) + " oracle=" + (cfg.oracle_enabled ? "on" : "off") +
         " scheme=" + std::string(to_string(cfg.scheme)) + (cfg.normalize ? " normalized" : "");
}

inline NamedScorer make_quantum_scorer(const Graph& train, const WalkConfig& cfg, unsigned threads) {
  auto op = std::make_shared<const TransitionOperator>(build_transition_operator(train, cfg.scheme));
  return {quantum_id(cfg), [op, cfg, threads](std::span<const NodePair> pairs) {
            return score_batch(*op, pairs, cfg, threads);
          }};
}

inline NamedScorer make_scorer(const Context& ctx, const std::string& name, const Graph& train) {
  const unsigned threads = ctx.threads();
  if (name == "quantum") return make_quantum_scorer(train, walk_config(ctx), threads);
  Heuristic h = parse_heuristic(name);
  h.katz_beta = ctx.settings.get_double("katz_beta", 0.1);
  h.katz_max_len = static_cast<int>(ctx.settings.get_int("katz_max_len", 5));
  std::string id = h.name();
  if (h.kind == Heuristic::Kind::katz) {
    id += " beta=" + format_double(h.katz_beta) + " max_len=" + std::to_string(h.katz_max_len);
  }
  auto graph = std::make_shared<const Graph>(train);
  return {id, [graph, h, threads](std::span<const NodePair> pairs) { return heuristic_batch(*graph, h, pairs, threads); }};
}

inline std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline NegativePolicy negative_policy(const Context& ctx) {
  const auto& s = ctx.settings;
  NegativePolicy p;
  p.kind = parse_policy_kind(s.get_or("policy", "corruption"));
  const auto count = s.get_or("negatives", "all");
  p.count = count == "all" ? kAllCorruptions : static_cast<std::size_t>(s.get_uint("negatives", 0));
  p.seed = ctx.seed();
  p.heuristic_mix = s.get_double("hard_mix", 0.5);
  return p;
}

inline EvalOptions eval_options(const Context& ctx) {
  EvalOptions o;
  o.tie = parse_tie_policy(ctx.settings.get_or("tie", "average"));
  o.hits_k = ctx.settings.get_int_list("hits", {10, 50});
  return o;
}

inline std::string slug(const std::string& id) {
  std::string s;
  for (char c : id) {
    if (std::isalnum(static_cast<unsigned char>(c))) s += c;
    else if (!s.empty() && s.back() != '-') s += '-';
  }
  while (!s.empty() && s.back() == '-') s.pop_back();
  return s;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_ingest(Context& ctx) {
  const auto& s = ctx.settings;
  auto path = s.get("edges");
  if (!path) throw Error("ingest needs 'edges'");
  require_file(*path);
  auto opt = edge_options(s);
  std::ifstream in(*path);
  if (!in) throw Error("cannot open edge list '" + *path + "'");
  Graph g;
  std::optional<IdMap> ids;
  if (s.get_bool("relabel", false)) {
    auto r = load_edge_list_relabeled(in, opt);
    g = std::move(r.graph);
    ids = std::move(r.ids);
  } else {
    g = load_edge_list(in, opt);
  }
  const auto dir = ctx.out_dir();
  const auto prov = ctx.provenance();
  {
    auto f = open_output(dir / "graph.qwg");
    write_graph_binary(f, g);
  }
  if (ids) {
    auto f = open_output(dir / "id_map.txt");
    ids->write(f);
  }
  std::size_t isolated = 0;
  for (auto d : g.degrees()) isolated += d == 0 ? 1 : 0;
  nlohmann::json stats = {{"provenance", provenance_json(prov)},
                          {"nodes", g.node_count()},
                          {"edges", g.edge_count()},
                          {"mean_degree", g.mean_degree()},
                          {"isolated_nodes", isolated},
                          {"relabeled", ids.has_value()}};
  open_output(dir / "ingest.json") << stats.dump(2) << '\n';
  write_config_echo(ctx, dir);
  ctx.out << "nodes=" << g.node_count() << " edges=" << g.edge_count() << " mean_degree=" << format_double(g.mean_degree())
          << '\n';
  return kExitOk;
}

inline int cmd_score(Context& ctx) {
  const auto& s = ctx.settings;
  auto data = load_dataset(ctx, false);
  std::vector<NodePair> pairs;
  if (auto p = s.get("pairs")) {
    require_file(*p);
    pairs = read_pairs_file(*p, edge_options(s), data.ids ? &*data.ids : nullptr);
  }
  if (auto p = s.get("pair")) {
    for (const auto& item : split_list(*p, ';')) {
      auto ends = split_list(item, ',');
      if (ends.size() != 2) throw Error("--pair expects 'j,t', got '" + item + "'");
      try {
        pairs.push_back({static_cast<NodeId>(std::stoul(ends[0])), static_cast<NodeId>(std::stoul(ends[1]))});
      } catch (const std::exception&) {
        throw Error("--pair expects integer ids, got '" + item + "'");
      }
    }
  }
  if (pairs.empty()) throw Error("no pairs to score: set 'pairs' or --pair");
  auto scorer = make_scorer(ctx, s.get_or("scorer", "quantum"), data.train);
  const auto scores = scorer.score(pairs);
  const auto dir = ctx.out_dir();
  const auto prov = ctx.provenance();
  {
    auto f = open_output(dir / "scores.csv");
    write_score_csv(f, pairs, scores, prov);
  }
  auto j = score_table_json(pairs, scores, prov);
  j["scorer"] = scorer.id;
  open_output(dir / "scores.json") << j.dump(2) << '\n';
  write_config_echo(ctx, dir);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ctx.out << pairs[i].u << ',' << pairs[i].v << ',' << format_double(scores[i]) << '\n';
  }
  return kExitOk;
}

inline int cmd_eval(Context& ctx) {
  auto data = load_dataset(ctx, true);
  const Graph full = Graph::from_edges(data.node_count, [&] {
    auto e = data.base.edges();
    auto t = data.train.edges();
    e.insert(e.end(), t.begin(), t.end());
    for (const auto* list : {&data.splits.train, &data.splits.valid, &data.splits.test}) e.insert(e.end(), list->begin(), list->end());
    return e;
  }());
  const auto policy = negative_policy(ctx);
  const auto opt = eval_options(ctx);
  const auto frozen = freeze_negatives(data.splits.test, full, data.train, policy);

  std::vector<EvalReport> reports;
  for (const auto& name : split_list(ctx.settings.get_or("scorer", "quantum"))) {
    auto scorer = make_scorer(ctx, name, data.train);
    reports.push_back(evaluate(scorer.id, scorer.score, data.splits.test, frozen, opt));
  }
  const auto dir = ctx.out_dir();
  const auto prov = ctx.provenance();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    open_output(dir / ("eval-" + slug(reports[i].scorer) + ".json")) << eval_report_json(reports[i], prov).dump(2) << '\n';
  }
  {
    auto f = open_output(dir / "summary.csv");
    write_summary_csv(f, reports, opt.hits_k, prov);
  }
  write_config_echo(ctx, dir);
  write_summary_csv(ctx.out, reports, opt.hits_k, prov);
  return kExitOk;
}

inline int cmd_ablate(Context& ctx) {
  const auto& s = ctx.settings;
  auto data = load_dataset(ctx, true);
  const auto ks = s.get_int_list("k_range", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  if (ks.empty()) throw Error("empty k_range");
  std::vector<bool> modes;
  for (const auto& m : split_list(s.get_or("oracle_modes", "on,off"))) {
    if (m == "on") modes.push_back(true);
    else if (m == "off") modes.push_back(false);
    else throw Error("oracle_modes entries must be 'on' or 'off'");
  }
  const auto select_on = s.get_or("select_on", "test");
  if (select_on != "test" && select_on != "valid") throw Error("select_on must be 'test' or 'valid'");
  const auto& positives = select_on == "valid" ? data.splits.valid : data.splits.test;
  if (positives.empty()) throw Error("no " + select_on + " edges for the ablation");

  auto all_edges = data.base.edges();
  for (const auto* list : {&data.splits.train, &data.splits.valid, &data.splits.test}) all_edges.insert(all_edges.end(), list->begin(), list->end());
  const Graph full = Graph::from_edges(data.node_count, all_edges);
  const auto frozen = freeze_negatives(positives, full, data.train, negative_policy(ctx));
  const auto opt = eval_options(ctx);
  WalkConfig base = walk_config(ctx);
  const auto op = build_transition_operator(data.train, base.scheme);
  const unsigned threads = ctx.threads();

  const auto dir = ctx.out_dir();
  const auto prov = ctx.provenance();
  auto sweep = open_output(dir / "ablation.csv");
  sweep << provenance_comment(prov) << '\n' << "k,oracle,mrr";
  for (int k : opt.hits_k) sweep << ",hits@" << k;
  sweep << '\n';

  nlohmann::json cells = nlohmann::json::array();
  std::map<bool, std::pair<int, double>> best;
  for (int k : ks) {
    for (bool oracle : modes) {
      WalkConfig cfg = base;
      cfg.steps = k;
      cfg.oracle_enabled = oracle;
      cfg.validate();
      auto scorer = [&](std::span<const NodePair> pairs) { return score_batch(op, pairs, cfg, threads); };
      auto r = evaluate(quantum_id(cfg), scorer, positives, frozen, opt);
      sweep << k << ',' << (oracle ? "on" : "off") << ',' << format_double(r.metrics.mrr);
      for (int h : opt.hits_k) sweep << ',' << format_double(r.metrics.hits[h]);
      sweep << '\n';
      cells.push_back({{"k", k}, {"oracle", oracle}, {"metrics", metrics_json(r.metrics)}});
      auto it = best.find(oracle);
      if (it == best.end() || r.metrics.mrr > it->second.second) best[oracle] = {k, r.metrics.mrr};
    }
  }

  // Target probability with and without the oracle for the first few positives.
  const auto n_amp = std::min<std::size_t>(positives.size(), s.get_uint("amplitude_pairs", 20));
  auto amps = open_output(dir / "amplitudes.csv");
  amps << provenance_comment(prov) << '\n' << "source,target,k,prob_oracle,prob_no_oracle\n";
  double max_drop = 0.0;
  for (int k : ks) {
    WalkConfig on = base, off = base;
    on.steps = off.steps = k;
    on.oracle_enabled = true;
    off.oracle_enabled = false;
    std::span<const NodePair> sample(positives.data(), n_amp);
    const auto p_on = score_batch(op, sample, on, threads);
    const auto p_off = score_batch(op, sample, off, threads);
    for (std::size_t i = 0; i < n_amp; ++i) {
      amps << sample[i].u << ',' << sample[i].v << ',' << k << ',' << format_double(p_on[i]) << ','
           << format_double(p_off[i]) << '\n';
      if (p_off[i] > 0.0) max_drop = std::max(max_drop, p_on[i] / p_off[i]);
    }
  }

  nlohmann::json summary = {{"provenance", provenance_json(prov)},
                            {"evaluated_on", select_on},
                            {"policy", policy_json(frozen.policy)},
                            {"cells", cells},
                            {"max_target_probability_ratio", max_drop}};
  for (auto [oracle, kb] : best) {
    summary[oracle ? "best_k_oracle_on" : "best_k_oracle_off"] = {{"k", kb.first}, {"mrr", kb.second}};
  }
  open_output(dir / "ablation.json") << summary.dump(2) << '\n';
  write_config_echo(ctx, dir);
  ctx.out << "wrote " << ks.size() * modes.size() << " sweep rows to " << (dir / "ablation.csv").string() << '\n';
  return kExitOk;
}

struct VerifyTolerances {
  double path_sum = 1e-9;
  double identity = 1e-10;
  double batched = 1e-10;
  double eigen = 1e-8;
  double envelope = 1e-9;
};

// Every check for one (graph, scheme) combination.
inline nlohmann::json verify_graph(const std::string& name, const Graph& g, WeightScheme scheme, int k_max,
                                   bool inject_fault, const VerifyTolerances& tol, bool& passed) {
  auto op = build_transition_operator(g, scheme);
  if (inject_fault && op.entry_count() > 0) {
    std::vector<double> vals(op.values().begin(), op.values().end());
    vals[0] += 1e-3;
    op = TransitionOperator::from_csr({op.offsets().begin(), op.offsets().end()},
                                      {op.columns().begin(), op.columns().end()}, std::move(vals), scheme);
  }
  const auto n = static_cast<NodeId>(g.node_count());
  nlohmann::json rec = {{"graph", name}, {"scheme", std::string(to_string(scheme))}, {"nodes", g.node_count()},
                        {"edges", g.edge_count()}};
  bool ok = true;

  double identity_max = 0.0;
  for (NodeId j = 0; j < n; ++j)
    for (NodeId t = 0; t < n; ++t) identity_max = std::max(identity_max, unification_check(g, op, j, t).identity_residual);
  rec["identity_max_residual"] = identity_max;
  ok = ok && identity_max <= tol.identity;

  if (g.node_count() <= kPathSumMaxNodes) {
    double path_max = 0.0, batched_max = 0.0;
    std::vector<NodePair> pairs;
    for (NodeId j = 0; j < n; ++j)
      for (NodeId t = 0; t < n; ++t) pairs.push_back({j, t});
    for (int k = 1; k <= std::min(k_max, kPathSumMaxSteps); ++k) {
      for (bool oracle : {true, false}) {
        WalkConfig cfg{k, oracle, scheme, ScoringMode::naive};
        WalkConfig fast = cfg;
        fast.scoring_mode = ScoringMode::batched;
        const auto batched = score_batch(op, pairs, fast);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const double naive = score_pair(op, pairs[i].u, pairs[i].v, cfg);
          const double amp = path_sum_amplitude(g, scheme, pairs[i].u, pairs[i].v, k, oracle);
          path_max = std::max(path_max, std::abs(amp * amp - naive));
          batched_max = std::max(batched_max, std::abs(batched[i] - naive));
        }
      }
    }
    rec["path_sum_max_residual"] = path_max;
    rec["batched_max_residual"] = batched_max;
    ok = ok && path_max <= tol.path_sum && batched_max <= tol.batched;
  } else {
    rec["path_sum_max_residual"] = nullptr;
    rec["batched_max_residual"] = nullptr;
  }

  rec["gap"] = nullptr;
  rec["lambda_min"] = nullptr;
  rec["bound_assumption_ok"] = nullptr;
  if (op.is_symmetric() && g.node_count() <= kDenseSpectralCap) {
    const auto report = eigendecompose(op);
    rec["gap"] = report.gap;
    rec["lambda_min"] = report.lambda_min;
    rec["degenerate"] = report.degenerate;
    rec["bound_assumption_ok"] = report.bound_assumption_ok;
    double eigen_max = 0.0;
    for (NodeId j = 0; j < n; ++j) {
      for (int k = 1; k <= k_max; ++k) {
        const auto walk = evolve(op, j, j, WalkConfig{k, false, scheme});
        const auto spectral = eigen_propagate(report, j, k);
        for (std::size_t i = 0; i < spectral.size(); ++i) eigen_max = std::max(eigen_max, std::abs(walk[i] - spectral[i]));
      }
    }
    rec["eigen_propagation_max_residual"] = eigen_max;
    ok = ok && eigen_max <= tol.eigen;
    if (report.bound_assumption_ok) {
      bool within = true;
      for (NodeId j = 0; j < n; ++j) {
        within = within && noise_norm_trajectory(op, report, j, 0, 10, false, tol.envelope).within_bound;
      }
      rec["envelope_ok"] = within;
      ok = ok && within;
    } else {
      rec["envelope_ok"] = nullptr;
    }
  } else if (op.is_symmetric() && g.node_count() >= 2) {
    const auto top = estimate_top_eigenvalues(op);
    rec["gap"] = top.gap;
    rec["gap_estimated"] = true;
  }
  rec["passed"] = ok;
  passed = passed && ok;
  return rec;
}

inline int cmd_verify(Context& ctx) {
  const auto& s = ctx.settings;
  const int k_max = static_cast<int>(s.get_int("k_max", 4));
  if (k_max < 1 || k_max > kPathSumMaxSteps) throw Error("k_max must lie in [1, 5]");
  const auto max_nodes = static_cast<std::size_t>(s.get_uint("max_nodes", 6));
  if (max_nodes < 2 || max_nodes > kPathSumMaxNodes) throw Error("max_nodes must lie in [2, 10]");
  const bool fault = s.get_bool("inject_fault", false);
  VerifyTolerances tol;

  std::vector<catalog::NamedGraph> graphs;
  if (s.has("edges") || s.has("graph") || s.has("train")) {
    auto data = load_dataset(ctx, false);
    graphs.push_back({s.get_or("dataset", "input"), data.train});
  } else {
    graphs = catalog::small_catalog(max_nodes);
  }

  bool passed = true;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& [name, g] : graphs) {
    for (auto scheme : {WeightScheme::uniform, WeightScheme::inverse_degree, WeightScheme::inverse_log_degree}) {
      results.push_back(verify_graph(name, g, scheme, k_max, fault, tol, passed));
    }
  }
  double identity_max = 0.0, path_max = 0.0;
  for (const auto& r : results) {
    identity_max = std::max(identity_max, r["identity_max_residual"].get<double>());
    if (!r["path_sum_max_residual"].is_null()) path_max = std::max(path_max, r["path_sum_max_residual"].get<double>());
  }
  const auto prov = ctx.provenance();
  nlohmann::json report = {
      {"provenance", provenance_json(prov)},
      {"tolerances",
       {{"path_sum", tol.path_sum}, {"identity", tol.identity}, {"batched", tol.batched}, {"eigen", tol.eigen}, {"envelope", tol.envelope}}},
      {"k_max", k_max},
      {"identity_max_residual", identity_max},
      {"path_sum_max_residual", path_max},
      {"graphs", results},
      {"passed", passed}};
  const auto dir = ctx.out_dir();
  open_output(dir / "verify.json") << report.dump(2) << '\n';
  write_config_echo(ctx, dir);
  ctx.out << "verify: " << results.size() << " checks, identity_max=" << format_double(identity_max)
          << " path_sum_max=" << format_double(path_max) << (passed ? " PASS" : " FAIL") << '\n';
  return passed ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// Entry point

struct OptionSpec {
  const char* key;
  const char* help;
};

inline const std::vector<OptionSpec>& common_options() {
  static const std::vector<OptionSpec> opts = {
      {"edges", "edge-list file (two integer ids per line; '#' comments)"},
      {"graph", "binary graph container written by `ingest`"},
      {"id-map", "id map written by `ingest --relabel true`"},
      {"train", "train split pair file"},
      {"valid", "validation split pair file"},
      {"test", "test split pair file"},
      {"split", "random split ratio when no split files are given (default 85/5/10)"},
      {"one-indexed", "input ids start at 1 (true/false)"},
      {"node-count", "explicit node count"},
      {"merge-valid", "merge validation edges into the scoring graph (true/false)"},
      {"dataset", "dataset profile: cora, citeseer, pubmed, ogbl-collab, ogbl-ddi"},
      {"scorer", "quantum, cn, aa, ra, katz, shortest-path (comma list for eval)"},
      {"k", "walk steps, 1..32 (default from dataset profile, else 2)"},
      {"oracle", "apply the target phase flip (true/false)"},
      {"scheme", "uniform, inverse-degree, inverse-log-degree"},
      {"normalize", "divide scores by the squared state norm (true/false)"},
      {"scoring-mode", "batched or naive"},
      {"katz-beta", "Katz damping (default 0.1)"},
      {"katz-max-len", "Katz truncation length (default 5)"},
      {"policy", "negatives: uniform, corruption, hard"},
      {"negatives", "negative count ('all' = full corruption set)"},
      {"hard-mix", "CN weight in the hard-negative mix (default 0.5)"},
      {"tie", "tie policy: average, optimistic, pessimistic"},
      {"hits", "Hits@K cutoffs, e.g. 10,50"},
      {"seed", "random seed (default 0)"},
      {"threads", "worker threads (default QWALK_THREADS or hardware)"},
      {"out", "output directory (default qwalk-out)"},
  };
  return opts;
}

// Input paths in a config file are relative to the file itself.
inline void resolve_config_paths(Settings& s, const std::filesystem::path& base) {
  for (const char* key : {"edges", "graph", "id_map", "train", "valid", "test", "pairs"}) {
    auto v = s.get(key);
    if (!v || v->empty()) continue;
    std::filesystem::path p(*v);
    if (p.is_relative()) s.set(key, (base / p).lexically_normal().string());
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"qwalk: quantum-walk link prediction, heuristics, evaluation and verification"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override it");

  std::map<std::string, std::string> flag_values;
  std::map<CLI::Option*, std::string> option_keys;
  std::vector<std::string> pair_flags;

  auto add_common = [&](CLI::App* sub) {
    for (const auto& o : common_options()) {
      auto* opt = sub->add_option(std::string("--") + o.key, flag_values[o.key], o.help);
      option_keys[opt] = o.key;
    }
    sub->add_option("--config", config_path, "key = value config file; flags override it");
  };
  auto add_extra = [&](CLI::App* sub, const char* key, const char* help) {
    auto* opt = sub->add_option(std::string("--") + key, flag_values[key], help);
    option_keys[opt] = key;
  };

  auto* ingest = app.add_subcommand("ingest", "parse an edge list into the binary graph container");
  add_common(ingest);
  add_extra(ingest, "relabel", "map arbitrary ids onto 0..n-1 and write id_map.txt (true/false)");

  auto* score = app.add_subcommand("score", "score node pairs and write a score table");
  add_common(score);
  add_extra(score, "pairs", "pair file to score");
  score->add_option("--pair", pair_flags, "pair 'j,t' to score (repeatable)");

  auto* eval = app.add_subcommand("eval", "rank test edges against frozen negatives; MRR and Hits@K");
  add_common(eval);

  auto* ablate = app.add_subcommand("ablate", "sweep k and oracle on/off; metric series and target probabilities");
  add_common(ablate);
  add_extra(ablate, "k-range", "k values, e.g. 1-10 or 1,2,4");
  add_extra(ablate, "oracle-modes", "subset of on,off");
  add_extra(ablate, "select-on", "evaluate on test or valid edges");
  add_extra(ablate, "amplitude-pairs", "positives recorded in amplitudes.csv (default 20)");

  auto* verify = app.add_subcommand("verify", "check walk identities on a graph catalog or an input graph");
  add_common(verify);
  add_extra(verify, "k-max", "largest walk length checked (1..5, default 4)");
  add_extra(verify, "max-nodes", "largest catalog graph (2..10, default 6)");
  add_extra(verify, "inject-fault", "perturb the operator to exercise the failure path (true/false)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Settings settings;
    if (!config_path.empty()) {
      settings = Settings::parse_file(config_path);
      resolve_config_paths(settings, std::filesystem::path(config_path).parent_path());
    }
    for (const auto& [opt, key] : option_keys) {
      if (opt->count() > 0) settings.set(key, flag_values[key]);
    }
    if (!pair_flags.empty()) {
      std::string joined;
      for (const auto& p : pair_flags) joined += (joined.empty() ? "" : ";") + p;
      settings.set("pair", joined);
    }
    Context ctx{std::move(settings), out, err};
    if (ingest->parsed()) return cmd_ingest(ctx);
    if (score->parsed()) return cmd_score(ctx);
    if (eval->parsed()) return cmd_eval(ctx);
    if (ablate->parsed()) return cmd_ablate(ctx);
    if (verify->parsed()) return cmd_verify(ctx);
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace qwalk::cli
