#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qwalk/cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = QWALK_FIXTURES;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run qwalk_run(std::vector<std::string> args) {
  args.insert(args.begin(), "qwalk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qwalk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("qwalk-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(Cli, ScoreSingleEdgeGolden) {
  auto dir = scratch("score-edge");
  auto edge = dir / "edge.txt";
  fs::create_directories(dir);
  std::ofstream(edge) << "0 1\n";
  auto r = qwalk_run({"score", "--edges", edge.string(), "--pair", "0,1", "--k", "1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = load_json(dir / "scores.json");
  EXPECT_EQ(j["scores"]["0,1"].get<double>(), 4.0);
  auto csv = slurp(dir / "scores.csv");
  EXPECT_EQ(csv.rfind("# tool=qwalk", 0), 0u);
  EXPECT_NE(csv.find("source,target,score\n0,1,4\n"), std::string::npos);
}

TEST(Cli, ScoreResourceAllocation) {
  auto dir = scratch("score-ra");
  auto r = qwalk_run({"score", "--edges", kFixtures + "/path3.txt", "--pair", "0,2", "--scorer", "ra", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(dir / "scores.json")["scores"]["0,2"].get<double>(), 0.5);
}

TEST(Cli, MissingEdgeFileIsUsageError) {
  auto r = qwalk_run({"score", "--edges", "/no/such/edges.txt", "--pair", "0,1", "--out", scratch("missing").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/no/such/edges.txt"), std::string::npos);
}

TEST(Cli, BadArgumentsAreUsageErrors) {
  EXPECT_EQ(qwalk_run({}).code, 2);
  EXPECT_EQ(qwalk_run({"frobnicate"}).code, 2);
  EXPECT_EQ(qwalk_run({"score", "--edges", kFixtures + "/path3.txt", "--pair", "0,1", "--k", "40", "--out",
                       scratch("bad-k").string()}).code, 2);
  EXPECT_EQ(qwalk_run({"score", "--edges", kFixtures + "/malformed.txt", "--pair", "0,1", "--out",
                       scratch("malformed").string()}).code, 2);
  EXPECT_EQ(qwalk_run({"--help"}).code, 0);
}

TEST(Cli, IngestRoundTrip) {
  auto dir = scratch("ingest");
  auto r = qwalk_run({"ingest", "--edges", kFixtures + "/sparse_ids.txt", "--relabel", "true", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto stats = load_json(dir / "ingest.json");
  EXPECT_EQ(stats["nodes"].get<int>(), 4);
  EXPECT_EQ(stats["edges"].get<int>(), 4);
  auto scored = qwalk_run({"score", "--graph", (dir / "graph.qwg").string(), "--id-map", (dir / "id_map.txt").string(),
                           "--pair", "0,1", "--out", (dir / "s").string()});
  EXPECT_EQ(scored.code, 0) << scored.err;
}

TEST(Cli, EvalIsDeterministicAndSharesNegatives) {
  auto a = scratch("eval-a"), b = scratch("eval-b");
  const std::string cfg = kFixtures + "/eval.toml";
  ASSERT_EQ(qwalk_run({"eval", "--config", cfg, "--out", a.string()}).code, 0);
  ASSERT_EQ(qwalk_run({"eval", "--config", cfg, "--out", b.string()}).code, 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
  }
  auto q = load_json(a / "eval-quantum-k-2-oracle-on-scheme-uniform.json");
  auto cn = load_json(a / "eval-cn.json");
  ASSERT_EQ(q["queries"].size(), cn["queries"].size());
  for (std::size_t i = 0; i < q["queries"].size(); ++i) {
    EXPECT_EQ(q["queries"][i]["neg_hash"], cn["queries"][i]["neg_hash"]);
  }
  EXPECT_EQ(q["seed"].get<int>(), 7);
  EXPECT_EQ(q["tie_policy"], "average");
  EXPECT_TRUE(q["metrics"]["hits"].contains("10"));
}

TEST(Cli, FlagsOverrideConfig) {
  auto a = scratch("eval-override");
  ASSERT_EQ(qwalk_run({"eval", "--config", kFixtures + "/eval.toml", "--scorer", "cn", "--seed", "8", "--out", a.string()}).code, 0);
  EXPECT_TRUE(fs::exists(a / "eval-cn.json"));
  EXPECT_FALSE(fs::exists(a / "eval-ra.json"));
  EXPECT_EQ(load_json(a / "eval-cn.json")["seed"].get<int>(), 8);
  EXPECT_NE(slurp(a / "config.echo.txt").find("seed=8"), std::string::npos);
}

TEST(Cli, AblateGridShape) {
  auto dir = scratch("ablate");
  auto r = qwalk_run({"ablate", "--edges", kFixtures + "/karate.txt", "--k-range", "1-5", "--seed", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir / "ablation.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("k,", 0) != 0) ++rows;
  }
  EXPECT_EQ(rows, 10);
  auto j = load_json(dir / "ablation.json");
  EXPECT_EQ(j["cells"].size(), 10u);
  EXPECT_TRUE(fs::exists(dir / "amplitudes.csv"));
}

TEST(Cli, AblateOnValidation) {
  auto dir = scratch("ablate-valid");
  auto r = qwalk_run({"ablate", "--edges", kFixtures + "/karate.txt", "--k-range", "1,2", "--select-on", "valid",
                      "--split", "70/15/15", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(dir / "ablation.json")["evaluated_on"], "valid");
}

TEST(Cli, VerifyCatalogPasses) {
  auto dir = scratch("verify");
  auto r = qwalk_run({"verify", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  auto j = load_json(dir / "verify.json");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_LE(j["path_sum_max_residual"].get<double>(), 1e-9);
  bool saw_bipartite = false;
  for (const auto& g : j["graphs"]) {
    if (g["graph"].get<std::string>().rfind("bipartite-", 0) == 0 && g["scheme"] == "uniform") {
      saw_bipartite = true;
      EXPECT_FALSE(g["bound_assumption_ok"].get<bool>());
      EXPECT_TRUE(g["passed"].get<bool>());
    }
  }
  EXPECT_TRUE(saw_bipartite);
}

TEST(Cli, VerifyFaultInjectionFails) {
  auto r = qwalk_run({"verify", "--inject-fault", "true", "--out", scratch("verify-fault").string()});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, VerifyIsDeterministic) {
  auto a = scratch("verify-a"), b = scratch("verify-b");
  ASSERT_EQ(qwalk_run({"verify", "--max-nodes", "5", "--out", a.string()}).code, 0);
  ASSERT_EQ(qwalk_run({"verify", "--max-nodes", "5", "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "verify.json"), slurp(b / "verify.json"));
}

TEST(Cli, UnknownDatasetWarnsAndUsesDefault) {
  auto dir = scratch("dataset");
  auto r = qwalk_run({"score", "--edges", kFixtures + "/path3.txt", "--pair", "0,2", "--dataset", "mystery", "--out", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("unknown dataset"), std::string::npos);
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = QWALK_CLI_PATH;
  EXPECT_EQ(std::system((exe + " score --edges /no/such/file --pair 0,1 >/dev/null 2>&1").c_str()) >> 8, 2);
  EXPECT_EQ(std::system((exe + " verify --max-nodes 3 --out " + scratch("exe").string() + " >/dev/null").c_str()) >> 8, 0);
}
