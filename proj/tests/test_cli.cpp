#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "treespark/cli.hpp"
#include "treespark/version.hpp"

using namespace treespark;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("treespark_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Scoped TREESPARK_SEED override.
struct SeedEnv {
  explicit SeedEnv(const char* v) {
    if (v) setenv("TREESPARK_SEED", v, 1);
    else unsetenv("TREESPARK_SEED");
  }
  ~SeedEnv() { unsetenv("TREESPARK_SEED"); }
};

}  // namespace

TEST_CASE("sample is deterministic and seed dependent") {
  SeedEnv env(nullptr);
  const auto a = run({"sample", "--graph", "k:6", "--count", "4", "--seed", "3"});
  const auto b = run({"sample", "--graph", "k:6", "--count", "4", "--seed", "3"});
  const auto c = run({"sample", "--graph", "k:6", "--count", "4", "--seed", "4"});
  CHECK(a.code == kExitPass);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 4);
}

TEST_CASE("TREESPARK_SEED supplies the default seed") {
  std::string with_env, explicit_seed;
  {
    SeedEnv env("9");
    with_env = run({"sample", "--graph", "k:6", "--count", "2"}).out;
  }
  explicit_seed = run({"sample", "--graph", "k:6", "--count", "2", "--seed", "9"}).out;
  CHECK(with_env == explicit_seed);
  {
    SeedEnv env("nine");
    const auto r = run({"sample", "--graph", "k:6"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("TREESPARK_SEED") != std::string::npos);
  }
}

TEST_CASE("json envelope") {
  SeedEnv env(nullptr);
  const auto r = run({"--json", "--seed", "5", "sample", "--graph", "ring:5", "--count", "2", "--weights", "inverse-leverage"});
  REQUIRE(r.code == kExitPass);
  CHECK(r.err.empty());
  const json j = json::parse(r.out);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["version"] == kVersion);
  CHECK(j["config"]["seed"] == 5);
  CHECK(j["config"]["command"] == "sample");
  CHECK(j["config"]["weights"] == "inverse-leverage");
  CHECK(j["wall_clock_seconds"].get<double>() >= 0.0);
  CHECK(j["report"]["kind"] == "sample");
  CHECK(j["report"]["trees"].size() == 2);
}

TEST_CASE("certify exit codes and side files") {
  const std::string out = temp_path("certify.json");
  const std::string csv = temp_path("certify.csv");
  const auto pass = run({"--json", "--seed", "1", "--out", out, "certify", "--graph", "k:40", "--eps", "0.5", "--cmult",
                         "1", "--trials", "4", "--csv", csv});
  CHECK(pass.code == kExitPass);
  CHECK(pass.out.empty());
  const json j = json::parse(slurp(out));
  CHECK(j["report"]["kind"] == "sum_trees");
  CHECK(j["report"]["per_trial"].size() == 4);
  const std::string table = slurp(csv);
  CHECK(table.rfind("trial,seed,lambda_min_pos,lambda_max,within\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 5);
  std::filesystem::remove(out);
  std::filesystem::remove(csv);

  const auto fail = run({"certify", "--graph", "k:40", "--eps", "0.5", "--t", "1", "--trials", "3"});
  CHECK(fail.code == kExitGateFail);
  CHECK(fail.err.find("FAIL") != std::string::npos);

  CHECK(run({"certify", "--graph", "k:40", "--eps", "0.5"}).code == kExitUsage);
  CHECK(run({"certify", "--graph", "k:40", "--eps", "0.5", "--t", "3", "--cmult", "1"}).code == kExitUsage);
  CHECK(run({"certify", "--graph", "k:40", "--eps", "1.5", "--t", "3"}).code == kExitUsage);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"sample"}).code == kExitUsage);
  CHECK(run({"sample", "--graph", "k:4", "--count", "0"}).code == kExitUsage);
  CHECK(run({"sample", "--graph", "k:4", "--weights", "heavy"}).code == kExitUsage);
  CHECK(run({"sample", "--graph", "/nonexistent/graph.txt"}).code == kExitUsage);
  CHECK(run({"sample", "--graph", "k:4", "--bogus"}).code == kExitUsage);
  CHECK(run({"--jobs", "-1", "sample", "--graph", "k:4"}).code == kExitUsage);
  CHECK(run({"--out", "/nonexistent/dir/x.json", "sample", "--graph", "k:4"}).code == kExitUsage);
  CHECK(run({"--version"}).code == kExitPass);
}

TEST_CASE("invalid graphs") {
  const std::string path = temp_path("disconnected.txt");
  {
    std::ofstream f(path);
    f << "4 2\n0 1 1\n2 3 1\n";
  }
  const auto r = run({"sample", "--graph", path});
  CHECK(r.code == kExitGraphInvalid);
  CHECK(r.err.find("graph invalid") != std::string::npos);
  {
    std::ofstream f(path);
    f << "3 2\n0 1 1\n1 2 -1\n";
  }
  CHECK(run({"sample", "--graph", path}).code == kExitGraphInvalid);
  std::filesystem::remove(path);
}

TEST_CASE("size guards") {
  CHECK(run({"diag", "marginals", "--graph", "k:6"}).code == kExitSizeGuard);
  CHECK(run({"diag", "martingale", "--graph", "k:13"}).code == kExitSizeGuard);
}

TEST_CASE("diagnostics") {
  const auto m = run({"--json", "diag", "marginals", "--graph", th::corpus("bowtie.txt")});
  CHECK(m.code == kExitPass);
  CHECK(json::parse(m.out)["report"]["violations"] == 0);

  const std::string dump = temp_path("trace.txt");
  const auto t = run({"--json", "diag", "martingale", "--graph", "k:5", "--seeds", "3", "--dump", dump});
  CHECK(t.code == kExitPass);
  const std::string lines = slurp(dump);
  CHECK(std::count(lines.begin(), lines.end(), '\n') >= 3 * 4);
  std::filesystem::remove(dump);

  CHECK(run({"--json", "diag", "reverse-chernoff", "--k", "1000", "--p", "0.1", "--eps", "0.2"}).code == kExitPass);
  CHECK(run({"--json", "diag", "reverse-chernoff", "--k", "10", "--p", "0.1", "--eps", "0.2"}).code == kExitUsage);
  CHECK(run({"--json", "diag", "reverse-chernoff", "--grid", "huge"}).code == kExitUsage);
  CHECK(run({"--json", "diag", "stirling", "--kmax", "40"}).code == kExitPass);
  CHECK(run({"--json", "diag", "matrix-fact", "--pairs", "50", "--dim", "6"}).code == kExitPass);
  CHECK(run({"--json", "diag", "tail-envelope", "--graph", "k:6", "--samples", "200"}).code == kExitPass);
}

TEST_CASE("experiments through the cli") {
  CHECK(run({"--json", "experiment", "single-upper", "--graph", "k:30", "--trials", "3"}).code == kExitPass);
  CHECK(run({"--json", "experiment", "thin-tree", "--graph", "ring:8", "--trials", "3"}).code == kExitPass);
  CHECK(run({"--json", "experiment", "thin-tree", "--graph", th::corpus("path5.txt")}).code == kExitUsage);
  CHECK(run({"--json", "experiment", "multi-lower", "--cliques", "1", "--size", "4", "--eps", "0.4"}).code ==
        kExitUsage);
  const auto nw = run({"--json", "experiment", "multi-lower", "--cliques", "1", "--size", "4", "--eps", "0.4",
                       "--no-window", "--trials", "8"});
  CHECK((nw.code == kExitPass || nw.code == kExitGateFail));
  CHECK(json::parse(nw.out)["config"]["enforce_window"] == false);
  CHECK(run({"--json", "experiment", "single-lower", "--cliques", "2", "--size", "10", "--trials", "20"}).code ==
        kExitPass);
  CHECK(run({"--json", "experiment", "degree", "--n", "8", "--samples", "4000"}).code == kExitPass);
  CHECK(run({"--json", "experiment", "degree", "--n", "2", "--samples", "10"}).code == kExitUsage);
  CHECK(run({"--json", "experiment", "trend", "--graph", "k:30", "--eps", "0.5", "--t", "4", "--trials", "4"}).code ==
        kExitPass);
}

TEST_CASE("graph command round trips") {
  const auto r = run({"graph", "--graph", "cliquestar:2,3"});
  REQUIRE(r.code == kExitPass);
  std::istringstream in(r.out);
  const WeightedGraph g = read_graph(in);
  CHECK(g.num_vertices() == 5);
  CHECK(g.num_edges() == 6);
}
