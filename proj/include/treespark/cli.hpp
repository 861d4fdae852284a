#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace treespark {

// Exit codes are stable API.
enum ExitCode : int {
  kExitPass = 0,
  kExitGateFail = 1,
  kExitUsage = 2,
  kExitGraphInvalid = 3,
  kExitSizeGuard = 4,
};

// Everything a run was invoked with. Embedded verbatim in every report.
struct RunConfig {
  std::string command;
  std::string graph;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::size_t trials = 10;
  std::size_t seeds = 1;
  double eps = 0.0;
  std::size_t t = 0;
  double c_mult = 0.0;
  double gate = 0.0;
  std::size_t num_cliques = 0;
  std::size_t clique_size = 0;
  std::size_t n = 0;
  std::size_t samples = 0;
  std::uint64_t k = 0;
  double p = 0.0;
  std::string grid;
  std::string weights = "original";
  bool enforce_window = true;
  int degree_threshold = 7;
  std::size_t pairs = 0;
  std::size_t dim = 0;
  std::size_t kmax = 0;
  std::string out;
  std::string csv;
  std::string dump;
  bool json_only = false;
  int jobs = 0;
};

nlohmann::json to_json(const RunConfig& c);

// Parses argv and runs one command. Reports go to `out` (or --out), human
// status lines to `err` unless --json is given.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treespark
