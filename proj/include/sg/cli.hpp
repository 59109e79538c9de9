#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "sg/solver.hpp"

namespace sg {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitMaxIterations = 2;
inline constexpr int kExitHarnessFailure = 3;

struct RunConfig {
  std::string model_path;
  std::string algorithm = "svi";  // svi | svi-topo | bvi | vi | oracle
  double epsilon = 1e-6;
  StoppingCriterion stopping = StoppingCriterion::kAbsolute;
  bool ec_handling = true;
  bool topological = false;
  std::int64_t max_iterations = 10'000'000;
  std::string trace_path;  // empty = no trace
  std::uint64_t seed = 1;  // harness only
  int n = 100;             // harness only
  std::string algs = "svi,bvi,vi";  // compare only
};

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_inspect(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_harness(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// argv-level entry used by the binary; parses into RunConfig and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sg
