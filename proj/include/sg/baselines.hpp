#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sg/solver.hpp"

namespace sg {

struct BaselineTraceRow {
  std::int64_t k = 0;
  int state = 0;
  std::string action;
  double lower = 0;
  std::optional<double> upper;  // absent for plain value iteration
};

struct BaselineResult {
  std::string algorithm;  // "vi" or "bvi"
  SolveStatus status = SolveStatus::kConverged;
  std::int64_t iterations = 0;
  double epsilon = 0;
  std::vector<double> values;
  std::vector<double> lower;
  std::vector<std::optional<double>> upper;  // engaged for bvi only
  std::vector<std::string> actions;
  std::vector<BaselineTraceRow> trace;
};

// Plain value iteration from below, stopping when the max-norm change drops
// under epsilon. Fast, but the stopping criterion certifies nothing: the
// reported value can still be epsilon-far (or worse) from the true one.
BaselineResult run_vi(const StochasticGame& game, const SolveOptions& opts);

// Bounded value iteration: lower and upper iterates, the upper sequence
// deflated through the best-exit recursion every iteration so end components
// cannot pin it at 1. Stops when max (U - L) < 2*epsilon; midpoint is then
// epsilon-precise.
BaselineResult run_bvi(const StochasticGame& game, const SolveOptions& opts);

}  // namespace sg
