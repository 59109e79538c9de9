#include "sg/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "ec_recursion.hpp"

namespace sg {

namespace {

double action_value(const StochasticGame& game, const std::vector<double>& v, int s, int a) {
  double acc = 0;
  for (const auto& tr : game.states[s].actions[a].transitions) acc += tr.prob_num * v[tr.to];
  return acc;
}

// Owner's Bellman optimum over v at s; ties to the lowest index.
std::pair<double, int> bellman_opt(const StochasticGame& game, const std::vector<double>& v,
                                   int s) {
  const bool maxer = game.states[s].owner == Owner::kMax;
  const auto& acts = game.states[s].actions;
  double best = action_value(game, v, s, 0);
  int arg = 0;
  for (int a = 1; a < static_cast<int>(acts.size()); ++a) {
    double val = action_value(game, v, s, a);
    if (maxer ? val > best : val < best) {
      best = val;
      arg = a;
    }
  }
  return {best, arg};
}

}  // namespace

BaselineResult run_vi(const StochasticGame& game, const SolveOptions& opts) {
  StatePartition part = compute_partition(game);
  const int n = game.num_states();
  std::vector<double> lower(n, 0.0);
  for (int s : part.targets) lower[s] = 1.0;
  std::vector<double> next = lower;
  std::vector<int> arg(n, -1);

  BaselineResult res;
  res.algorithm = "vi";
  res.epsilon = opts.epsilon;
  res.status = SolveStatus::kMaxIterations;
  while (res.iterations < opts.max_iterations) {
    ++res.iterations;
    double change = 0;
    for (int s : part.unknown) {
      auto [val, a] = bellman_opt(game, lower, s);
      next[s] = val;
      arg[s] = a;
      change = std::max(change, std::abs(val - lower[s]));
    }
    std::swap(lower, next);
    if (opts.trace) {
      for (int s : part.unknown) {
        res.trace.push_back({res.iterations, s, game.states[s].actions[arg[s]].label, lower[s],
                             std::nullopt});
      }
    }
    // Stops on a small step, which certifies nothing; see header.
    if (change < opts.epsilon) {
      res.status = SolveStatus::kConverged;
      break;
    }
  }

  res.values = lower;
  res.lower = std::move(lower);
  res.upper.assign(n, std::nullopt);
  res.actions.assign(n, "");
  for (int s : part.unknown) {
    if (arg[s] >= 0) res.actions[s] = game.states[s].actions[arg[s]].label;
  }
  return res;
}

BaselineResult run_bvi(const StochasticGame& game, const SolveOptions& opts) {
  StatePartition part = compute_partition(game);
  const int n = game.num_states();
  std::vector<double> lower(n, 0.0), upper(n, 1.0);
  for (int s : part.targets) lower[s] = 1.0;
  for (int s : part.sinks) upper[s] = 0.0;
  std::vector<double> next_lower = lower, next_upper = upper;
  std::vector<int> arg(n, -1);

  MecList mecs = mec_decomposition(game, part.unknown);

  BaselineResult res;
  res.algorithm = "bvi";
  res.epsilon = opts.epsilon;
  res.status = SolveStatus::kMaxIterations;
  while (res.iterations < opts.max_iterations) {
    ++res.iterations;
    for (int s : part.unknown) {
      auto [lo, la] = bellman_opt(game, lower, s);
      next_lower[s] = lo;
      auto [hi, ha] = bellman_opt(game, upper, s);
      next_upper[s] = hi;
      arg[s] = game.states[s].owner == Owner::kMax ? la : ha;
    }
    std::swap(lower, next_lower);
    std::swap(upper, next_upper);

    // Deflate: inside an end component the plain upper iterate is a fixpoint
    // at 1, so cap every member by the component's best exit. Trap
    // components (no Maximizer exit) drop to exactly 0.
    for (const detail::EcNode& node : detail::collect_ec_nodes(game, upper, mecs, part)) {
      if (node.trap) {
        for (int s : node.states) upper[s] = 0.0;
      } else {
        for (int s : node.states) upper[s] = std::min(upper[s], node.exit_value);
      }
    }

    if (opts.trace) {
      for (int s : part.unknown) {
        res.trace.push_back({res.iterations, s, game.states[s].actions[arg[s]].label, lower[s],
                             upper[s]});
      }
    }
    double width = 0;
    for (int s : part.unknown) width = std::max(width, upper[s] - lower[s]);
    if (width < 2.0 * opts.epsilon) {
      res.status = SolveStatus::kConverged;
      break;
    }
  }

  res.values.resize(n);
  res.upper.resize(n);
  res.actions.assign(n, "");
  for (int s = 0; s < n; ++s) {
    res.values[s] = (lower[s] + upper[s]) / 2.0;
    res.upper[s] = upper[s];
  }
  for (int s : part.unknown) {
    if (arg[s] >= 0) res.actions[s] = game.states[s].actions[arg[s]].label;
  }
  res.lower = std::move(lower);
  return res;
}

}  // namespace sg
