#include "ec_recursion.hpp"

#include <algorithm>

namespace sg::detail {

void best_exit_recursion(const StochasticGame& game, const std::vector<double>& f,
                         const std::vector<int>& candidate, std::vector<char>& in_y,
                         std::vector<EcNode>& out) {
  for (int s : candidate) in_y[s] = 1;

  // Exits live in the full game: any Maximizer action with support leaving
  // the candidate set, valued on f. Ties all win.
  double best = 0;
  bool have = false;
  std::vector<std::pair<int, int>> winners;
  std::vector<std::pair<int, int>> all_exits;
  for (int s : candidate) {
    if (game.states[s].owner != Owner::kMax) continue;
    const auto& acts = game.states[s].actions;
    for (int a = 0; a < static_cast<int>(acts.size()); ++a) {
      bool leaves = std::any_of(acts[a].transitions.begin(), acts[a].transitions.end(),
                                [&](const Transition& tr) { return !in_y[tr.to]; });
      if (!leaves) continue;
      all_exits.emplace_back(s, a);
      double v = 0;
      for (const auto& tr : acts[a].transitions) v += tr.prob_num * f[tr.to];
      if (!have || v > best) {
        best = v;
        winners.assign(1, {s, a});
        have = true;
      } else if (v == best) {
        winners.emplace_back(s, a);
      }
    }
  }
  for (int s : candidate) in_y[s] = 0;

  if (!have) {
    EcNode node;
    node.states = candidate;
    node.trap = true;
    out.push_back(std::move(node));
    return;
  }

  EcNode node;
  node.states = candidate;
  node.exits = winners;
  node.all_exits = std::move(all_exits);
  node.exit_value = best;
  out.push_back(std::move(node));

  std::vector<char> is_winner(game.num_states(), 0);
  for (const auto& [s, a] : winners) is_winner[s] = 1;
  std::vector<int> rest;
  for (int s : candidate) {
    if (!is_winner[s]) rest.push_back(s);
  }
  if (rest.empty()) return;
  for (const Mec& m : mec_decomposition(game, rest)) {
    best_exit_recursion(game, f, m.states, in_y, out);
  }
}

std::vector<EcNode> collect_ec_nodes(const StochasticGame& game, const std::vector<double>& f,
                                     const MecList& mecs, const StatePartition& part) {
  std::vector<EcNode> nodes;
  std::vector<char> in_y(game.num_states(), 0);
  for (const Mec& m : mecs) {
    // States trapped on earlier iterations have left the unknown class; what
    // remains of the component may have split, so re-decompose defensively.
    std::vector<int> y;
    for (int s : m.states) {
      if (part.klass[s] == StateClass::kUnknown) y.push_back(s);
    }
    if (y.empty()) continue;
    if (y.size() == m.states.size()) {
      best_exit_recursion(game, f, y, in_y, nodes);
    } else {
      for (const Mec& mm : mec_decomposition(game, y)) {
        best_exit_recursion(game, f, mm.states, in_y, nodes);
      }
    }
  }
  return nodes;
}

}  // namespace sg::detail
