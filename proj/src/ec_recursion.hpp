#pragma once

#include <utility>
#include <vector>

#include "sg/graph.hpp"

// Shared between the solver (exit forcing, trap removal) and bounded value
// iteration (upper-bound deflation): the recursive decomposition of an end
// component by its value-best Maximizer exits.

namespace sg::detail {

struct EcNode {
  std::vector<int> states;                 // an end component, ascending
  std::vector<std::pair<int, int>> exits;  // f-maximal Maximizer exits (all ties)
  std::vector<std::pair<int, int>> all_exits;  // every Maximizer exit of the component
  double exit_value = 0;
  bool trap = false;                       // no Maximizer exit at all: value 0
};

// Emits the node for `candidate` (an end component), then removes the
// best-exit states and recurses into the maximal end components of the
// remainder. Exits are judged in the full game: any action whose support
// leaves the candidate set. `in_y` is scratch, all-zero on entry and exit.
void best_exit_recursion(const StochasticGame& game, const std::vector<double>& f,
                         const std::vector<int>& candidate, std::vector<char>& in_y,
                         std::vector<EcNode>& out);

// Runs the recursion on what is left of each maximal end component after
// earlier trap removals (states outside the unknown class are dropped, and
// the remainder re-decomposed if it shrank).
std::vector<EcNode> collect_ec_nodes(const StochasticGame& game, const std::vector<double>& f,
                                     const MecList& mecs, const StatePartition& part);

}  // namespace sg::detail
