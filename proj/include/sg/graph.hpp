#pragma once

#include <vector>

#include "sg/model.hpp"

namespace sg {

enum class StateClass { kTarget, kSink, kUnknown };

// Disjoint cover of the state space: targets F, sinks Z (no path to F under
// any strategy pair), unknown Sq (the rest). Sinks are a graph property, so
// membership never depends on probabilities, only on edge presence.
struct StatePartition {
  std::vector<StateClass> klass;  // per state
  std::vector<int> targets;       // ascending
  std::vector<int> sinks;         // ascending
  std::vector<int> unknown;       // ascending
};

StatePartition compute_partition(const StochasticGame& game);

// Strongly connected components of the union graph (edges from every action
// of every player), restricted to `restrict_to`. Components are listed in
// reverse topological order (successors first); ties between independent
// components break toward the smaller minimum contained state index. Each
// component's states are ascending.
struct SccDecomposition {
  std::vector<std::vector<int>> components;
  std::vector<int> component_of;  // per state; -1 outside restrict_to
};

SccDecomposition sccs(const StochasticGame& game, const std::vector<int>& restrict_to);

// A maximal end component: states plus, per state, the actions whose full
// support stays inside the component. Every state retains at least one
// action and the retained-edge graph is strongly connected.
struct Mec {
  std::vector<int> states;                 // ascending
  std::vector<std::vector<int>> actions;   // parallel to states, ascending
};
using MecList = std::vector<Mec>;

// Maximal end components contained in `restrict_to`, ordered by minimum
// state index.
MecList mec_decomposition(const StochasticGame& game, const std::vector<int>& restrict_to);

// View of the game after deleting `removed` states: per remaining state, the
// actions whose support avoids every removed state.
struct InducedSubgame {
  std::vector<char> present;               // per state
  std::vector<std::vector<int>> actions;   // per state, ascending; empty if absent
};

InducedSubgame induced_subgame(const StochasticGame& game, const std::vector<int>& removed);

// States reachable from s over union edges, ascending, including s.
std::vector<int> reachable_from(const StochasticGame& game, int s);

}  // namespace sg
