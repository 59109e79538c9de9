#include "sg/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace sg {

namespace {

// Successor sets over the union of all actions, deduplicated, ascending.
std::vector<std::vector<int>> union_adjacency(const StochasticGame& game) {
  std::vector<std::vector<int>> adj(game.num_states());
  for (int s = 0; s < game.num_states(); ++s) {
    for (const auto& act : game.states[s].actions) {
      for (const auto& tr : act.transitions) adj[s].push_back(tr.to);
    }
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  return adj;
}

// Kosaraju over an explicit node set. Components come back in no particular
// order; callers canonicalize. Nodes are visited in ascending index so the
// result is deterministic.
std::vector<std::vector<int>> scc_components(int n, const std::vector<int>& nodes,
                                             const std::vector<std::vector<int>>& adj) {
  std::vector<char> in_set(n, 0);
  for (int s : nodes) in_set[s] = 1;
  std::vector<std::vector<int>> radj(n);
  for (int s : nodes) {
    for (int t : adj[s]) {
      if (in_set[t]) radj[t].push_back(s);
    }
  }

  std::vector<char> seen(n, 0);
  std::vector<int> order;  // by finish time
  order.reserve(nodes.size());
  // Iterative DFS; the second stack entry index tracks progress per node.
  std::vector<std::pair<int, std::size_t>> stack;
  for (int root : nodes) {
    if (seen[root]) continue;
    seen[root] = 1;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      bool descended = false;
      while (i < adj[v].size()) {
        int w = adj[v][i++];
        if (in_set[w] && !seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
          descended = true;
          break;
        }
      }
      if (!descended && (stack.back().second >= adj[stack.back().first].size())) {
        order.push_back(stack.back().first);
        stack.pop_back();
      }
    }
  }

  std::vector<std::vector<int>> comps;
  std::vector<char> assigned(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (assigned[*it]) continue;
    std::vector<int> comp;
    std::deque<int> work{*it};
    assigned[*it] = 1;
    while (!work.empty()) {
      int v = work.front();
      work.pop_front();
      comp.push_back(v);
      for (int w : radj[v]) {
        if (!assigned[w]) {
          assigned[w] = 1;
          work.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

StatePartition compute_partition(const StochasticGame& game) {
  const int n = game.num_states();
  auto adj = union_adjacency(game);
  std::vector<std::vector<int>> radj(n);
  for (int s = 0; s < n; ++s) {
    for (int t : adj[s]) radj[t].push_back(s);
  }

  std::vector<char> canreach(n, 0);
  std::deque<int> work;
  for (int s = 0; s < n; ++s) {
    if (game.states[s].is_target) {
      canreach[s] = 1;
      work.push_back(s);
    }
  }
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    for (int w : radj[v]) {
      if (!canreach[w]) {
        canreach[w] = 1;
        work.push_back(w);
      }
    }
  }

  StatePartition part;
  part.klass.resize(n);
  for (int s = 0; s < n; ++s) {
    if (game.states[s].is_target) {
      part.klass[s] = StateClass::kTarget;
      part.targets.push_back(s);
    } else if (!canreach[s]) {
      part.klass[s] = StateClass::kSink;
      part.sinks.push_back(s);
    } else {
      part.klass[s] = StateClass::kUnknown;
      part.unknown.push_back(s);
    }
  }
  return part;
}

SccDecomposition sccs(const StochasticGame& game, const std::vector<int>& restrict_to) {
  const int n = game.num_states();
  auto adj = union_adjacency(game);
  auto comps = scc_components(n, restrict_to, adj);

  // Canonical order: reverse topological over the condensation, ties toward
  // the component containing the smallest state index.
  const int m = static_cast<int>(comps.size());
  std::vector<int> comp_of(n, -1);
  for (int c = 0; c < m; ++c) {
    for (int s : comps[c]) comp_of[s] = c;
  }
  std::vector<int> unemitted_succs(m, 0);
  std::vector<std::vector<int>> cpreds(m);
  for (int c = 0; c < m; ++c) {
    std::vector<int> succs;
    for (int s : comps[c]) {
      for (int t : adj[s]) {
        if (comp_of[t] >= 0 && comp_of[t] != c) succs.push_back(comp_of[t]);
      }
    }
    std::sort(succs.begin(), succs.end());
    succs.erase(std::unique(succs.begin(), succs.end()), succs.end());
    unemitted_succs[c] = static_cast<int>(succs.size());
    for (int d : succs) cpreds[d].push_back(c);
  }

  using Key = std::pair<int, int>;  // (min state index, component)
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> ready;
  for (int c = 0; c < m; ++c) {
    if (unemitted_succs[c] == 0) ready.emplace(comps[c].front(), c);
  }
  SccDecomposition out;
  out.component_of.assign(n, -1);
  while (!ready.empty()) {
    int c = ready.top().second;
    ready.pop();
    for (int s : comps[c]) out.component_of[s] = static_cast<int>(out.components.size());
    out.components.push_back(std::move(comps[c]));
    for (int p : cpreds[c]) {
      if (--unemitted_succs[p] == 0) ready.emplace(comps[p].front(), p);
    }
  }
  return out;
}

MecList mec_decomposition(const StochasticGame& game, const std::vector<int>& restrict_to) {
  const int n = game.num_states();
  MecList result;
  std::deque<std::vector<int>> work;
  std::vector<int> init = restrict_to;
  std::sort(init.begin(), init.end());
  if (!init.empty()) work.push_back(std::move(init));

  std::vector<char> in_T(n, 0);
  while (!work.empty()) {
    std::vector<int> T = std::move(work.front());
    work.pop_front();
    if (T.empty()) continue;
    for (int s : T) in_T[s] = 1;

    // Actions whose full support stays inside T; states keeping none cannot
    // be part of an end component within T.
    std::vector<std::vector<int>> retained(n);
    std::vector<int> kept;
    bool dropped_any = false;
    for (int s : T) {
      const auto& acts = game.states[s].actions;
      for (int a = 0; a < static_cast<int>(acts.size()); ++a) {
        bool inside = std::all_of(acts[a].transitions.begin(), acts[a].transitions.end(),
                                  [&](const Transition& tr) { return in_T[tr.to]; });
        if (inside) retained[s].push_back(a);
      }
      if (retained[s].empty()) {
        dropped_any = true;
      } else {
        kept.push_back(s);
      }
    }
    for (int s : T) in_T[s] = 0;

    if (dropped_any) {
      if (!kept.empty()) work.push_back(std::move(kept));
      continue;
    }

    std::vector<std::vector<int>> adj(n);
    for (int s : T) {
      for (int a : retained[s]) {
        for (const auto& tr : game.states[s].actions[a].transitions) adj[s].push_back(tr.to);
      }
      std::sort(adj[s].begin(), adj[s].end());
      adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
    }
    auto comps = scc_components(n, T, adj);
    if (comps.size() == 1) {
      Mec mec;
      mec.states = std::move(comps[0]);
      for (int s : mec.states) mec.actions.push_back(std::move(retained[s]));
      result.push_back(std::move(mec));
    } else {
      for (auto& comp : comps) work.push_back(std::move(comp));
    }
  }

  std::sort(result.begin(), result.end(),
            [](const Mec& a, const Mec& b) { return a.states.front() < b.states.front(); });
  return result;
}

InducedSubgame induced_subgame(const StochasticGame& game, const std::vector<int>& removed) {
  const int n = game.num_states();
  InducedSubgame out;
  out.present.assign(n, 1);
  out.actions.resize(n);
  for (int s : removed) out.present[s] = 0;
  for (int s = 0; s < n; ++s) {
    if (!out.present[s]) continue;
    const auto& acts = game.states[s].actions;
    for (int a = 0; a < static_cast<int>(acts.size()); ++a) {
      bool ok = std::all_of(acts[a].transitions.begin(), acts[a].transitions.end(),
                            [&](const Transition& tr) { return out.present[tr.to]; });
      if (ok) out.actions[s].push_back(a);
    }
  }
  return out;
}

std::vector<int> reachable_from(const StochasticGame& game, int s) {
  auto adj = union_adjacency(game);
  std::vector<char> seen(game.num_states(), 0);
  std::deque<int> work{s};
  seen[s] = 1;
  std::vector<int> out;
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    out.push_back(v);
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        work.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sg
