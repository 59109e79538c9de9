#include "sg/oracle.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace sg {

namespace {

// Exact reachability values for the chain induced by choice[] (one action
// index per state). States that cannot reach a target under the chosen
// edges get 0 outright, so the remaining linear system is non-singular.
std::vector<Rational> solve_choice(const StochasticGame& game, const std::vector<int>& choice) {
  const int n = game.num_states();
  std::vector<std::vector<int>> radj(n);
  for (int s = 0; s < n; ++s) {
    if (game.states[s].is_target) continue;
    for (const auto& tr : game.states[s].actions[choice[s]].transitions) {
      radj[tr.to].push_back(s);
    }
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

  std::vector<int> unknown;
  std::vector<int> pos(n, -1);
  for (int s = 0; s < n; ++s) {
    if (!game.states[s].is_target && canreach[s]) {
      pos[s] = static_cast<int>(unknown.size());
      unknown.push_back(s);
    }
  }

  const int m = static_cast<int>(unknown.size());
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
  std::vector<Rational> b(m, Rational(0));
  for (int i = 0; i < m; ++i) {
    int s = unknown[i];
    a[i][i] = 1;
    for (const auto& tr : game.states[s].actions[choice[s]].transitions) {
      if (game.states[tr.to].is_target) {
        b[i] += tr.prob;
      } else if (pos[tr.to] >= 0) {
        a[i][pos[tr.to]] -= tr.prob;
      }
      // Successors that cannot reach a target contribute exactly 0.
    }
  }

  // Gaussian elimination, first non-zero pivot; exact arithmetic needs no
  // pivoting strategy beyond non-singularity.
  for (int col = 0; col < m; ++col) {
    int pivot = -1;
    for (int r = col; r < m; ++r) {
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::logic_error("reachability system is singular");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < m; ++r) {
      if (a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (int c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(m);
  for (int r = m - 1; r >= 0; --r) {
    Rational acc = b[r];
    for (int c = r + 1; c < m; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }

  std::vector<Rational> out(n, Rational(0));
  for (int s = 0; s < n; ++s) {
    if (game.states[s].is_target) {
      out[s] = 1;
    } else if (pos[s] >= 0) {
      out[s] = x[pos[s]];
    }
  }
  return out;
}

struct ProfileSpace {
  std::vector<int> states;   // owner's states, ascending
  std::vector<long> stride;  // mixed radix, first state most significant
  long count = 1;

  explicit ProfileSpace(const StochasticGame& game, Owner owner) {
    for (int s = 0; s < game.num_states(); ++s) {
      if (game.states[s].owner == owner && !game.states[s].is_target) states.push_back(s);
    }
    stride.assign(states.size(), 1);
    for (int i = static_cast<int>(states.size()) - 1; i >= 0; --i) {
      stride[i] = count;
      count *= static_cast<long>(game.states[states[i]].actions.size());
    }
  }

  // Decodes profile `idx` into choice[]; ascending idx is lexicographic
  // order over (action at smallest state, ...).
  void assign(long idx, const StochasticGame& game, std::vector<int>& choice) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
      long radix = static_cast<long>(game.states[states[i]].actions.size());
      choice[states[i]] = static_cast<int>((idx / stride[i]) % radix);
    }
  }
};

}  // namespace

std::vector<Rational> mc_reach(const StochasticGame& chain) {
  for (int s = 0; s < chain.num_states(); ++s) {
    if (chain.states[s].actions.size() != 1) {
      throw std::invalid_argument("state " + std::to_string(s) + " has " +
                                  std::to_string(chain.states[s].actions.size()) +
                                  " actions, expected exactly 1");
    }
  }
  return solve_choice(chain, std::vector<int>(chain.num_states(), 0));
}

ExactValues exact_value(const StochasticGame& game) {
  const int n = game.num_states();
  double space = 1;
  for (const auto& st : game.states) {
    if (!st.is_target) space *= static_cast<double>(st.actions.size());
  }
  if (space > 1e6) {
    throw std::invalid_argument("strategy profile space exceeds 10^6, refusing to enumerate");
  }

  ProfileSpace max_space(game, Owner::kMax);
  ProfileSpace min_space(game, Owner::kMin);

  std::vector<int> choice(n, 0);
  std::vector<Rational> maxmin(n, Rational(0));
  std::vector<int> max_witness_profile(n, -1);  // per Max state: first optimal sigma's action
  bool first_sigma = true;

  for (long si = 0; si < max_space.count; ++si) {
    max_space.assign(si, game, choice);
    std::vector<Rational> inner_min;
    bool first_tau = true;
    for (long ti = 0; ti < min_space.count; ++ti) {
      min_space.assign(ti, game, choice);
      auto x = solve_choice(game, choice);
      if (first_tau) {
        inner_min = x;
        first_tau = false;
      } else {
        for (int s = 0; s < n; ++s) {
          if (x[s] < inner_min[s]) inner_min[s] = x[s];
        }
      }
    }
    for (int s = 0; s < n; ++s) {
      if (first_sigma || inner_min[s] > maxmin[s]) {
        maxmin[s] = inner_min[s];
        if (game.states[s].owner == Owner::kMax && !game.states[s].is_target) {
          max_witness_profile[s] = choice[s];  // min_space.assign leaves Max digits intact
        }
      }
    }
    first_sigma = false;
  }

  std::vector<Rational> minmax(n, Rational(0));
  std::vector<int> min_witness_profile(n, -1);
  bool first_tau_outer = true;
  for (long ti = 0; ti < min_space.count; ++ti) {
    min_space.assign(ti, game, choice);
    std::vector<Rational> inner_max;
    bool first_sig = true;
    for (long si = 0; si < max_space.count; ++si) {
      max_space.assign(si, game, choice);
      auto x = solve_choice(game, choice);
      if (first_sig) {
        inner_max = x;
        first_sig = false;
      } else {
        for (int s = 0; s < n; ++s) {
          if (x[s] > inner_max[s]) inner_max[s] = x[s];
        }
      }
    }
    for (int s = 0; s < n; ++s) {
      if (first_tau_outer || inner_max[s] < minmax[s]) {
        minmax[s] = inner_max[s];
        if (game.states[s].owner == Owner::kMin && !game.states[s].is_target) {
          min_witness_profile[s] = choice[s];
        }
      }
    }
    first_tau_outer = false;
  }

  for (int s = 0; s < n; ++s) {
    if (maxmin[s] != minmax[s]) {
      throw std::logic_error("determinacy self-check failed at state " + std::to_string(s));
    }
  }

  ExactValues out;
  out.values = std::move(maxmin);
  out.witness.assign(n, 0);
  for (int s = 0; s < n; ++s) {
    if (game.states[s].is_target) {
      out.witness[s] = 0;
    } else if (game.states[s].owner == Owner::kMax) {
      out.witness[s] = max_witness_profile[s];
    } else {
      out.witness[s] = min_witness_profile[s];
    }
  }
  return out;
}

}  // namespace sg
