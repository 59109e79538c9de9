#pragma once

#include <string>

#include "sg/baselines.hpp"
#include "sg/oracle.hpp"
#include "sg/solver.hpp"

namespace sg {

// Shortest round-trip decimal form of d (std::to_chars). Used everywhere a
// float leaves the process, so identical runs emit identical bytes.
std::string format_double(double d);

// {"status","iterations","epsilon","values":{"<state>":{"value","lower","upper","action"}}}
std::string solve_result_to_json(const SolveResult& res);

// Same shape plus "algorithm"; "upper" omitted per state when absent.
std::string baseline_result_to_json(const BaselineResult& res);

// Header k,state,action,reach,stay,l,u,decval_l,decval_u,bes,delayed.
// Sentinel decision values print as inf/-inf.
std::string trace_to_csv(const std::vector<TraceRow>& rows);

// Header k,state,action,lower,upper (upper column empty for plain VI).
std::string baseline_trace_to_csv(const std::vector<BaselineTraceRow>& rows);

// {"targets","sinks","unknown","sccs","mecs"} of the validated game.
std::string inspect_to_json(const StochasticGame& game);

// {"values":{"<state>":"p/q"},"witness":{"<state>":"<label>"}}
std::string oracle_to_json(const StochasticGame& game, const ExactValues& vals);

}  // namespace sg
