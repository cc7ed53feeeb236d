#pragma once

#include <set>

#include "stnbt/simple_plan.h"

namespace stnbt {

// Supporting and threat-avoidance predecessors of one induced-simple-plan
// step. Step index 0 is the init pseudo-step a0.
struct CausalResult {
    int step = -1;
    std::set<int> supporters;
    std::set<int> threats;

    std::set<int> combined() const;
};

// Steps whose effects establish a condition of `a`, found by scanning
// backward over happenings from a's anchor. Includes the init step when a
// condition already holds in the initial state.
std::set<int> get_satisfy(const SimpleStep &a, const SimplePlan &simple,
                          const StateSequence &states);

// Steps in conflict with `a`: either side invalidates the other's conditions,
// or both modify the same fluent ("no moving targets").
std::set<int> get_threat(const SimpleStep &a, const SimplePlan &simple,
                         const StateSequence &states);

CausalResult causal_result(const SimpleStep &a, const SimplePlan &simple,
                           const StateSequence &states);

// Debug export: every step's supporters and threats, for plan-lint style
// inspection from the CLI.
std::string causal_results_json(const SimplePlan &simple, const StateSequence &states);

// First state derived from x1 by applying the effects of a subset of the
// other snap steps at happening t that satisfies a's conditions. Subsets are
// enumerated smallest first, plan order within a size; x1 itself when no
// subset works.
WorldState intermediate_state(const SimpleStep &a, const SimplePlan &simple,
                              Millis t, const WorldState &x1);

std::set<Fluent> state_diff(const WorldState &x, const WorldState &y);

}  // namespace stnbt
