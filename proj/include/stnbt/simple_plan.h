#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stnbt/pddl.h"

namespace stnbt {

enum class StepKind { Init, Start, Overall, End, Goal };

const char *step_kind_name(StepKind kind);

// One timed instantaneous step of the induced simple plan. Overall steps sit
// at gap midpoints; `key2` carries the exact time in half-milliseconds so
// ordering never depends on the rounded `t`.
struct SimpleStep {
    int index = -1;
    StepKind kind = StepKind::Start;
    Millis t = 0;               // rounded milliseconds (half-up for midpoints)
    std::int64_t key2 = 0;      // exact time in half-millisecond units
    Millis anchor = 0;          // happening the step is evaluated against
    std::string signature;
    Millis owner_start = -1;    // plan start time of the owning action
    int owner_plan_index = -1;  // index into TemporalPlan.steps
    LiteralSet conds;
    LiteralSet effs;

    bool is_overall() const { return kind == StepKind::Overall; }
    std::string label() const;
};

struct SimplePlan {
    std::vector<SimpleStep> steps;  // sorted; steps[0] is the init step
    std::vector<Millis> happenings;

    // Start/end steps sharing an exact happening, in plan order.
    std::vector<int> snaps_at(Millis happening) const;
    // Steps (snap and overall) with exact time in [from, to) half-ms units.
    std::vector<int> steps_in_window(std::int64_t key2_from, std::int64_t key2_to) const;
    // Previous happening before h, or -1 when h is the first.
    Millis previous_happening(Millis h) const;
    // Next happening after h, if any.
    std::optional<Millis> next_happening(Millis h) const;
};

struct WorldState {
    std::set<Fluent> true_fluents;

    bool holds(const Literal &lit) const {
        return lit.positive == (true_fluents.count(lit.fluent) > 0);
    }
    auto operator<=>(const WorldState &) const = default;
};

struct StateSequence {
    WorldState initial;
    std::map<Millis, WorldState> states;  // happening -> state after that happening

    // State strictly before the given happening (initial for the first, and
    // for the sentinel -1).
    const WorldState &before(Millis happening) const;
    const WorldState &at(Millis happening) const;
    const WorldState &final() const;
};

std::vector<Millis> happenings(const TemporalPlan &plan);
SimplePlan induced_simple_plan(const TemporalPlan &plan);
WorldState apply_effects(WorldState state, const LiteralSet &effs);
bool check_conditions(const LiteralSet &conds, const WorldState &state);
StateSequence state_sequence(const Problem &problem, const SimplePlan &simple);

struct ValidationFailure {
    Millis time_ms = 0;
    std::string step;
    Literal literal;
};

struct ValidationReport {
    bool valid = true;
    std::optional<ValidationFailure> first_failure;

    std::string to_json() const;
};

// Independent simulation oracle for plan validity. Deliberately self-contained:
// it shares only apply_effects/check_conditions with the rest of the pipeline
// and never touches the STN or BT code paths.
ValidationReport validate_plan(const Problem &problem, const TemporalPlan &plan);

}  // namespace stnbt
