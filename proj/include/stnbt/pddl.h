#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stnbt {

// All times are integer milliseconds. Plans carry at most three decimals,
// so fixed point keeps happening-point comparisons exact.
using Millis = std::int64_t;

constexpr Millis kForever = std::numeric_limits<Millis>::max() / 4;

Millis parse_seconds(const std::string &text);
std::string format_seconds(Millis ms);

struct ParseError : std::runtime_error {
    ParseError(const std::string &msg, int line, int col);
    int line;
    int col;
};

struct UnsupportedFeatureError : std::runtime_error {
    explicit UnsupportedFeatureError(const std::string &feature);
    std::string feature;
};

struct Fluent {
    std::string name;
    std::vector<std::string> args;

    auto operator<=>(const Fluent &) const = default;
    std::string str() const;
};

struct Literal {
    Fluent fluent;
    bool positive = true;

    auto operator<=>(const Literal &) const = default;
    Literal negated() const { return {fluent, !positive}; }
    std::string str() const;
};

// Used for both condition and effect sets. Parsers reject a literal and its
// negation appearing together.
using LiteralSet = std::set<Literal>;

struct TypedObject {
    std::string name;
    std::string type;
};

struct Parameter {
    std::string name;  // includes the leading '?'
    std::string type;
};

struct DurativeActionSchema {
    std::string name;
    std::vector<Parameter> params;
    LiteralSet cond_start;
    LiteralSet cond_overall;
    LiteralSet cond_end;
    LiteralSet eff_start;
    LiteralSet eff_end;
    Millis duration_min = 0;
    Millis duration_max = kForever;
};

struct Domain {
    std::string name;
    std::set<std::string> requirements;
    std::map<std::string, std::string> types;  // type -> parent
    std::map<std::string, std::vector<std::string>> predicates;
    std::vector<TypedObject> constants;
    std::vector<DurativeActionSchema> schemas;

    const DurativeActionSchema *find_schema(const std::string &name) const;
    bool is_subtype(const std::string &t, const std::string &ancestor) const;
};

struct GroundedDurativeAction {
    std::string schema_name;
    std::string signature;  // "(name obj1 obj2 ...)"
    LiteralSet cond_start;
    LiteralSet cond_overall;
    LiteralSet cond_end;
    LiteralSet eff_start;
    LiteralSet eff_end;
    Millis duration_min = 0;
    Millis duration_max = kForever;
};

struct TimedAction {
    Millis start = 0;
    GroundedDurativeAction action;
    Millis duration = 0;

    Millis end() const { return start + duration; }
};

struct TemporalPlan {
    std::vector<TimedAction> steps;
    std::string problem_ref;
};

struct Problem {
    std::string name;
    std::string domain_name;
    std::vector<TypedObject> objects;  // includes domain constants
    std::set<Fluent> init;             // closed world: positive facts only
    LiteralSet goal;
};

Domain parse_domain(const std::string &text);
Problem parse_problem(const std::string &text, const Domain &domain);
TemporalPlan parse_plan(const std::string &text, const Domain &domain,
                        const Problem &problem);

GroundedDurativeAction ground_action(const DurativeActionSchema &schema,
                                     const std::vector<std::string> &args,
                                     const Domain &domain,
                                     const Problem &problem);

std::string render_plan(const TemporalPlan &plan);
std::string render_domain(const Domain &domain);
std::string render_problem(const Problem &problem);

}  // namespace stnbt
