#include "stnbt/simple_plan.h"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace stnbt {

const char *step_kind_name(StepKind kind) {
    switch (kind) {
        case StepKind::Init: return "init";
        case StepKind::Start: return "start";
        case StepKind::Overall: return "overall";
        case StepKind::End: return "end";
        case StepKind::Goal: return "goal";
    }
    return "?";
}

std::string SimpleStep::label() const {
    if (kind == StepKind::Init) return "<init>";
    if (kind == StepKind::Goal) return "<goal>";
    std::ostringstream out;
    out << step_kind_name(kind) << " " << signature << ":" << owner_start;
    if (kind == StepKind::Overall) out << "@" << t;
    return out.str();
}

std::vector<Millis> happenings(const TemporalPlan &plan) {
    std::vector<Millis> out;
    out.reserve(plan.steps.size() * 2);
    for (const auto &s : plan.steps) {
        out.push_back(s.start);
        out.push_back(s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SimplePlan induced_simple_plan(const TemporalPlan &plan) {
    SimplePlan simple;
    simple.happenings = happenings(plan);

    SimpleStep init;
    init.kind = StepKind::Init;
    init.t = -1;
    init.key2 = -2;
    init.anchor = -1;
    simple.steps.push_back(init);

    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const TimedAction &ta = plan.steps[i];
        SimpleStep start;
        start.kind = StepKind::Start;
        start.t = ta.start;
        start.key2 = 2 * ta.start;
        start.anchor = ta.start;
        start.signature = ta.action.signature;
        start.owner_start = ta.start;
        start.owner_plan_index = static_cast<int>(i);
        start.conds = ta.action.cond_start;
        start.effs = ta.action.eff_start;
        simple.steps.push_back(start);

        SimpleStep end;
        end.kind = StepKind::End;
        end.t = ta.end();
        end.key2 = 2 * ta.end();
        end.anchor = ta.end();
        end.signature = ta.action.signature;
        end.owner_start = ta.start;
        end.owner_plan_index = static_cast<int>(i);
        end.conds = ta.action.cond_end;
        end.effs = ta.action.eff_end;
        simple.steps.push_back(end);

        if (ta.action.cond_overall.empty()) continue;
        for (size_t h = 0; h + 1 < simple.happenings.size(); ++h) {
            Millis lo = simple.happenings[h];
            Millis hi = simple.happenings[h + 1];
            if (ta.start <= lo && hi <= ta.end()) {
                SimpleStep ov;
                ov.kind = StepKind::Overall;
                ov.key2 = lo + hi;                // exact midpoint, in half-ms
                ov.t = (lo + hi + 1) / 2;         // round half-up for display
                ov.anchor = lo;                   // last happening before the midpoint
                ov.signature = ta.action.signature;
                ov.owner_start = ta.start;
                ov.owner_plan_index = static_cast<int>(i);
                ov.conds = ta.action.cond_overall;
                simple.steps.push_back(ov);
            }
        }
    }

    auto kind_rank = [](StepKind k) {
        switch (k) {
            case StepKind::Init: return 0;
            case StepKind::Start: return 1;
            case StepKind::Overall: return 2;
            case StepKind::End: return 3;
            case StepKind::Goal: return 4;
        }
        return 5;
    };
    std::stable_sort(simple.steps.begin(), simple.steps.end(),
                     [&](const SimpleStep &a, const SimpleStep &b) {
                         if (a.key2 != b.key2) return a.key2 < b.key2;
                         if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
                         return a.owner_plan_index < b.owner_plan_index;
                     });
    for (size_t i = 0; i < simple.steps.size(); ++i) {
        simple.steps[i].index = static_cast<int>(i);
    }
    return simple;
}

std::vector<int> SimplePlan::snaps_at(Millis happening) const {
    std::vector<int> out;
    for (const auto &s : steps) {
        if (s.key2 > 2 * happening) break;
        if (s.key2 == 2 * happening &&
            (s.kind == StepKind::Start || s.kind == StepKind::End)) {
            out.push_back(s.index);
        }
    }
    return out;
}

std::vector<int> SimplePlan::steps_in_window(std::int64_t key2_from,
                                             std::int64_t key2_to) const {
    std::vector<int> out;
    for (const auto &s : steps) {
        if (s.kind == StepKind::Init) continue;
        if (s.key2 >= key2_from && s.key2 < key2_to) out.push_back(s.index);
        if (s.key2 >= key2_to) break;
    }
    return out;
}

Millis SimplePlan::previous_happening(Millis h) const {
    auto it = std::lower_bound(happenings.begin(), happenings.end(), h);
    if (it == happenings.begin()) return -1;
    return *std::prev(it);
}

std::optional<Millis> SimplePlan::next_happening(Millis h) const {
    auto it = std::upper_bound(happenings.begin(), happenings.end(), h);
    if (it == happenings.end()) return std::nullopt;
    return *it;
}

const WorldState &StateSequence::before(Millis happening) const {
    auto it = states.lower_bound(happening);
    if (it == states.begin()) return initial;
    return std::prev(it)->second;
}

const WorldState &StateSequence::at(Millis happening) const {
    auto it = states.find(happening);
    assert(it != states.end());
    return it->second;
}

const WorldState &StateSequence::final() const {
    if (states.empty()) return initial;
    return states.rbegin()->second;
}

WorldState apply_effects(WorldState state, const LiteralSet &effs) {
    for (const auto &l : effs) {
        if (l.positive) {
            state.true_fluents.insert(l.fluent);
        } else {
            state.true_fluents.erase(l.fluent);
        }
    }
    return state;
}

bool check_conditions(const LiteralSet &conds, const WorldState &state) {
    for (const auto &l : conds) {
        if (!state.holds(l)) return false;
    }
    return true;
}

StateSequence state_sequence(const Problem &problem, const SimplePlan &simple) {
    StateSequence seq;
    seq.initial.true_fluents = problem.init;
    WorldState current = seq.initial;
    size_t i = 0;
    const auto &steps = simple.steps;
    for (Millis h : simple.happenings) {
        while (i < steps.size() && steps[i].key2 < 2 * h) ++i;
        while (i < steps.size() && steps[i].key2 == 2 * h) {
            if (steps[i].kind == StepKind::Start || steps[i].kind == StepKind::End) {
                current = apply_effects(std::move(current), steps[i].effs);
            }
            ++i;
        }
        seq.states[h] = current;
    }
    return seq;
}

std::string ValidationReport::to_json() const {
    std::ostringstream out;
    out << "{\"valid\": " << (valid ? "true" : "false") << ", \"failures\": [";
    if (first_failure) {
        out << "{\"time_ms\": " << first_failure->time_ms << ", \"step\": \""
            << first_failure->step << "\", \"literal\": \""
            << first_failure->literal.str() << "\"}";
    }
    out << "]}";
    return out.str();
}

namespace {

// Power-set search over the other steps of the same happening: a condition
// set is satisfiable at a happening if some subset of the co-occurring snap
// effects, applied to the prior state, makes it hold. Subsets are tried in
// increasing size, lexicographic within a size.
bool first_satisfying_state(const LiteralSet &conds, const WorldState &base,
                            const std::vector<const SimpleStep *> &others,
                            WorldState &found) {
    if (check_conditions(conds, base)) {
        found = base;
        return true;
    }
    size_t m = others.size();
    for (size_t size = 1; size <= m; ++size) {
        std::vector<size_t> combo(size);
        for (size_t i = 0; i < size; ++i) combo[i] = i;
        while (true) {
            WorldState state = base;
            for (size_t i : combo) state = apply_effects(std::move(state), others[i]->effs);
            if (check_conditions(conds, state)) {
                found = std::move(state);
                return true;
            }
            size_t k = size;
            while (k > 0 && combo[k - 1] == m - size + k - 1) --k;
            if (k == 0) break;
            ++combo[k - 1];
            for (size_t i = k; i < size; ++i) combo[i] = combo[i - 1] + 1;
        }
    }
    return false;
}

}  // namespace

ValidationReport validate_plan(const Problem &problem, const TemporalPlan &plan) {
    ValidationReport report;
    SimplePlan simple = induced_simple_plan(plan);
    WorldState current;
    current.true_fluents = problem.init;

    auto record_failure = [&](const SimpleStep &step, const WorldState &state) {
        report.valid = false;
        for (const auto &l : step.conds) {
            if (!state.holds(l)) {
                report.first_failure = ValidationFailure{step.t, step.label(), l};
                return;
            }
        }
        assert(false && "failure recorded with satisfied conditions");
    };

    for (Millis h : simple.happenings) {
        std::vector<const SimpleStep *> snaps;
        for (int idx : simple.snaps_at(h)) snaps.push_back(&simple.steps[idx]);

        std::vector<WorldState> contexts(snaps.size());
        for (size_t i = 0; i < snaps.size(); ++i) {
            std::vector<const SimpleStep *> others;
            for (const SimpleStep *o : snaps) {
                if (o != snaps[i]) others.push_back(o);
            }
            if (!first_satisfying_state(snaps[i]->conds, current, others, contexts[i])) {
                record_failure(*snaps[i], current);
                return report;
            }
        }
        // PDDL 2.1 mutex between simultaneous snap actions: one may not break
        // the other's conditions nor may both write the same fluent.
        for (size_t i = 0; i < snaps.size() && report.valid; ++i) {
            for (size_t j = i + 1; j < snaps.size(); ++j) {
                WorldState xhat = apply_effects(contexts[j], snaps[i]->effs);
                WorldState xbar = apply_effects(contexts[i], snaps[j]->effs);
                const Literal *broken = nullptr;
                for (const auto &l : snaps[j]->conds) {
                    if (!xhat.holds(l)) broken = &l;
                }
                const SimpleStep *blamed = snaps[j];
                if (!broken) {
                    for (const auto &l : snaps[i]->conds) {
                        if (!xbar.holds(l)) broken = &l;
                    }
                    blamed = snaps[i];
                }
                if (broken) {
                    report.valid = false;
                    report.first_failure =
                        ValidationFailure{blamed->t, blamed->label(), *broken};
                    return report;
                }
                auto changed = [](const WorldState &before, const WorldState &after) {
                    std::set<Fluent> out;
                    std::set_symmetric_difference(
                        before.true_fluents.begin(), before.true_fluents.end(),
                        after.true_fluents.begin(), after.true_fluents.end(),
                        std::inserter(out, out.begin()));
                    return out;
                };
                std::set<Fluent> diff_i = changed(contexts[j], xhat);
                std::set<Fluent> diff_j = changed(contexts[i], xbar);
                for (const auto &f : diff_i) {
                    if (diff_j.count(f)) {
                        report.valid = false;
                        report.first_failure = ValidationFailure{
                            snaps[j]->t, snaps[j]->label(), Literal{f, true}};
                        return report;
                    }
                }
            }
        }
        for (const SimpleStep *step : snaps) {
            current = apply_effects(std::move(current), step->effs);
        }
        // Overall checks between this happening and the next see this state.
        for (const auto &step : simple.steps) {
            if (step.kind != StepKind::Overall || step.anchor != h) continue;
            if (!check_conditions(step.conds, current)) {
                record_failure(step, current);
                return report;
            }
        }
    }

    if (!check_conditions(problem.goal, current)) {
        report.valid = false;
        for (const auto &l : problem.goal) {
            if (!current.holds(l)) {
                Millis t = simple.happenings.empty() ? 0 : simple.happenings.back();
                report.first_failure = ValidationFailure{t, "<goal>", l};
                break;
            }
        }
    }
    return report;
}

}  // namespace stnbt
