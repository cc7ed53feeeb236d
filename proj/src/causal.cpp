#include "stnbt/causal.h"

#include <algorithm>
#include <cassert>
#include <limits>
#include <sstream>

namespace stnbt {

std::set<int> CausalResult::combined() const {
    std::set<int> out = supporters;
    out.insert(threats.begin(), threats.end());
    return out;
}

namespace {

const WorldState &state_before_happening(const StateSequence &states, Millis h) {
    return states.before(h);
}

}  // namespace

WorldState intermediate_state(const SimpleStep &a, const SimplePlan &simple,
                              Millis t, const WorldState &x1) {
    if (check_conditions(a.conds, x1)) return x1;
    std::vector<const SimpleStep *> others;
    for (int idx : simple.snaps_at(t)) {
        if (idx != a.index) others.push_back(&simple.steps[idx]);
    }
    size_t m = others.size();
    for (size_t size = 1; size <= m; ++size) {
        std::vector<size_t> combo(size);
        for (size_t i = 0; i < size; ++i) combo[i] = i;
        while (true) {
            WorldState state = x1;
            for (size_t i : combo) state = apply_effects(std::move(state), others[i]->effs);
            if (check_conditions(a.conds, state)) return state;
            size_t k = size;
            while (k > 0 && combo[k - 1] == m - size + k - 1) --k;
            if (k == 0) break;
            ++combo[k - 1];
            for (size_t i = k; i < size; ++i) combo[i] = combo[i - 1] + 1;
        }
    }
    return x1;
}

std::set<Fluent> state_diff(const WorldState &x, const WorldState &y) {
    std::set<Fluent> out;
    std::set_symmetric_difference(x.true_fluents.begin(), x.true_fluents.end(),
                                  y.true_fluents.begin(), y.true_fluents.end(),
                                  std::inserter(out, out.begin()));
    return out;
}

std::set<int> get_satisfy(const SimpleStep &a, const SimplePlan &simple,
                          const StateSequence &states) {
    std::set<int> found;
    const LiteralSet &conds = a.conds;
    if (conds.empty()) return found;

    Millis t2 = a.anchor;
    while (t2 >= 0) {
        Millis t1 = simple.previous_happening(t2);
        const WorldState &x1 =
            t1 < 0 ? states.initial : state_before_happening(states, t2);
        for (const auto &r : conds) {
            if (x1.holds(r)) continue;
            for (int idx : simple.snaps_at(t2)) {
                if (idx == a.index) continue;
                const SimpleStep &ak = simple.steps[idx];
                WorldState xhat = apply_effects(x1, ak.effs);
                if (xhat.holds(r)) found.insert(idx);
            }
        }
        t2 = t1;
    }
    for (const auto &r : conds) {
        if (states.initial.holds(r)) {
            found.insert(0);  // a0
            break;
        }
    }
    return found;
}

std::set<int> get_threat(const SimpleStep &a, const SimplePlan &simple,
                         const StateSequence &states) {
    std::set<int> found;
    const LiteralSet &ra = a.conds;
    const LiteralSet &ea = a.effs;

    Millis t2 = a.anchor;
    while (t2 >= 0) {
        const WorldState &x1 = state_before_happening(states, t2);
        WorldState x1a = intermediate_state(a, simple, t2, x1);
        if (check_conditions(ra, x1a)) {
            auto t3 = simple.next_happening(t2);
            std::int64_t window_end =
                t3 ? 2 * *t3 : std::numeric_limits<std::int64_t>::max();
            for (int idx : simple.steps_in_window(2 * t2, window_end)) {
                if (idx == a.index) continue;
                const SimpleStep &ak = simple.steps[idx];
                const LiteralSet &rk = ak.conds;
                WorldState x1k = intermediate_state(ak, simple, t2, x1);
                // A satisfying intermediate state exists whenever the plan is
                // valid; without one the candidate is not runnable here and
                // testing it against the fallback would fabricate threats.
                if (!check_conditions(rk, x1k)) continue;
                WorldState xhat = apply_effects(x1k, ea);
                WorldState xbar = apply_effects(x1a, ak.effs);
                if (!a.is_overall() && !check_conditions(rk, xhat)) {
                    found.insert(idx);  // a threatens ak
                } else if (!ak.is_overall() && !check_conditions(ra, xbar)) {
                    found.insert(idx);  // ak threatens a
                } else if (!a.is_overall() && !ak.is_overall()) {
                    std::set<Fluent> da = state_diff(x1k, xhat);
                    std::set<Fluent> dk = state_diff(x1a, xbar);
                    std::vector<Fluent> common;
                    std::set_intersection(da.begin(), da.end(), dk.begin(), dk.end(),
                                          std::back_inserter(common));
                    if (!common.empty()) found.insert(idx);  // no moving targets
                }
            }
        }
        t2 = simple.previous_happening(t2);
    }
    return found;
}

CausalResult causal_result(const SimpleStep &a, const SimplePlan &simple,
                           const StateSequence &states) {
    CausalResult out;
    out.step = a.index;
    out.supporters = get_satisfy(a, simple, states);
    out.threats = get_threat(a, simple, states);
    assert(!out.supporters.count(a.index));
    assert(!out.threats.count(a.index));
    return out;
}

std::string causal_results_json(const SimplePlan &simple, const StateSequence &states) {
    std::ostringstream out;
    out << "[\n";
    bool first = true;
    for (const auto &step : simple.steps) {
        if (step.kind == StepKind::Init) continue;
        CausalResult r = causal_result(step, simple, states);
        if (!first) out << ",\n";
        first = false;
        out << "  {\"step\": \"" << step.label() << "\", \"supporters\": [";
        bool inner = true;
        for (int idx : r.supporters) {
            if (!inner) out << ", ";
            inner = false;
            out << "\"" << simple.steps[idx].label() << "\"";
        }
        out << "], \"threats\": [";
        inner = true;
        for (int idx : r.threats) {
            if (!inner) out << ", ";
            inner = false;
            out << "\"" << simple.steps[idx].label() << "\"";
        }
        out << "]}";
    }
    out << "\n]\n";
    return out.str();
}

}  // namespace stnbt
