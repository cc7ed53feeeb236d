#include "stnbt/generator.h"

#include <algorithm>
#include <cassert>
#include <random>

#include "stnbt/simple_plan.h"

namespace stnbt {

namespace {

struct EffectTouch {
    Millis at;
    Fluent fluent;
};

struct OverallWindow {
    Fluent fluent;
    Millis from;  // inclusive
    Millis to;    // exclusive: deletes in [from, to) would break the window
};

class Generation {
public:
    Generation(const GeneratorConfig &config)
        : config_(config), rng_(config.seed) {}

    GeneratedInstance build() {
        make_domain();
        make_init();
        for (int i = 0; i < config_.plan_length; ++i) add_step();
        make_goal();
        GeneratedInstance out;
        out.domain = domain_;
        out.problem = problem_;
        out.plan = plan_;
        out.plan.problem_ref = problem_.name;
        return out;
    }

private:
    Fluent fluent(int i) const { return {"p" + std::to_string(i), {}}; }

    std::uint64_t pick(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

    void make_domain() {
        domain_.name = "gen";
        domain_.requirements = {":strips", ":durative-actions",
                                ":negative-preconditions"};
        domain_.types["object"] = "object";
        for (int i = 0; i < config_.fluent_pool; ++i) {
            domain_.predicates[fluent(static_cast<int>(i)).name] = {};
        }
        problem_.name = "gen-" + std::to_string(config_.seed);
        problem_.domain_name = domain_.name;
    }

    void make_init() {
        for (int i = 0; i < config_.fluent_pool; ++i) {
            if (pick(2) == 0) problem_.init.insert(fluent(i));
        }
    }

    // State right before time t, simulated over committed snap effects.
    WorldState state_at(Millis t) const {
        std::vector<std::pair<Millis, const LiteralSet *>> effs;
        for (const auto &s : plan_.steps) {
            effs.push_back({s.start, &s.action.eff_start});
            effs.push_back({s.end(), &s.action.eff_end});
        }
        std::stable_sort(effs.begin(), effs.end(),
                         [](const auto &a, const auto &b) { return a.first < b.first; });
        WorldState state;
        state.true_fluents = problem_.init;
        for (const auto &[at, set] : effs) {
            if (at >= t) break;
            state = apply_effects(std::move(state), *set);
        }
        return state;
    }

    bool touched_at(const Fluent &f, Millis t) const {
        for (const auto &touch : touches_) {
            if (touch.at == t && touch.fluent == f) return true;
        }
        return false;
    }

    bool delete_allowed(const Fluent &f, Millis t) const {
        for (const auto &w : windows_) {
            if (w.fluent == f && w.from <= t && t < w.to) return false;
        }
        return true;
    }

    bool window_free(const Fluent &f, Millis from, Millis to) const {
        for (const auto &touch : touches_) {
            if (touch.fluent == f && from <= touch.at && touch.at < to) return false;
        }
        return true;
    }

    bool is_happening(Millis t) const {
        for (const auto &s : plan_.steps) {
            if (s.start == t || s.end() == t) return true;
        }
        return false;
    }

    bool effects_admissible(const GroundedDurativeAction &a, Millis t, Millis d) const {
        for (const auto &l : a.eff_start) {
            if (touched_at(l.fluent, t)) return false;
            if (!l.positive && !delete_allowed(l.fluent, t)) return false;
        }
        for (const auto &l : a.eff_end) {
            if (touched_at(l.fluent, t + d)) return false;
            if (!l.positive && !delete_allowed(l.fluent, t + d)) return false;
        }
        for (const auto &l : a.cond_overall) {
            // own start effects must not break the own overall window
            for (const auto &e : a.eff_start) {
                if (!e.positive && e.fluent == l.fluent) return false;
            }
            if (!window_free(l.fluent, t + 1, t + d)) return false;
        }
        return true;
    }

    bool applicable(const GroundedDurativeAction &a, Millis t, Millis d,
                    const WorldState &state) const {
        if (!check_conditions(a.cond_start, state)) return false;
        if (!check_conditions(a.cond_overall, state)) return false;
        return effects_admissible(a, t, d);
    }

    GroundedDurativeAction ground_nullary(const DurativeActionSchema &schema) const {
        GroundedDurativeAction g;
        g.schema_name = schema.name;
        g.signature = "(" + schema.name + ")";
        g.cond_start = schema.cond_start;
        g.cond_overall = schema.cond_overall;
        g.cond_end = schema.cond_end;
        g.eff_start = schema.eff_start;
        g.eff_end = schema.eff_end;
        g.duration_min = schema.duration_min;
        g.duration_max = schema.duration_max;
        return g;
    }

    // Builds a schema tailored to the current state and constraints so the
    // pool stays applicable-rich.
    DurativeActionSchema synthesize(Millis t, Millis d, const WorldState &state) {
        DurativeActionSchema schema;
        schema.name = "a" + std::to_string(domain_.schemas.size());
        schema.duration_min = config_.dur_min;
        schema.duration_max = config_.dur_max;

        std::vector<Fluent> truths(state.true_fluents.begin(), state.true_fluents.end());
        std::shuffle(truths.begin(), truths.end(), rng_);
        size_t n_conds = std::min<size_t>(truths.size(), pick(3));
        for (size_t i = 0; i < n_conds; ++i) schema.cond_start.insert({truths[i], true});

        if (!truths.empty() && pick(3) == 0) {
            Fluent f = truths[pick(truths.size())];
            if (window_free(f, t + 1, t + d)) schema.cond_overall.insert({f, true});
        }

        auto add_effects = [&](LiteralSet &set, Millis at) {
            size_t count = 1 + pick(2);
            for (size_t i = 0; i < count; ++i) {
                Fluent f = fluent(static_cast<int>(pick(config_.fluent_pool)));
                bool positive = pick(2) == 0;
                Literal lit{f, positive};
                if (set.count(lit.negated()) || set.count(lit)) continue;
                if (touched_at(f, at)) continue;
                if (!positive && !delete_allowed(f, at)) continue;
                if (schema.cond_overall.count({f, true}) && !positive) continue;
                set.insert(lit);
            }
        };
        add_effects(schema.eff_start, t);
        add_effects(schema.eff_end, t + d);
        if (schema.eff_start.empty() && schema.eff_end.empty()) {
            // keep at least one observable change
            Fluent f = fluent(static_cast<int>(pick(config_.fluent_pool)));
            if (!touched_at(f, t + d) && delete_allowed(f, t + d)) {
                schema.eff_end.insert({f, true});
            }
        }
        return schema;
    }

    void add_step() {
        Millis t = next_time_;
        while (is_happening(t)) ++t;
        Millis d = config_.dur_min + static_cast<Millis>(pick(
                       static_cast<std::uint64_t>(config_.dur_max - config_.dur_min + 1)));
        WorldState state = state_at(t);

        std::vector<size_t> order(domain_.schemas.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng_);

        GroundedDurativeAction chosen;
        bool found = false;
        for (size_t idx : order) {
            GroundedDurativeAction g = ground_nullary(domain_.schemas[idx]);
            if (applicable(g, t, d, state)) {
                chosen = g;
                found = true;
                break;
            }
        }
        if (!found) {
            DurativeActionSchema schema = synthesize(t, d, state);
            chosen = ground_nullary(schema);
            domain_.schemas.push_back(std::move(schema));
        }

        TimedAction step;
        step.start = t;
        step.duration = d;
        step.action = chosen;
        plan_.steps.push_back(step);

        for (const auto &l : chosen.eff_start) touches_.push_back({t, l.fluent});
        for (const auto &l : chosen.eff_end) touches_.push_back({t + d, l.fluent});
        for (const auto &l : chosen.cond_overall) {
            windows_.push_back({l.fluent, t, t + d});
        }
        next_time_ = t + 1 + static_cast<Millis>(pick(
                         static_cast<std::uint64_t>(config_.dur_max)));
    }

    void make_goal() {
        WorldState final_state = state_at(kForever);
        std::vector<Fluent> truths(final_state.true_fluents.begin(),
                                   final_state.true_fluents.end());
        std::shuffle(truths.begin(), truths.end(), rng_);
        size_t n = std::min<size_t>(truths.size(), 1 + pick(3));
        for (size_t i = 0; i < n; ++i) problem_.goal.insert({truths[i], true});
        if (pick(4) == 0) {  // occasionally a negative goal over an absent fluent
            Fluent f = fluent(static_cast<int>(pick(config_.fluent_pool)));
            if (!final_state.true_fluents.count(f)) {
                problem_.goal.insert({f, false});
            }
        }
    }

    GeneratorConfig config_;
    std::mt19937_64 rng_;
    Domain domain_;
    Problem problem_;
    TemporalPlan plan_;
    std::vector<EffectTouch> touches_;
    std::vector<OverallWindow> windows_;
    Millis next_time_ = 0;
};

}  // namespace

GeneratedInstance generate_instance(const GeneratorConfig &config) {
    GeneratorConfig attempt = config;
    for (int tries = 0; tries < 50; ++tries) {
        Generation gen(attempt);
        GeneratedInstance out = gen.build();
        if (validate_plan(out.problem, out.plan).valid) return out;
        attempt.seed = attempt.seed * 6364136223846793005ull + 1442695040888963407ull;
    }
    throw std::runtime_error("generator failed to produce a valid instance");
}

GeneratedInstance mutate_instance(const GeneratedInstance &instance,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GeneratedInstance out = instance;
    if (out.plan.steps.empty()) return out;
    auto pick = [&](std::uint64_t n) { return n == 0 ? 0 : rng() % n; };

    for (int tries = 0; tries < 100; ++tries) {
        TimedAction &step = out.plan.steps[pick(out.plan.steps.size())];
        LiteralSet *sets[] = {&step.action.cond_start, &step.action.cond_overall,
                              &step.action.cond_end, &step.action.eff_start,
                              &step.action.eff_end};
        LiteralSet &target = *sets[pick(5)];
        int op = static_cast<int>(pick(3));
        if (op == 0 && !target.empty()) {  // flip one literal's sign
            auto it = target.begin();
            std::advance(it, static_cast<long>(pick(target.size())));
            Literal flipped = it->negated();
            if (target.count(flipped)) continue;
            target.erase(it);
            target.insert(flipped);
            return out;
        }
        if (op == 1 && !target.empty()) {  // remove one literal
            auto it = target.begin();
            std::advance(it, static_cast<long>(pick(target.size())));
            target.erase(it);
            return out;
        }
        // insert a random literal
        std::vector<std::string> names;
        for (const auto &[name, args] : instance.domain.predicates) names.push_back(name);
        if (names.empty()) continue;
        Literal lit{{names[pick(names.size())], {}}, pick(2) == 0};
        if (target.count(lit) || target.count(lit.negated())) continue;
        target.insert(lit);
        return out;
    }
    return out;
}

}  // namespace stnbt
