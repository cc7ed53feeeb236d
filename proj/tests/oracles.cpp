#include "oracles.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace stnbt::testing {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Fixture load_fixture(const std::string &name) {
    std::string base = std::string(STNBT_FIXTURES) + "/" + name;
    Fixture f;
    f.domain = parse_domain(read_file(base + "/domain.pddl"));
    f.problem = parse_problem(read_file(base + "/problem.pddl"), f.domain);
    f.plan = parse_plan(read_file(base + "/plan.txt"), f.domain, f.problem);
    return f;
}

namespace {

// State just before happening h, re-simulated from the initial state. Kept
// separate from StateSequence on purpose.
WorldState resimulate_before(const SimplePlan &simple, const Problem &problem,
                             Millis h) {
    WorldState state;
    state.true_fluents = problem.init;
    for (const auto &step : simple.steps) {
        if (step.kind != StepKind::Start && step.kind != StepKind::End) continue;
        if (step.t >= h) continue;
        state = apply_effects(std::move(state), step.effs);
    }
    return state;
}

Millis oracle_anchor(const SimpleStep &a, const SimplePlan &simple) {
    if (a.kind == StepKind::Overall) {
        Millis anchor = -1;
        for (Millis h : simple.happenings) {
            if (2 * h < a.key2) anchor = h;
        }
        return anchor;
    }
    return a.t;
}

// Subsets enumerated smallest-first, lexicographic within a size, matching
// the documented tie-break; implemented via bitmasks sorted by popcount.
WorldState oracle_intermediate(const SimpleStep &a, const SimplePlan &simple,
                               Millis t, const WorldState &x1) {
    std::vector<const SimpleStep *> others;
    for (const auto &s : simple.steps) {
        if ((s.kind == StepKind::Start || s.kind == StepKind::End) && s.t == t &&
            s.index != a.index) {
            others.push_back(&s);
        }
    }
    size_t m = others.size();
    std::vector<unsigned> masks;
    for (unsigned mask = 0; mask < (1u << m); ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a_, unsigned b_) {
        return __builtin_popcount(a_) < __builtin_popcount(b_);
    });
    for (unsigned mask : masks) {
        WorldState state = x1;
        for (size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) state = apply_effects(std::move(state), others[i]->effs);
        }
        if (check_conditions(a.conds, state)) return state;
    }
    return x1;
}

}  // namespace

std::set<int> oracle_satisfy(const SimpleStep &a, const SimplePlan &simple,
                             const Problem &problem) {
    std::set<int> out;
    Millis anchor = oracle_anchor(a, simple);
    for (const auto &ak : simple.steps) {
        if (ak.index == a.index) continue;
        if (ak.kind != StepKind::Start && ak.kind != StepKind::End) continue;
        if (ak.t > anchor) continue;
        WorldState before = resimulate_before(simple, problem, ak.t);
        for (const auto &r : a.conds) {
            if (before.holds(r)) continue;
            if (apply_effects(before, ak.effs).holds(r)) out.insert(ak.index);
        }
    }
    WorldState init;
    init.true_fluents = problem.init;
    for (const auto &r : a.conds) {
        if (init.holds(r)) out.insert(0);
    }
    return out;
}

std::set<int> oracle_threat(const SimpleStep &a, const SimplePlan &simple,
                            const Problem &problem) {
    std::set<int> out;
    Millis anchor = oracle_anchor(a, simple);
    for (Millis t2 : simple.happenings) {
        if (t2 > anchor) continue;
        WorldState x1 = resimulate_before(simple, problem, t2);
        WorldState x1a = oracle_intermediate(a, simple, t2, x1);
        if (!check_conditions(a.conds, x1a)) continue;
        std::int64_t until = std::numeric_limits<std::int64_t>::max();
        for (Millis h : simple.happenings) {
            if (h > t2) {
                until = 2 * h;
                break;
            }
        }
        for (const auto &ak : simple.steps) {
            if (ak.kind == StepKind::Init || ak.index == a.index) continue;
            if (ak.key2 < 2 * t2 || ak.key2 >= until) continue;
            WorldState x1k = oracle_intermediate(ak, simple, t2, x1);
            if (!check_conditions(ak.conds, x1k)) continue;
            WorldState xhat = apply_effects(x1k, a.effs);
            WorldState xbar = apply_effects(x1a, ak.effs);
            if (!a.is_overall() && !check_conditions(ak.conds, xhat)) {
                out.insert(ak.index);
            } else if (!ak.is_overall() && !check_conditions(a.conds, xbar)) {
                out.insert(ak.index);
            } else if (!a.is_overall() && !ak.is_overall()) {
                auto da = state_diff(x1k, xhat);
                auto dk = state_diff(x1a, xbar);
                bool overlap = false;
                for (const auto &f : da) {
                    if (dk.count(f)) overlap = true;
                }
                if (overlap) out.insert(ak.index);
            }
        }
    }
    return out;
}

std::vector<std::vector<bool>> reachability_closure(const Stn &stn) {
    size_t n = stn.nodes.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto &node : stn.nodes) {
        for (const auto &l : node.out_links) reach[node.id][l.peer] = true;
    }
    for (size_t k = 0; k < n; ++k) {
        for (size_t i = 0; i < n; ++i) {
            if (!reach[i][k]) continue;
            for (size_t j = 0; j < n; ++j) {
                if (reach[k][j]) reach[i][j] = true;
            }
        }
    }
    return reach;
}

namespace {

long linearize(const Stn &stn, std::vector<int> &order, std::vector<bool> &placed,
               std::vector<int> &indegree, long cap, long &count,
               const std::function<bool(const std::vector<int> &)> &visit,
               const std::vector<int> &snaps, bool &stop) {
    if (stop || count >= cap) return count;
    if (order.size() == snaps.size()) {
        ++count;
        if (!visit(order)) stop = true;
        return count;
    }
    for (int id : snaps) {
        if (placed[id] || indegree[id] > 0) continue;
        placed[id] = true;
        order.push_back(id);
        for (const auto &l : stn.nodes[id].out_links) --indegree[l.peer];
        linearize(stn, order, placed, indegree, cap, count, visit, snaps, stop);
        for (const auto &l : stn.nodes[id].out_links) ++indegree[l.peer];
        order.pop_back();
        placed[id] = false;
        if (stop || count >= cap) break;
    }
    return count;
}

}  // namespace

long enumerate_linearizations(const Stn &stn, long cap,
                              const std::function<bool(const std::vector<int> &)> &visit) {
    std::vector<int> snaps;
    std::vector<int> indegree(stn.nodes.size(), 0);
    for (const auto &node : stn.nodes) {
        if (node.kind == SnapKind::Start || node.kind == SnapKind::End) {
            snaps.push_back(node.id);
        }
    }
    for (const auto &node : stn.nodes) {
        for (const auto &l : node.out_links) {
            bool from_snap = stn.nodes[node.id].kind == SnapKind::Start ||
                             stn.nodes[node.id].kind == SnapKind::End;
            bool to_snap = stn.nodes[l.peer].kind == SnapKind::Start ||
                           stn.nodes[l.peer].kind == SnapKind::End;
            if (from_snap && to_snap) ++indegree[l.peer];
        }
    }
    std::vector<int> order;
    std::vector<bool> placed(stn.nodes.size(), false);
    long count = 0;
    bool stop = false;
    linearize(stn, order, placed, indegree, cap, count, visit, snaps, stop);
    return count;
}

const SimpleStep &find_step(const SimplePlan &simple, StepKind kind,
                            const std::string &signature, Millis owner_start,
                            int occurrence) {
    int seen = 0;
    for (const auto &s : simple.steps) {
        if (s.kind != kind || s.signature != signature) continue;
        if (owner_start >= 0 && s.owner_start != owner_start) continue;
        if (seen++ == occurrence) return s;
    }
    throw std::runtime_error("no step " + std::string(step_kind_name(kind)) + " " +
                             signature);
}

int find_node(const Stn &stn, SnapKind kind, const std::string &signature,
              Millis owner_start) {
    for (const auto &n : stn.nodes) {
        if (n.kind != kind || n.signature != signature) continue;
        if (owner_start >= 0) {
            Millis start = kind == SnapKind::End ? n.t - n.duration : n.t;
            if (start != owner_start) continue;
        }
        return n.id;
    }
    throw std::runtime_error("no STN node " + std::string(snap_kind_name(kind)) + " " +
                             signature);
}

bool has_link(const Stn &stn, int parent, int child) {
    return stn.find_link(parent, child) != nullptr;
}

}  // namespace stnbt::testing
