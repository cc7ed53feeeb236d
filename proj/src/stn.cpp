#include "stnbt/stn.h"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "json.hpp"

namespace stnbt {

const char *snap_kind_name(SnapKind kind) {
    switch (kind) {
        case SnapKind::Init: return "init";
        case SnapKind::Start: return "start";
        case SnapKind::End: return "end";
        case SnapKind::Goal: return "goal";
    }
    return "?";
}

std::string StnNode::label() const {
    if (kind == SnapKind::Init) return "init";
    if (kind == SnapKind::Goal) return "goal";
    std::ostringstream out;
    out << snap_kind_name(kind) << signature << "@" << t;
    return out.str();
}

InvalidPlanError::InvalidPlanError(const ValidationReport &r)
    : std::runtime_error(
          "invalid plan" +
          (r.first_failure ? ": " + r.first_failure->step + " requires " +
                                 r.first_failure->literal.str()
                           : std::string(": goal not reached"))),
      report(r) {}

InconsistentStnError::InconsistentStnError(int node, Millis self_distance)
    : std::runtime_error("inconsistent STN: negative cycle through node " +
                         std::to_string(node) + " (self distance " +
                         std::to_string(self_distance) + ")"),
      node(node),
      self_distance(self_distance) {}

const StnLink *Stn::find_link(int parent, int child) const {
    for (const auto &l : nodes[parent].out_links) {
        if (l.peer == child) return &l;
    }
    return nullptr;
}

bool Stn::has_path(int from, int to) const {
    if (from == to) return true;
    std::vector<bool> seen(nodes.size(), false);
    std::vector<int> stack = {from};
    seen[from] = true;
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (const auto &l : nodes[cur].out_links) {
            if (l.peer == to) return true;
            if (!seen[l.peer]) {
                seen[l.peer] = true;
                stack.push_back(l.peer);
            }
        }
    }
    return false;
}

namespace {

void add_link(Stn &stn, int parent, int child, Millis lower, Millis upper,
              bool duration = false) {
    assert(parent != child);
    assert(!stn.find_link(parent, child));
    stn.nodes[parent].out_links.push_back({child, lower, upper, duration});
    stn.nodes[child].in_links.push_back({parent, lower, upper, duration});
}

void remove_link(Stn &stn, int parent, int child) {
    auto &out = stn.nodes[parent].out_links;
    out.erase(std::remove_if(out.begin(), out.end(),
                             [&](const StnLink &l) { return l.peer == child; }),
              out.end());
    auto &in = stn.nodes[child].in_links;
    in.erase(std::remove_if(in.begin(), in.end(),
                            [&](const StnLink &l) { return l.peer == parent; }),
             in.end());
}

}  // namespace

Stn init_graph(const Problem &problem, const TemporalPlan &plan,
               const StnOptions &opts) {
    Stn stn;
    StnNode root;
    root.id = 0;
    root.kind = SnapKind::Init;
    root.t = 0;
    for (const auto &f : problem.init) root.effs.insert({f, true});
    stn.nodes.push_back(std::move(root));

    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const TimedAction &ta = plan.steps[i];
        StnNode start;
        start.id = static_cast<int>(stn.nodes.size());
        start.kind = SnapKind::Start;
        start.t = ta.start;
        start.signature = ta.action.signature;
        start.duration = ta.duration;
        start.conds = ta.action.cond_start;
        start.effs = ta.action.eff_start;
        stn.start_node_of.push_back(start.id);
        stn.nodes.push_back(std::move(start));

        StnNode end;
        end.id = static_cast<int>(stn.nodes.size());
        end.kind = SnapKind::End;
        end.t = ta.end();
        end.signature = ta.action.signature;
        end.duration = ta.duration;
        end.conds = ta.action.cond_end;
        end.effs = ta.action.eff_end;
        end.overall = ta.action.cond_overall;
        stn.end_node_of.push_back(end.id);
        stn.nodes.push_back(std::move(end));
    }

    StnNode goal;
    goal.id = static_cast<int>(stn.nodes.size());
    goal.kind = SnapKind::Goal;
    goal.conds = problem.goal;
    Millis last = 0;
    for (const auto &ta : plan.steps) last = std::max(last, ta.end());
    goal.t = last;
    stn.goal = goal.id;
    stn.nodes.push_back(std::move(goal));

    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const TimedAction &ta = plan.steps[i];
        add_link(stn, stn.start_node_of[i], stn.end_node_of[i], ta.duration,
                 ta.duration, /*duration=*/true);
        add_link(stn, stn.root, stn.start_node_of[i], ta.start,
                 opts.flexible_root ? kForever : ta.start);
    }
    if (plan.steps.empty()) add_link(stn, stn.root, stn.goal, 0, kForever);
    return stn;
}

void prune_links(Stn &stn, int child, int parent) {
    std::vector<int> to_remove;
    for (const auto &l : stn.nodes[child].in_links) {
        if (l.duration || l.peer == parent) continue;
        // Root links carry the time-triggered start bounds the WaitTime nodes
        // dispatch from; removing them would let a start drift ahead of plan
        // writes it has no causal link to.
        if (l.peer == stn.root) continue;
        // l.peer is an ancestor of parent: l is superseded by parent->child.
        if (stn.has_path(l.peer, parent)) to_remove.push_back(l.peer);
    }
    for (int a : to_remove) remove_link(stn, a, child);
}

bool check_paths(const Stn &stn, int child, int parent) {
    return stn.has_path(parent, child);
}

namespace {

// GetNodes: trace a simple-plan step to its STN node. Overall steps attach to
// the owner's start node as a child (support precedes the interval) and to
// the owner's end node as a parent (dependents wait out the interval).
int node_for_step(const Stn &stn, const SimpleStep &step, bool as_child) {
    switch (step.kind) {
        case StepKind::Init: return stn.root;
        case StepKind::Goal: return stn.goal;
        case StepKind::Start: return stn.start_node_of[step.owner_plan_index];
        case StepKind::End: return stn.end_node_of[step.owner_plan_index];
        case StepKind::Overall:
            return as_child ? stn.start_node_of[step.owner_plan_index]
                            : stn.end_node_of[step.owner_plan_index];
    }
    return -1;
}

void connect(Stn &stn, int parent, int child) {
    if (parent == child) return;
    prune_links(stn, child, parent);
    if (!check_paths(stn, child, parent)) {
        add_link(stn, parent, child, 0, kForever);
    }
}

}  // namespace

Stn build_stn(const Problem &problem, const TemporalPlan &plan,
              const StnOptions &opts) {
    if (!opts.force) {
        ValidationReport report = validate_plan(problem, plan);
        if (!report.valid) throw InvalidPlanError(report);
    }
    Stn stn = init_graph(problem, plan, opts);
    SimplePlan simple = induced_simple_plan(plan);
    StateSequence states = state_sequence(problem, simple);

    for (const auto &step : simple.steps) {
        if (step.kind == StepKind::Init) continue;
        CausalResult causal = causal_result(step, simple, states);
        int child = node_for_step(stn, step, /*as_child=*/true);
        for (int ak : causal.combined()) {
            int parent = node_for_step(stn, simple.steps[ak], /*as_child=*/false);
            connect(stn, parent, child);
        }
    }

    // Goal supporters, then [0,inf) links from any end node still a sink so
    // the goal stays last.
    if (!simple.happenings.empty()) {
        SimpleStep goal_step;
        goal_step.index = -2;
        goal_step.kind = StepKind::Goal;
        goal_step.anchor = simple.happenings.back();
        goal_step.key2 = 2 * simple.happenings.back() + 1;
        goal_step.conds = problem.goal;
        for (int ak : get_satisfy(goal_step, simple, states)) {
            int parent = node_for_step(stn, simple.steps[ak], /*as_child=*/false);
            connect(stn, parent, stn.goal);
        }
    }
    std::vector<int> sinks;
    for (const auto &node : stn.nodes) {
        if (node.kind == SnapKind::End && node.out_links.empty()) sinks.push_back(node.id);
    }
    for (int id : sinks) connect(stn, id, stn.goal);
    return stn;
}

DistanceMatrix propagate(const Stn &stn) {
    size_t n = stn.nodes.size();
    DistanceMatrix dm;
    dm.d.assign(n, std::vector<Millis>(n, kForever));
    for (size_t i = 0; i < n; ++i) dm.d[i][i] = 0;
    for (const auto &node : stn.nodes) {
        for (const auto &l : node.out_links) {
            dm.d[node.id][l.peer] = std::min(dm.d[node.id][l.peer], l.upper);
            dm.d[l.peer][node.id] = std::min(dm.d[l.peer][node.id], -l.lower);
        }
    }
    for (size_t k = 0; k < n; ++k) {
        for (size_t i = 0; i < n; ++i) {
            if (dm.d[i][k] >= kForever) continue;
            for (size_t j = 0; j < n; ++j) {
                if (dm.d[k][j] >= kForever) continue;
                Millis via = dm.d[i][k] + dm.d[k][j];
                if (via < dm.d[i][j]) dm.d[i][j] = via;
            }
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (dm.d[i][i] < 0) {
            throw InconsistentStnError(static_cast<int>(i), dm.d[i][i]);
        }
    }
    return dm;
}

bool planned_schedule_satisfies(const Stn &stn) {
    for (const auto &node : stn.nodes) {
        for (const auto &l : node.out_links) {
            Millis delta = stn.nodes[l.peer].t - node.t;
            if (delta < l.lower) return false;
            if (l.upper < kForever && delta > l.upper) return false;
        }
    }
    return true;
}

std::string export_stn_dot(const Stn &stn) {
    std::ostringstream out;
    out << "digraph stn {\n  rankdir=LR;\n";
    for (const auto &node : stn.nodes) {
        out << "  n" << node.id << " [label=\"" << node.label() << "\"];\n";
    }
    for (const auto &node : stn.nodes) {
        for (const auto &l : node.out_links) {
            out << "  n" << node.id << " -> n" << l.peer << " [label=\"[" << l.lower
                << ",";
            if (l.upper >= kForever) {
                out << "inf";
            } else {
                out << l.upper;
            }
            out << "]\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

namespace {

nlohmann::json literal_set_to_json(const LiteralSet &set) {
    auto arr = nlohmann::json::array();
    for (const auto &l : set) arr.push_back(l.str());
    return arr;
}

LiteralSet literal_set_from_json(const nlohmann::json &arr);

Literal literal_from_text(const std::string &text) {
    // "(p a b)" or "(not (p a b))"
    std::string s = text;
    Literal lit;
    if (s.rfind("(not ", 0) == 0) {
        lit.positive = false;
        s = s.substr(5, s.size() - 6);
    }
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
        throw std::runtime_error("malformed literal: " + text);
    }
    std::istringstream in(s.substr(1, s.size() - 2));
    in >> lit.fluent.name;
    std::string arg;
    while (in >> arg) lit.fluent.args.push_back(arg);
    return lit;
}

LiteralSet literal_set_from_json(const nlohmann::json &arr) {
    LiteralSet out;
    for (const auto &item : arr) out.insert(literal_from_text(item.get<std::string>()));
    return out;
}

}  // namespace

std::string export_stn_json(const Stn &stn) {
    nlohmann::json j;
    j["root"] = stn.root;
    j["goal"] = stn.goal;
    auto nodes = nlohmann::json::array();
    for (const auto &node : stn.nodes) {
        nlohmann::json n;
        n["id"] = node.id;
        n["t"] = node.t;
        n["a"] = node.signature;
        n["d"] = node.duration;
        n["l"] = snap_kind_name(node.kind);
        n["R"] = literal_set_to_json(node.conds);
        n["E"] = literal_set_to_json(node.effs);
        n["overall"] = literal_set_to_json(node.overall);
        auto links = nlohmann::json::array();
        for (const auto &l : node.out_links) {
            nlohmann::json lj;
            lj["child"] = l.peer;
            lj["lower"] = l.lower;
            if (l.upper < kForever) lj["upper"] = l.upper;
            lj["duration"] = l.duration;
            links.push_back(lj);
        }
        n["links"] = links;
        nodes.push_back(n);
    }
    j["nodes"] = nodes;
    return j.dump(2) + "\n";
}

Stn stn_from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Stn stn;
    stn.root = j.value("root", 0);
    stn.goal = j.value("goal", 0);
    for (const auto &n : j.at("nodes")) {
        StnNode node;
        node.id = n.at("id").get<int>();
        node.t = n.value("t", Millis{0});
        node.signature = n.value("a", std::string{});
        node.duration = n.value("d", Millis{0});
        std::string kind = n.value("l", std::string("start"));
        if (kind == "init") node.kind = SnapKind::Init;
        else if (kind == "end") node.kind = SnapKind::End;
        else if (kind == "goal") node.kind = SnapKind::Goal;
        else node.kind = SnapKind::Start;
        if (n.contains("R")) node.conds = literal_set_from_json(n["R"]);
        if (n.contains("E")) node.effs = literal_set_from_json(n["E"]);
        if (n.contains("overall")) node.overall = literal_set_from_json(n["overall"]);
        if (static_cast<int>(stn.nodes.size()) != node.id) {
            throw std::runtime_error("STN JSON nodes must be listed by id");
        }
        stn.nodes.push_back(std::move(node));
    }
    for (const auto &n : j.at("nodes")) {
        int id = n.at("id").get<int>();
        for (const auto &lj : n.value("links", nlohmann::json::array())) {
            StnLink link;
            link.peer = lj.at("child").get<int>();
            link.lower = lj.value("lower", Millis{0});
            link.upper = lj.contains("upper") ? lj["upper"].get<Millis>() : kForever;
            link.duration = lj.value("duration", false);
            stn.nodes[id].out_links.push_back(link);
            StnLink back = link;
            back.peer = id;
            stn.nodes[link.peer].in_links.push_back(back);
        }
    }
    // recover the per-action node maps from the duration links
    for (const auto &node : stn.nodes) {
        for (const auto &l : node.out_links) {
            if (l.duration) {
                stn.start_node_of.push_back(node.id);
                stn.end_node_of.push_back(l.peer);
            }
        }
    }
    return stn;
}

}  // namespace stnbt
