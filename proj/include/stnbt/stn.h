#pragma once

#include <string>
#include <vector>

#include "stnbt/causal.h"
#include "stnbt/simple_plan.h"

namespace stnbt {

enum class SnapKind { Init, Start, End, Goal };

const char *snap_kind_name(SnapKind kind);

struct StnLink {
    int peer = -1;
    Millis lower = 0;
    Millis upper = kForever;  // kForever encodes an unbounded link
    bool duration = false;    // [d,d] start->end links are never pruned
};

struct StnNode {
    int id = -1;
    Millis t = 0;  // planned time: start at t, end at t+d, init 0, goal last
    std::string signature;
    Millis duration = 0;
    SnapKind kind = SnapKind::Start;
    LiteralSet conds;    // R
    LiteralSet effs;     // E
    LiteralSet overall;  // owner's overall condition (end nodes)
    std::vector<StnLink> in_links;   // U
    std::vector<StnLink> out_links;  // Y

    std::string label() const;
};

struct Stn {
    std::vector<StnNode> nodes;  // node id == index
    int root = 0;
    int goal = 0;
    std::vector<int> start_node_of;  // per plan step
    std::vector<int> end_node_of;

    const StnLink *find_link(int parent, int child) const;
    bool has_path(int from, int to) const;
};

struct StnOptions {
    bool flexible_root = false;  // root->start links [t, inf) instead of [t, t]
    bool force = false;          // skip the validity oracle gate
};

struct InvalidPlanError : std::runtime_error {
    explicit InvalidPlanError(const ValidationReport &report);
    ValidationReport report;
};

struct InconsistentStnError : std::runtime_error {
    InconsistentStnError(int node, Millis self_distance);
    int node;
    Millis self_distance;
};

// Two snap nodes per plan step with their [d,d] duration link, a root node
// carrying the initial state, a goal node carrying the goal condition, and
// root->start links pinning planned start times.
Stn init_graph(const Problem &problem, const TemporalPlan &plan,
               const StnOptions &opts = {});

// Full construction: causal analysis over the induced simple plan, link
// pruning, goal support links, and [0,inf) links from sink end nodes to the
// goal.
Stn build_stn(const Problem &problem, const TemporalPlan &plan,
              const StnOptions &opts = {});

// Drops every link a->n made redundant by a path a ~> h when h is about to
// become n's parent. Duration links are kept.
void prune_links(Stn &stn, int child, int parent);

// True iff a directed path parent ~> child already exists.
bool check_paths(const Stn &stn, int child, int parent);

struct DistanceMatrix {
    std::vector<std::vector<Millis>> d;

    Millis upper(int from, int to) const { return d[from][to]; }
    Millis lower(int from, int to) const {
        return d[to][from] >= kForever ? -kForever : -d[to][from];
    }
};

// Floyd-Warshall closure over the link bounds. Throws InconsistentStnError on
// a negative cycle.
DistanceMatrix propagate(const Stn &stn);

// True iff assigning every node its planned time satisfies all link bounds.
bool planned_schedule_satisfies(const Stn &stn);

std::string export_stn_dot(const Stn &stn);
std::string export_stn_json(const Stn &stn);
Stn stn_from_json(const std::string &text);

}  // namespace stnbt
