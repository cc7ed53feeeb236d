#pragma once

#include <map>
#include <string>
#include <vector>

#include "stnbt/stn.h"

namespace stnbt {

enum class BtKind {
    Sequence,
    Parallel,
    WaitTime,
    CheckTime,
    WaitAction,
    CheckAction,
    CheckAtStart,
    CheckOverall,
    CheckAtEnd,
    ApplyAtStart,
    ApplyAtEnd,
    ExecuteAction,
    SuccessLeaf,
};

const char *bt_kind_name(BtKind kind);

struct BtNode {
    int id = -1;
    BtKind kind = BtKind::Sequence;
    std::vector<int> children;
    // payload, meaningful per kind:
    int stn_ref = -1;         // unit owner / wait-check-exec target
    std::string signature;    // action expression of the target
    SnapKind snap = SnapKind::Start;
    Millis time = 0;          // WaitTime release / CheckTime deadline
    Millis planned_duration = 0;  // ExecuteAction start dispatch
    LiteralSet literals;      // condition or effect payload
};

struct BehaviorTree {
    int root = -1;
    std::vector<BtNode> nodes;  // id == index
    // (stn node id) -> ExecuteAction site; start/end snaps map to dispatch
    // and join leaves, the goal maps to its condition check.
    std::map<int, int> action_index;
};

// Unit templates. `extra_parents` are the STN in-links not represented by the
// tree edge; they become WaitAction leaves in start units and CheckAction
// leaves in end units.
int start_unit(BehaviorTree &bt, const Stn &stn, const DistanceMatrix &dm, int node,
               const std::vector<int> &extra_parents);
int end_unit(BehaviorTree &bt, const Stn &stn, const DistanceMatrix &dm, int node,
             const std::vector<int> &extra_parents);

BehaviorTree build_bt(const Stn &stn, const DistanceMatrix &dm);

std::string export_bt_xml(const BehaviorTree &bt);
std::string export_bt_dot(const BehaviorTree &bt);
BehaviorTree parse_bt_xml(const std::string &text);

}  // namespace stnbt
