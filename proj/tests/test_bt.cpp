#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.h"

#include <map>

using namespace stnbt;
using namespace stnbt::testing;

namespace {

struct Built {
    Fixture fixture;
    Stn stn;
    DistanceMatrix dm;
    BehaviorTree bt;
};

Built build(const std::string &name, StnOptions opts = {}) {
    Built b;
    b.fixture = load_fixture(name);
    b.stn = build_stn(b.fixture.problem, b.fixture.plan, opts);
    b.dm = propagate(b.stn);
    b.bt = build_bt(b.stn, b.dm);
    return b;
}

// The unit sequence owning an STN node (tagged with its reference).
const BtNode &unit_of(const BehaviorTree &bt, int stn_ref) {
    for (const auto &n : bt.nodes) {
        if (n.kind == BtKind::Sequence && n.stn_ref == stn_ref) return n;
    }
    REQUIRE(false);
    static BtNode dummy;
    return dummy;
}

std::vector<BtKind> child_kinds(const BehaviorTree &bt, const BtNode &node) {
    std::vector<BtKind> out;
    for (int c : node.children) out.push_back(bt.nodes[c].kind);
    return out;
}

// First unit sequence found in a preorder walk of the subtree.
int first_unit(const BehaviorTree &bt, int id) {
    const BtNode &n = bt.nodes[id];
    if (n.kind == BtKind::Sequence && n.stn_ref >= 0) return n.stn_ref;
    for (int c : n.children) {
        int found = first_unit(bt, c);
        if (found >= 0) return found;
    }
    return -1;
}

}  // namespace

TEST_CASE("matchcellar compiles to parallel light_match branches under the root") {
    Built b = build("matchcellar");
    const BtNode &root = b.bt.nodes[b.bt.root];
    REQUIRE(root.kind == BtKind::Parallel);
    // two subtree branches (the light_match chains); the pinned mend_fuse
    // starts revisited from the root collapse to wait leaves
    std::vector<std::string> branch_heads;
    int wait_leaves = 0;
    for (int c : root.children) {
        if (b.bt.nodes[c].kind == BtKind::WaitAction) {
            ++wait_leaves;
            continue;
        }
        int unit = first_unit(b.bt, c);
        REQUIRE(unit >= 0);
        branch_heads.push_back(b.stn.nodes[unit].signature);
    }
    CHECK(branch_heads ==
          std::vector<std::string>{"(light_match match1)", "(light_match match2)"});
    CHECK(wait_leaves == static_cast<int>(root.children.size()) - 2);
}

TEST_CASE("start unit shape follows the template") {
    Built b = build("matchcellar");
    int s_lm1 = find_node(b.stn, SnapKind::Start, "(light_match match1)");
    const BtNode &unit = unit_of(b.bt, s_lm1);
    std::vector<BtKind> kinds = child_kinds(b.bt, unit);
    std::vector<BtKind> expected = {BtKind::WaitTime, BtKind::CheckAtStart,
                                    BtKind::ApplyAtStart, BtKind::ExecuteAction};
    CHECK(kinds == expected);  // no extra parents, so no WaitAction leaves
    CHECK(b.bt.nodes[unit.children[0]].time == 0);

    // mend_fuse fuse2's unit keeps the start of light_match match2 as a
    // WaitAction: that STN link is not its tree edge
    int s_mf2 = find_node(b.stn, SnapKind::Start, "(mend_fuse fuse2 match2)");
    int s_lm2 = find_node(b.stn, SnapKind::Start, "(light_match match2)");
    const BtNode &unit2 = unit_of(b.bt, s_mf2);
    bool wait_on_lm2 = false;
    for (int c : unit2.children) {
        const BtNode &leaf = b.bt.nodes[c];
        if (leaf.kind == BtKind::WaitAction && leaf.stn_ref == s_lm2) wait_on_lm2 = true;
    }
    CHECK(wait_on_lm2);
    CHECK(b.bt.nodes[unit2.children[0]].kind == BtKind::WaitTime);
    CHECK(b.bt.nodes[unit2.children[0]].time == 5002);
}

TEST_CASE("empty condition and effect sets still emit check and apply leaves") {
    Built b = build("matchcellar");
    int e_lm1 = find_node(b.stn, SnapKind::End, "(light_match match1)");
    const BtNode &unit = unit_of(b.bt, e_lm1);
    bool has_check_at_end = false;
    for (int c : unit.children) {
        const BtNode &leaf = b.bt.nodes[c];
        if (leaf.kind == BtKind::CheckAtEnd) {
            has_check_at_end = true;
            CHECK(leaf.literals.empty());
        }
    }
    CHECK(has_check_at_end);
}

TEST_CASE("end unit joins first and carries the containment check") {
    Built b = build("matchcellar");
    int e_lm1 = find_node(b.stn, SnapKind::End, "(light_match match1)");
    int e_mf1 = find_node(b.stn, SnapKind::End, "(mend_fuse fuse1 match1)");
    const BtNode &unit = unit_of(b.bt, e_lm1);
    REQUIRE(!unit.children.empty());
    const BtNode &join = b.bt.nodes[unit.children[0]];
    CHECK(join.kind == BtKind::ExecuteAction);
    CHECK(join.snap == SnapKind::End);
    bool checks_mend_end = false;
    for (int c : unit.children) {
        const BtNode &leaf = b.bt.nodes[c];
        if (leaf.kind == BtKind::CheckAction && leaf.stn_ref == e_mf1) {
            checks_mend_end = true;
        }
    }
    CHECK(checks_mend_end);

    // light_match has no overall condition: no CheckOverall leaf
    for (int c : unit.children) {
        CHECK(b.bt.nodes[c].kind != BtKind::CheckOverall);
    }
    // mend_fuse does have one
    const BtNode &mend_unit = unit_of(b.bt, e_mf1);
    bool overall = false;
    for (int c : mend_unit.children) {
        if (b.bt.nodes[c].kind == BtKind::CheckOverall) overall = true;
    }
    CHECK(overall);
}

TEST_CASE("single-action plan compiles to nested sequences") {
    Fixture f = load_fixture("matchcellar");
    TemporalPlan plan = parse_plan("0.000: (light_match match1)  [8.000]\n", f.domain,
                                   f.problem);
    Problem relaxed = f.problem;
    relaxed.goal.clear();
    Stn stn = build_stn(relaxed, plan);
    DistanceMatrix dm = propagate(stn);
    BehaviorTree bt = build_bt(stn, dm);
    const BtNode &root = bt.nodes[bt.root];
    REQUIRE(root.kind == BtKind::Sequence);
    REQUIRE(root.children.size() == 2);
    CHECK(bt.nodes[root.children[0]].stn_ref ==
          find_node(stn, SnapKind::Start, "(light_match match1)"));
    CHECK(first_unit(bt, root.children[1]) ==
          find_node(stn, SnapKind::End, "(light_match match1)"));
}

TEST_CASE("empty plan compiles to a success leaf") {
    Fixture f = load_fixture("matchcellar");
    TemporalPlan empty;
    Problem relaxed = f.problem;
    relaxed.goal.clear();
    Stn stn = build_stn(relaxed, empty);
    BehaviorTree bt = build_bt(stn, propagate(stn));
    CHECK(bt.nodes[bt.root].kind == BtKind::SuccessLeaf);
}

TEST_CASE("every node has exactly one parent and snaps execute once") {
    for (const char *name : {"matchcellar", "assembly"}) {
        Built b = build(name);
        std::map<int, int> parent_count;
        for (const auto &n : b.bt.nodes) {
            for (int c : n.children) ++parent_count[c];
        }
        for (const auto &n : b.bt.nodes) {
            if (n.id == b.bt.root) {
                CHECK(parent_count.count(n.id) == 0);
            } else {
                CHECK(parent_count[n.id] == 1);
            }
        }
        // each snap node appears exactly once as an execute site
        std::map<int, int> exec_sites;
        for (const auto &n : b.bt.nodes) {
            if (n.kind == BtKind::ExecuteAction) ++exec_sites[n.stn_ref];
        }
        size_t snaps = 0;
        for (const auto &node : b.stn.nodes) {
            if (node.kind == SnapKind::Start || node.kind == SnapKind::End) {
                ++snaps;
                CHECK(exec_sites[node.id] == 1);
            }
        }
        CHECK(exec_sites.size() == snaps);
    }
}

TEST_CASE("wait and check leaves always reference an existing site") {
    for (const char *name : {"matchcellar", "assembly"}) {
        Built b = build(name);
        for (const auto &n : b.bt.nodes) {
            if (n.kind != BtKind::WaitAction && n.kind != BtKind::CheckAction) continue;
            bool has_site = b.bt.action_index.count(n.stn_ref) == 1;
            bool is_unit = false;
            for (const auto &m : b.bt.nodes) {
                if (m.kind == BtKind::Sequence && m.stn_ref == n.stn_ref) is_unit = true;
            }
            CHECK((has_site || is_unit));
        }
    }
}

TEST_CASE("a start unit is followed by its end unit region") {
    for (const char *name : {"matchcellar", "assembly"}) {
        Built b = build(name);
        for (const auto &n : b.bt.nodes) {
            if (n.kind != BtKind::Sequence || n.children.size() != 2) continue;
            const BtNode &head = b.bt.nodes[n.children[0]];
            if (head.kind != BtKind::Sequence || head.stn_ref < 0) continue;
            if (b.stn.nodes[head.stn_ref].kind != SnapKind::Start) continue;
            // the first unit reached in the tail region is the matching end
            int tail_first = first_unit(b.bt, n.children[1]);
            REQUIRE(tail_first >= 0);
            CHECK(tail_first == head.stn_ref + 1);
        }
    }
}

TEST_CASE("xml export round trips and matches the golden file") {
    Built b = build("matchcellar");
    std::string xml = export_bt_xml(b.bt);
    BehaviorTree again = parse_bt_xml(xml);
    CHECK(export_bt_xml(again) == xml);
    CHECK(xml == read_file(std::string(STNBT_GOLDEN) + "/matchcellar_bt.xml"));
}

TEST_CASE("compiling twice yields byte-identical exports") {
    Built a = build("assembly");
    Built b = build("assembly");
    CHECK(export_bt_xml(a.bt) == export_bt_xml(b.bt));
    CHECK(export_bt_dot(a.bt) == export_bt_dot(b.bt));
    CHECK(export_stn_json(a.stn) == export_stn_json(b.stn));
}
