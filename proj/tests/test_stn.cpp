#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.h"

#include <random>

using namespace stnbt;
using namespace stnbt::testing;

namespace {

// Bare STN scaffolding for link-level tests.
Stn bare_stn(int n) {
    Stn stn;
    for (int i = 0; i < n; ++i) {
        StnNode node;
        node.id = i;
        node.kind = SnapKind::Start;
        stn.nodes.push_back(node);
    }
    stn.root = 0;
    stn.goal = n - 1;
    return stn;
}

void link(Stn &stn, int parent, int child, Millis lower, Millis upper,
          bool duration = false) {
    stn.nodes[parent].out_links.push_back({child, lower, upper, duration});
    stn.nodes[child].in_links.push_back({parent, lower, upper, duration});
}

}  // namespace

TEST_CASE("init_graph creates two snap nodes per action plus root and goal") {
    Fixture f = load_fixture("matchcellar");
    Stn stn = init_graph(f.problem, f.plan);
    CHECK(stn.nodes.size() == 10);
    CHECK(stn.nodes[stn.root].kind == SnapKind::Init);
    CHECK(stn.nodes[stn.goal].kind == SnapKind::Goal);
    CHECK(stn.nodes[stn.root].effs.size() == f.problem.init.size());
    CHECK(stn.nodes[stn.goal].conds == f.problem.goal);

    // duration links are exact
    const StnLink *dur = stn.find_link(stn.start_node_of[1], stn.end_node_of[1]);
    REQUIRE(dur != nullptr);
    CHECK(dur->lower == 5000);
    CHECK(dur->upper == 5000);
    CHECK(dur->duration);

    // root links pin the planned starts
    const StnLink *root_link = stn.find_link(stn.root, stn.start_node_of[3]);
    REQUIRE(root_link != nullptr);
    CHECK(root_link->lower == 5002);
    CHECK(root_link->upper == 5002);

    StnOptions flex;
    flex.flexible_root = true;
    Stn relaxed = init_graph(f.problem, f.plan, flex);
    const StnLink *soft = relaxed.find_link(relaxed.root, relaxed.start_node_of[3]);
    REQUIRE(soft != nullptr);
    CHECK(soft->lower == 5002);
    CHECK(soft->upper == kForever);
}

TEST_CASE("init_graph of the empty plan is root -> goal") {
    Fixture f = load_fixture("matchcellar");
    TemporalPlan empty;
    Stn stn = init_graph(f.problem, empty);
    CHECK(stn.nodes.size() == 2);
    const StnLink *l = stn.find_link(stn.root, stn.goal);
    REQUIRE(l != nullptr);
    CHECK(l->lower == 0);
    CHECK(l->upper == kForever);
}

TEST_CASE("matchcellar STN encodes containment and mutual exclusion") {
    Fixture f = load_fixture("matchcellar");
    Stn stn = build_stn(f.problem, f.plan);
    int s_lm1 = find_node(stn, SnapKind::Start, "(light_match match1)");
    int e_lm1 = find_node(stn, SnapKind::End, "(light_match match1)");
    int s_mf1 = find_node(stn, SnapKind::Start, "(mend_fuse fuse1 match1)");
    int e_mf1 = find_node(stn, SnapKind::End, "(mend_fuse fuse1 match1)");
    int s_lm2 = find_node(stn, SnapKind::Start, "(light_match match2)");
    int e_lm2 = find_node(stn, SnapKind::End, "(light_match match2)");
    int s_mf2 = find_node(stn, SnapKind::Start, "(mend_fuse fuse2 match2)");
    int e_mf2 = find_node(stn, SnapKind::End, "(mend_fuse fuse2 match2)");

    // the containment the single-node-per-action baseline cannot express
    CHECK(has_link(stn, s_lm1, s_mf1));
    CHECK(has_link(stn, e_mf1, e_lm1));
    CHECK(has_link(stn, s_lm2, s_mf2));
    CHECK(has_link(stn, e_mf2, e_lm2));
    // the (handfree) hand-off serializes the two mend_fuse actions
    CHECK(has_link(stn, e_mf1, s_mf2));

    const StnLink *l = stn.find_link(s_lm1, s_mf1);
    REQUIRE(l != nullptr);
    CHECK(l->lower == 0);
    CHECK(l->upper == kForever);
}

TEST_CASE("single-action plan has only root, duration and goal links") {
    Fixture f = load_fixture("matchcellar");
    TemporalPlan plan = parse_plan("0.000: (light_match match1)  [8.000]\n", f.domain,
                                   f.problem);
    Problem relaxed = f.problem;
    relaxed.goal.clear();
    Stn stn = build_stn(relaxed, plan);
    CHECK(stn.nodes.size() == 4);
    size_t links = 0;
    for (const auto &n : stn.nodes) links += n.out_links.size();
    CHECK(links == 3);  // root->start, start->end, end->goal
}

TEST_CASE("build_stn rejects invalid plans unless forced") {
    Fixture f = load_fixture("matchcellar");
    TemporalPlan broken = f.plan;
    broken.steps.erase(broken.steps.begin() + 2);
    CHECK_THROWS_AS(build_stn(f.problem, broken), InvalidPlanError);
    StnOptions forced;
    forced.force = true;
    CHECK_NOTHROW(build_stn(f.problem, broken, forced));
}

TEST_CASE("prune_links removes links superseded by a new parent") {
    // chain a->b plus existing a->c; adding b->c supersedes a->c
    Stn stn = bare_stn(4);
    link(stn, 1, 2, 0, kForever);  // a=1 -> b=2
    link(stn, 1, 3, 0, kForever);  // a=1 -> c=3
    prune_links(stn, 3, 2);
    CHECK_FALSE(has_link(stn, 1, 3));
    CHECK(has_link(stn, 1, 2));
}

TEST_CASE("prune_links leaves unrelated links alone") {
    Stn stn = bare_stn(4);
    link(stn, 1, 3, 0, kForever);
    prune_links(stn, 3, 2);  // 1 is not an ancestor of 2
    CHECK(has_link(stn, 1, 3));
}

TEST_CASE("prune_links never removes duration or root links") {
    Stn stn = bare_stn(4);
    stn.nodes[1].kind = SnapKind::Start;
    stn.nodes[3].kind = SnapKind::End;
    link(stn, 1, 2, 0, kForever);
    link(stn, 1, 3, 5000, 5000, /*duration=*/true);
    prune_links(stn, 3, 2);  // 1 is an ancestor of 2, but 1->3 is a duration link
    CHECK(has_link(stn, 1, 3));

    Stn stn2 = bare_stn(4);
    stn2.nodes[0].kind = SnapKind::Init;
    link(stn2, 0, 2, 0, kForever);
    link(stn2, 0, 3, 7, 7);  // root link
    prune_links(stn2, 3, 2);
    CHECK(has_link(stn2, 0, 3));
}

TEST_CASE("check_paths finds direct links and multi-hop paths") {
    Stn stn = bare_stn(4);
    CHECK_FALSE(check_paths(stn, 2, 1));
    link(stn, 1, 2, 0, kForever);
    CHECK(check_paths(stn, 2, 1));
    link(stn, 2, 3, 0, kForever);
    CHECK(check_paths(stn, 3, 1));
    CHECK_FALSE(check_paths(stn, 1, 3));
}

TEST_CASE("propagate derives the textbook two-node bounds") {
    Stn stn = bare_stn(2);
    link(stn, 0, 1, 6, 10);  // weights 10 and -6
    DistanceMatrix dm = propagate(stn);
    CHECK(dm.d[0][1] == 10);
    CHECK(dm.d[1][0] == -6);
    CHECK(dm.upper(0, 1) == 10);
    CHECK(dm.lower(0, 1) == 6);
}

TEST_CASE("propagate mirrors a duration link exactly") {
    Stn stn = bare_stn(2);
    link(stn, 0, 1, 5000, 5000, true);
    DistanceMatrix dm = propagate(stn);
    CHECK(dm.d[0][1] == 5000);
    CHECK(dm.d[1][0] == -5000);
}

TEST_CASE("propagate detects negative cycles") {
    Stn stn = bare_stn(2);
    link(stn, 0, 1, 6, kForever);   // t1 - t0 >= 6
    link(stn, 1, 0, -5, kForever);  // t0 - t1 >= -5, i.e. t1 - t0 <= 5
    CHECK_THROWS_AS(propagate(stn), InconsistentStnError);
}

TEST_CASE("the planned schedule satisfies every built STN") {
    for (const char *name : {"matchcellar", "assembly"}) {
        Fixture f = load_fixture(name);
        Stn stn = build_stn(f.problem, f.plan);
        CHECK(planned_schedule_satisfies(stn));
        CHECK_NOTHROW(propagate(stn));
    }
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.plan_length = 1 + static_cast<int>(seed % 6);
        GeneratedInstance inst = generate_instance(cfg);
        Stn stn = build_stn(inst.problem, inst.plan);
        CHECK(planned_schedule_satisfies(stn));
        DistanceMatrix dm = propagate(stn);
        for (size_t i = 0; i < stn.nodes.size(); ++i) CHECK(dm.d[i][i] == 0);
    }
}

TEST_CASE("triangle inequality holds after propagation") {
    Fixture f = load_fixture("matchcellar");
    Stn stn = build_stn(f.problem, f.plan);
    DistanceMatrix dm = propagate(stn);
    size_t n = stn.nodes.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n; ++k) {
            for (size_t j = 0; j < n; ++j) {
                if (dm.d[i][k] >= kForever || dm.d[k][j] >= kForever) continue;
                CHECK(dm.d[i][j] <= dm.d[i][k] + dm.d[k][j]);
            }
        }
    }
}

TEST_CASE("root reaches every node and every node reaches the goal") {
    for (const char *name : {"matchcellar", "assembly"}) {
        Fixture f = load_fixture(name);
        Stn stn = build_stn(f.problem, f.plan);
        auto reach = reachability_closure(stn);
        for (const auto &node : stn.nodes) {
            if (node.id != stn.root) CHECK(reach[stn.root][node.id]);
            if (node.id != stn.goal) CHECK(reach[node.id][stn.goal]);
        }
    }
}

TEST_CASE("pruned insertion preserves reachability on random dags") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 50; ++round) {
        int n = 4 + static_cast<int>(rng() % 5);
        Stn with_prune = bare_stn(n);
        Stn plain = bare_stn(n);
        for (int extra = 0; extra < n; ++extra) {
            int a = static_cast<int>(rng() % n);
            int b = static_cast<int>(rng() % n);
            if (a == b) continue;
            int parent = std::min(a, b);
            int child = std::max(a, b);
            if (!plain.find_link(parent, child)) {
                link(plain, parent, child, 0, kForever);
            }
            prune_links(with_prune, child, parent);
            if (!check_paths(with_prune, child, parent) &&
                !with_prune.find_link(parent, child)) {
                link(with_prune, parent, child, 0, kForever);
            }
        }
        auto closure_a = reachability_closure(with_prune);
        auto closure_b = reachability_closure(plain);
        CHECK(closure_a == closure_b);
    }
}

TEST_CASE("dot export is deterministic and sized to the graph") {
    Fixture f = load_fixture("matchcellar");
    TemporalPlan empty;
    Problem no_goal = f.problem;
    no_goal.goal.clear();
    Stn trivial = build_stn(no_goal, empty);
    std::string dot = export_stn_dot(trivial);
    CHECK(dot.find("init") != std::string::npos);
    CHECK(dot.find("goal") != std::string::npos);

    Stn stn = build_stn(f.problem, f.plan);
    std::string first = export_stn_dot(stn);
    std::string second = export_stn_dot(build_stn(f.problem, f.plan));
    CHECK(first == second);
    size_t node_lines = 0;
    for (size_t pos = first.find("label="); pos != std::string::npos;
         pos = first.find("label=", pos + 1)) {
        ++node_lines;
    }
    CHECK(node_lines >= 10);
    CHECK(first == read_file(std::string(STNBT_GOLDEN) + "/matchcellar_stn.dot"));
}

TEST_CASE("stn json round trips") {
    Fixture f = load_fixture("matchcellar");
    Stn stn = build_stn(f.problem, f.plan);
    std::string json = export_stn_json(stn);
    Stn again = stn_from_json(json);
    CHECK(export_stn_json(again) == json);
    CHECK(again.nodes.size() == stn.nodes.size());
    CHECK(again.start_node_of == stn.start_node_of);
    CHECK(again.end_node_of == stn.end_node_of);
    CHECK_NOTHROW(propagate(again));
    // an imported network compiles to the same tree
    DistanceMatrix dm = propagate(stn);
    CHECK(export_bt_xml(build_bt(again, propagate(again))) ==
          export_bt_xml(build_bt(stn, dm)));
}

TEST_CASE("built STNs respect the structural node invariants") {
    for (const char *name : {"matchcellar", "assembly"}) {
        Fixture f = load_fixture(name);
        Stn stn = build_stn(f.problem, f.plan);
        CHECK(stn.nodes[stn.root].in_links.empty());
        CHECK(stn.nodes[stn.goal].out_links.empty());
        for (size_t i = 0; i < stn.start_node_of.size(); ++i) {
            int durations = 0;
            for (const auto &l : stn.nodes[stn.start_node_of[i]].out_links) {
                if (l.duration) {
                    ++durations;
                    CHECK(l.peer == stn.end_node_of[i]);
                    CHECK(l.lower == l.upper);
                }
            }
            CHECK(durations == 1);
        }
        // in/out link lists are mutually consistent, no self loops, at most
        // one link per ordered pair
        for (const auto &node : stn.nodes) {
            std::set<int> seen;
            for (const auto &l : node.out_links) {
                CHECK(l.peer != node.id);
                CHECK(seen.insert(l.peer).second);
                bool mirrored = false;
                for (const auto &back : stn.nodes[l.peer].in_links) {
                    if (back.peer == node.id && back.lower == l.lower &&
                        back.upper == l.upper) {
                        mirrored = true;
                    }
                }
                CHECK(mirrored);
            }
        }
    }
}
