#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "stnbt/pipeline.h"

namespace stnbt::testing {

struct Fixture {
    Domain domain;
    Problem problem;
    TemporalPlan plan;
};

std::string read_file(const std::string &path);
Fixture load_fixture(const std::string &name);  // "matchcellar", "assembly"

// Independent re-derivations of the causal queries, written directly from the
// definitions with their own prefix re-simulation. Used to cross-check the
// production implementations on small plans.
std::set<int> oracle_satisfy(const SimpleStep &a, const SimplePlan &simple,
                             const Problem &problem);
std::set<int> oracle_threat(const SimpleStep &a, const SimplePlan &simple,
                            const Problem &problem);

// Boolean transitive closure (Warshall), for the prune-preserves-reachability
// property.
std::vector<std::vector<bool>> reachability_closure(const Stn &stn);

// All linearizations of the STN's snap nodes consistent with its links.
// Invokes `visit` with node ids in order; enumeration stops early when visit
// returns false or `cap` orders were produced. Returns the number of orders.
long enumerate_linearizations(const Stn &stn, long cap,
                              const std::function<bool(const std::vector<int> &)> &visit);

// Finds a simple-plan step by kind/signature, failing the test when missing.
const SimpleStep &find_step(const SimplePlan &simple, StepKind kind,
                            const std::string &signature, Millis owner_start = -1,
                            int occurrence = 0);

int find_node(const Stn &stn, SnapKind kind, const std::string &signature,
              Millis owner_start = -1);

bool has_link(const Stn &stn, int parent, int child);

}  // namespace stnbt::testing
