#pragma once

#include <cstdint>

#include "stnbt/pddl.h"

namespace stnbt {

struct GeneratorConfig {
    int schema_pool = 5;
    int fluent_pool = 8;
    int plan_length = 4;
    Millis dur_min = 1000;
    Millis dur_max = 10000;
    std::uint64_t seed = 1;
};

struct GeneratedInstance {
    Domain domain;
    Problem problem;
    TemporalPlan plan;
};

// Valid-by-construction random instances: the generator simulates forward and
// only commits steps whose conditions hold and whose effects neither collide
// with co-happening effects nor break a protected overall window.
GeneratedInstance generate_instance(const GeneratorConfig &config);

// Flips, removes or inserts exactly one literal in one grounded plan step.
// The result may or may not still be a valid plan.
GeneratedInstance mutate_instance(const GeneratedInstance &instance,
                                  std::uint64_t seed);

}  // namespace stnbt
