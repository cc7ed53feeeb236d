#pragma once

#include <string>
#include <vector>

#include "stnbt/bt.h"
#include "stnbt/executor.h"
#include "stnbt/generator.h"
#include "stnbt/stn.h"

namespace stnbt {

struct Compiled {
    SimplePlan simple;
    StateSequence states;
    Stn stn;
    DistanceMatrix dm;
    BehaviorTree bt;
};

Compiled compile_plan(const Problem &problem, const TemporalPlan &plan,
                      const StnOptions &opts = {});

// Compile (optionally forced past the validity oracle) and execute with the
// given performer config; a compile-time inconsistency counts as a failed
// execution.
ExecutionResult compile_and_run(const Problem &problem, const TemporalPlan &plan,
                                const StnOptions &stn_opts,
                                const PerformerConfig &performer_config,
                                const ExecutorOptions &exec_opts = {});

struct BenchStats {
    double mean = 0;
    double stdev = 0;
    double median = 0;
    double max = 0;
    double min = 0;
    int runs = 0;
    int failures = 0;
    std::vector<double> makespans_s;
    std::vector<std::vector<ActionInterval>> intervals;
};

BenchStats run_bench(const Problem &problem, const TemporalPlan &plan,
                     const StnOptions &stn_opts, PerformerConfig performer_config,
                     int n_runs);

// Reference for parallel-overlap checks: the plan executed one action at a
// time would take the sum of the planned durations.
Millis sequential_duration_sum(const TemporalPlan &plan);

}  // namespace stnbt
