#include "stnbt/pipeline.h"

#include <algorithm>
#include <cmath>

namespace stnbt {

Compiled compile_plan(const Problem &problem, const TemporalPlan &plan,
                      const StnOptions &opts) {
    Compiled out;
    out.simple = induced_simple_plan(plan);
    out.states = state_sequence(problem, out.simple);
    out.stn = build_stn(problem, plan, opts);
    out.dm = propagate(out.stn);
    out.bt = build_bt(out.stn, out.dm);
    return out;
}

ExecutionResult compile_and_run(const Problem &problem, const TemporalPlan &plan,
                                const StnOptions &stn_opts,
                                const PerformerConfig &performer_config,
                                const ExecutorOptions &exec_opts) {
    ExecutionResult result;
    try {
        Compiled compiled = compile_plan(problem, plan, stn_opts);
        SimulatedPerformer performer(performer_config);
        return run(compiled.bt, problem, performer, exec_opts);
    } catch (const InconsistentStnError &err) {
        result.status = TickStatus::Failure;
        result.diagnostic = err.what();
    } catch (const InvalidPlanError &err) {
        result.status = TickStatus::Failure;
        result.diagnostic = err.what();
    }
    return result;
}

BenchStats run_bench(const Problem &problem, const TemporalPlan &plan,
                     const StnOptions &stn_opts, PerformerConfig performer_config,
                     int n_runs) {
    BenchStats stats;
    Compiled compiled = compile_plan(problem, plan, stn_opts);
    std::uint64_t base_seed = performer_config.seed;
    for (int i = 0; i < n_runs; ++i) {
        performer_config.seed = base_seed + static_cast<std::uint64_t>(i);
        SimulatedPerformer performer(performer_config);
        ExecutionResult result = run(compiled.bt, problem, performer);
        ++stats.runs;
        if (result.status != TickStatus::Success) {
            ++stats.failures;
            continue;
        }
        stats.makespans_s.push_back(static_cast<double>(result.makespan) / 1000.0);
        stats.intervals.push_back(action_intervals(result.trace));
    }
    if (stats.makespans_s.empty()) return stats;
    std::vector<double> sorted = stats.makespans_s;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0;
    for (double v : sorted) sum += v;
    size_t n = sorted.size();
    stats.mean = sum / static_cast<double>(n);
    double var = 0;
    for (double v : sorted) var += (v - stats.mean) * (v - stats.mean);
    stats.stdev = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    stats.median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    stats.min = sorted.front();
    stats.max = sorted.back();
    return stats;
}

Millis sequential_duration_sum(const TemporalPlan &plan) {
    Millis sum = 0;
    for (const auto &s : plan.steps) sum += s.duration;
    return sum;
}

}  // namespace stnbt
