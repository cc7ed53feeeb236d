#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stnbt/bt.h"

namespace stnbt {

enum class TickStatus { Success, Failure, Running };

const char *tick_status_name(TickStatus s);

class ActionPerformer {
public:
    virtual ~ActionPerformer() = default;

    enum class Poll { Running, Done, Failed };

    // Accepts a dispatch and returns a token for polling.
    virtual int start(const std::string &signature, Millis planned_duration,
                      Millis now) = 0;
    virtual Poll poll(int token, Millis now) = 0;
    // Earliest pending completion, used by the virtual clock.
    virtual std::optional<Millis> next_completion() const = 0;
};

struct DurationModel {
    enum class Kind { Planned, Fixed, Uniform, Normal };
    Kind kind = Kind::Planned;
    double a = 0;  // fixed seconds / uniform lo / normal mean
    double b = 0;  // uniform hi / normal stddev
    bool fail = false;  // performer reports failure at completion time
};

struct PerformerConfig {
    std::map<std::string, DurationModel> by_signature;
    std::map<std::string, DurationModel> by_name;  // falls back on action name
    std::uint64_t seed = 0;

    const DurationModel *lookup(const std::string &signature) const;
};

// Deterministic given the seed: durations are sampled in dispatch order.
class SimulatedPerformer : public ActionPerformer {
public:
    explicit SimulatedPerformer(PerformerConfig config = {});

    int start(const std::string &signature, Millis planned_duration,
              Millis now) override;
    Poll poll(int token, Millis now) override;
    std::optional<Millis> next_completion() const override;

private:
    struct Dispatch {
        Millis done_at;
        bool fail;
        bool polled_done = false;
    };
    PerformerConfig config_;
    std::mt19937_64 rng_;
    std::vector<Dispatch> dispatches_;
};

struct TraceEvent {
    Millis clock = 0;
    int node = -1;
    std::string event;   // dispatch, complete, apply, check, status, finished, ...
    std::string detail;

    std::string to_json() const;
};

enum class ClockMode { Virtual, Wall };

struct ExecutorOptions {
    ClockMode clock = ClockMode::Virtual;
    Millis wall_tick_ms = 100;
    bool monitor_overall = false;
    std::int64_t max_cycles = 2'000'000;
};

struct ExecutionResult {
    TickStatus status = TickStatus::Failure;
    Millis makespan = 0;
    WorldState final_state;
    std::vector<TraceEvent> trace;
    std::string diagnostic;

    std::string trace_jsonl() const;
};

ExecutionResult run(const BehaviorTree &tree, const Problem &problem,
                    ActionPerformer &performer, const ExecutorOptions &opts = {});

// Start/end clocks per executed action occurrence, extracted from a trace.
struct ActionInterval {
    std::string signature;
    int start_node = -1;
    Millis start = 0;
    Millis end = 0;
    bool completed = false;
};

std::vector<ActionInterval> action_intervals(const std::vector<TraceEvent> &trace);

std::string gantt_text(const std::vector<TraceEvent> &trace);
std::string gantt_svg(const std::vector<TraceEvent> &trace);

}  // namespace stnbt
