#include "stnbt/executor.h"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace stnbt {

const char *tick_status_name(TickStatus s) {
    switch (s) {
        case TickStatus::Success: return "success";
        case TickStatus::Failure: return "failure";
        case TickStatus::Running: return "running";
    }
    return "?";
}

const DurationModel *PerformerConfig::lookup(const std::string &signature) const {
    auto it = by_signature.find(signature);
    if (it != by_signature.end()) return &it->second;
    // "(name arg ...)" -> name
    size_t space = signature.find(' ');
    std::string name = signature.substr(1, (space == std::string::npos
                                                ? signature.size() - 2
                                                : space - 1));
    auto nit = by_name.find(name);
    if (nit != by_name.end()) return &nit->second;
    return nullptr;
}

SimulatedPerformer::SimulatedPerformer(PerformerConfig config)
    : config_(std::move(config)), rng_(config_.seed) {}

int SimulatedPerformer::start(const std::string &signature, Millis planned_duration,
                              Millis now) {
    Millis duration = planned_duration;
    bool fail = false;
    if (const DurationModel *model = config_.lookup(signature)) {
        fail = model->fail;
        switch (model->kind) {
            case DurationModel::Kind::Planned:
                break;
            case DurationModel::Kind::Fixed:
                duration = static_cast<Millis>(std::llround(model->a * 1000.0));
                break;
            case DurationModel::Kind::Uniform: {
                std::uniform_real_distribution<double> dist(model->a, model->b);
                duration = static_cast<Millis>(std::llround(dist(rng_) * 1000.0));
                break;
            }
            case DurationModel::Kind::Normal: {
                std::normal_distribution<double> dist(model->a, model->b);
                double sample = dist(rng_);
                while (sample < 0) sample = dist(rng_);
                duration = static_cast<Millis>(std::llround(sample * 1000.0));
                break;
            }
        }
    }
    dispatches_.push_back({now + std::max<Millis>(duration, 0), fail});
    return static_cast<int>(dispatches_.size()) - 1;
}

ActionPerformer::Poll SimulatedPerformer::poll(int token, Millis now) {
    Dispatch &d = dispatches_.at(static_cast<size_t>(token));
    if (now < d.done_at) return Poll::Running;
    d.polled_done = true;
    return d.fail ? Poll::Failed : Poll::Done;
}

std::optional<Millis> SimulatedPerformer::next_completion() const {
    std::optional<Millis> best;
    for (const auto &d : dispatches_) {
        if (d.polled_done) continue;
        if (!best || d.done_at < *best) best = d.done_at;
    }
    return best;
}

std::string TraceEvent::to_json() const {
    std::ostringstream out;
    out << "{\"clock_ms\": " << clock << ", \"node\": " << node << ", \"event\": \""
        << event << "\"";
    if (!detail.empty()) {
        out << ", \"detail\": \"";
        for (char c : detail) {
            if (c == '"' || c == '\\') out << '\\';
            out << c;
        }
        out << "\"";
    }
    out << "}";
    return out.str();
}

std::string ExecutionResult::trace_jsonl() const {
    std::string out;
    for (const auto &e : trace) out += e.to_json() + "\n";
    return out;
}

namespace {

std::string lits_text(const LiteralSet &lits) {
    std::string out;
    for (const auto &l : lits) {
        if (!out.empty()) out += " ";
        out += l.str();
    }
    return out;
}

class Engine {
public:
    Engine(const BehaviorTree &tree, const Problem &problem, ActionPerformer &performer,
           const ExecutorOptions &opts)
        : tree_(tree), performer_(performer), opts_(opts) {
        state_.true_fluents = problem.init;
        status_.assign(tree.nodes.size(), TickStatus::Running);
        entered_.assign(tree.nodes.size(), false);
        seq_pos_.assign(tree.nodes.size(), 0);
        tokens_.assign(tree.nodes.size(), -1);
    }

    ExecutionResult run() {
        ExecutionResult result;
        if (tree_.root < 0) {
            result.status = TickStatus::Success;
            result.final_state = state_;
            return result;
        }
        finished_[0] = 0;  // the init node has "executed" before the first tick
        TickStatus root_status = TickStatus::Running;
        std::int64_t cycles = 0;
        while (true) {
            progress_ = false;
            pending_checks_ = false;
            min_deadline_.reset();
            root_status = tick(tree_.root);
            settling_ = false;
            if (opts_.monitor_overall && root_status == TickStatus::Running) {
                if (!monitor_overall()) {
                    root_status = TickStatus::Failure;
                }
            }
            if (root_status != TickStatus::Running) break;
            if (++cycles > opts_.max_cycles) {
                diagnostic_ = "cycle budget exhausted";
                root_status = TickStatus::Failure;
                break;
            }
            if (progress_) continue;  // settle all same-clock consequences
            if (pending_checks_) {
                settling_ = true;  // the instant is quiescent: verdicts are due
                continue;
            }
            std::optional<Millis> next = performer_.next_completion();
            if (min_deadline_ && (!next || *min_deadline_ < *next)) next = min_deadline_;
            if (!next) {
                diagnostic_ = describe_deadlock();
                event(-1, "deadlock", diagnostic_);
                root_status = TickStatus::Failure;
                break;
            }
            if (opts_.clock == ClockMode::Virtual) {
                clock_ = std::max(clock_, *next);
                event(-1, "clock", std::to_string(clock_));
            } else {
                std::this_thread::sleep_for(std::chrono::milliseconds(opts_.wall_tick_ms));
                clock_ += opts_.wall_tick_ms;
            }
        }
        event(tree_.root, "result", tick_status_name(root_status));
        result.status = root_status;
        result.makespan = clock_;
        result.final_state = state_;
        result.trace = std::move(trace_);
        result.diagnostic = diagnostic_;
        return result;
    }

private:
    TickStatus tick(int id) {
        const BtNode &n = tree_.nodes[id];
        TickStatus &st = status_[id];
        if (entered_[id] && st != TickStatus::Running) return st;
        bool first_tick = !entered_[id];
        entered_[id] = true;
        TickStatus out = TickStatus::Running;
        switch (n.kind) {
            case BtKind::Sequence: {
                out = TickStatus::Success;
                size_t &pos = seq_pos_[id];
                while (pos < n.children.size()) {
                    TickStatus s = tick(n.children[pos]);
                    if (s == TickStatus::Success) {
                        ++pos;
                        continue;
                    }
                    out = s;
                    break;
                }
                break;
            }
            case BtKind::Parallel: {
                bool any_running = false;
                bool any_failed = false;
                for (int c : n.children) {
                    TickStatus s = tick(c);
                    if (s == TickStatus::Failure) any_failed = true;
                    if (s == TickStatus::Running) any_running = true;
                }
                out = any_failed ? TickStatus::Failure
                                 : (any_running ? TickStatus::Running : TickStatus::Success);
                break;
            }
            case BtKind::WaitTime:
                if (clock_ >= n.time) {
                    out = TickStatus::Success;
                } else {
                    if (!min_deadline_ || n.time < *min_deadline_) min_deadline_ = n.time;
                    out = TickStatus::Running;
                }
                break;
            case BtKind::CheckTime:
                out = clock_ > n.time ? TickStatus::Failure : TickStatus::Success;
                if (out == TickStatus::Failure) {
                    event(id, "check_fail",
                          "deadline " + std::to_string(n.time) + " missed");
                }
                break;
            case BtKind::WaitAction:
                out = finished_.count(n.stn_ref) ? TickStatus::Success : TickStatus::Running;
                break;
            case BtKind::CheckAction:
                // "Finished by this clock instant": while the instant still
                // settles the verdict is open; once it is quiescent an
                // unfinished requirement is a definitive failure.
                if (finished_.count(n.stn_ref)) {
                    out = TickStatus::Success;
                } else if (settling_) {
                    event(id, "check_fail", "required " + n.signature + ":" +
                                                snap_kind_name(n.snap) + " unfinished");
                    out = TickStatus::Failure;
                } else {
                    pending_checks_ = true;
                    out = TickStatus::Running;
                }
                break;
            case BtKind::CheckAtStart:
            case BtKind::CheckOverall:
            case BtKind::CheckAtEnd: {
                bool ok = check_conditions(n.literals, state_);
                event(id, ok ? "check_pass" : "check_fail", lits_text(n.literals));
                out = ok ? TickStatus::Success : TickStatus::Failure;
                break;
            }
            case BtKind::ApplyAtStart:
            case BtKind::ApplyAtEnd:
                state_ = apply_effects(std::move(state_), n.literals);
                event(id, "apply", lits_text(n.literals));
                out = TickStatus::Success;
                break;
            case BtKind::ExecuteAction:
                if (n.snap == SnapKind::Start) {
                    tokens_[id] = performer_.start(n.signature, n.planned_duration, clock_);
                    start_token_[n.stn_ref] = tokens_[id];
                    event(id, "dispatch", n.signature);
                    out = TickStatus::Success;
                } else {
                    out = tick_end_join(id);
                }
                break;
            case BtKind::SuccessLeaf:
                out = TickStatus::Success;
                break;
        }
        if (out != st || first_tick) {
            if (out != st) progress_ = true;
            st = out;
            event(id, "status", tick_status_name(out));
            if (out == TickStatus::Success && n.stn_ref >= 0 &&
                (n.kind == BtKind::Sequence || n.kind == BtKind::SuccessLeaf)) {
                finished_[n.stn_ref] = clock_;
                event(id, "finished", n.signature + ":" + snap_kind_name(n.snap));
            }
        }
        return out;
    }

    TickStatus tick_end_join(int id) {
        const BtNode &n = tree_.nodes[id];
        // The matching start dispatch may live in another branch; wait for it.
        int start_node = paired_start(n.stn_ref);
        auto tok = start_token_.find(start_node);
        if (tok == start_token_.end()) return TickStatus::Running;
        switch (performer_.poll(tok->second, clock_)) {
            case ActionPerformer::Poll::Running:
                return TickStatus::Running;
            case ActionPerformer::Poll::Failed:
                event(id, "performer_failed", n.signature);
                return TickStatus::Failure;
            case ActionPerformer::Poll::Done:
                event(id, "complete", n.signature);
                return TickStatus::Success;
        }
        return TickStatus::Failure;
    }

    int paired_start(int end_stn_ref) const {
        // End exec leaves poll the token dispatched by their start leaf. The
        // start node id is always end id - 1 by construction of the STN.
        return end_stn_ref - 1;
    }

    bool monitor_overall() {
        for (const auto &[stn_ref, token] : start_token_) {
            int end_ref = stn_ref + 1;
            if (finished_.count(end_ref)) continue;
            auto site = tree_.action_index.find(end_ref);
            if (site == tree_.action_index.end()) continue;
            const BtNode &end_exec = tree_.nodes[site->second];
            (void)end_exec;
            const LiteralSet *overall = overall_of(end_ref);
            if (!overall || overall->empty()) continue;
            if (!check_conditions(*overall, state_)) {
                event(site->second, "overall_violation", lits_text(*overall));
                diagnostic_ = "overall condition violated while running";
                return false;
            }
        }
        return true;
    }

    const LiteralSet *overall_of(int end_ref) {
        for (const auto &node : tree_.nodes) {
            if (node.kind == BtKind::CheckOverall && node.stn_ref == end_ref) {
                return &node.literals;
            }
        }
        return nullptr;
    }

    std::string describe_deadlock() {
        std::string out = "no runnable leaf and no pending release; waiting:";
        for (size_t i = 0; i < tree_.nodes.size(); ++i) {
            const BtNode &n = tree_.nodes[i];
            if (!entered_[i] || status_[i] != TickStatus::Running) continue;
            if (n.kind == BtKind::WaitAction) {
                out += " wait(" + n.signature + ":" + snap_kind_name(n.snap) + ")";
            }
            if (n.kind == BtKind::ExecuteAction && n.snap == SnapKind::End) {
                out += " join(" + n.signature + ")";
            }
        }
        return out;
    }

    void event(int node, const std::string &kind, const std::string &detail) {
        trace_.push_back({clock_, node, kind, detail});
    }

    const BehaviorTree &tree_;
    ActionPerformer &performer_;
    ExecutorOptions opts_;
    WorldState state_;
    Millis clock_ = 0;
    bool progress_ = false;
    bool pending_checks_ = false;
    bool settling_ = false;
    std::optional<Millis> min_deadline_;
    std::vector<TickStatus> status_;
    std::vector<bool> entered_;
    std::vector<size_t> seq_pos_;
    std::vector<int> tokens_;
    std::map<int, int> start_token_;   // stn start node -> performer token
    std::map<int, Millis> finished_;   // stn node -> completion clock
    std::vector<TraceEvent> trace_;
    std::string diagnostic_;
};

}  // namespace

ExecutionResult run(const BehaviorTree &tree, const Problem &problem,
                    ActionPerformer &performer, const ExecutorOptions &opts) {
    Engine engine(tree, problem, performer, opts);
    return engine.run();
}

std::vector<ActionInterval> action_intervals(const std::vector<TraceEvent> &trace) {
    std::vector<ActionInterval> out;
    std::map<std::string, std::vector<size_t>> open;  // signature -> fifo of indices
    for (const auto &e : trace) {
        if (e.event == "dispatch") {
            ActionInterval iv;
            iv.signature = e.detail;
            iv.start_node = e.node;
            iv.start = e.clock;
            open[e.detail].push_back(out.size());
            out.push_back(iv);
        } else if (e.event == "complete") {
            auto it = open.find(e.detail);
            if (it != open.end() && !it->second.empty()) {
                out[it->second.front()].end = e.clock;
                out[it->second.front()].completed = true;
                it->second.erase(it->second.begin());
            }
        }
    }
    return out;
}

namespace {

constexpr int kGanttWidth = 60;

}  // namespace

std::string gantt_text(const std::vector<TraceEvent> &trace) {
    auto intervals = action_intervals(trace);
    std::ostringstream out;
    out << "action                                    start      end\n";
    if (intervals.empty()) return out.str();
    Millis horizon = 0;
    size_t name_width = 0;
    for (const auto &iv : intervals) {
        horizon = std::max(horizon, iv.completed ? iv.end : iv.start);
        name_width = std::max(name_width, iv.signature.size());
    }
    horizon = std::max<Millis>(horizon, 1);
    for (const auto &iv : intervals) {
        Millis end = iv.completed ? iv.end : horizon;
        int from = static_cast<int>(iv.start * kGanttWidth / horizon);
        int to = std::max(from + 1, static_cast<int>(end * kGanttWidth / horizon));
        out << iv.signature << std::string(name_width - iv.signature.size() + 1, ' ');
        out << std::string(static_cast<size_t>(from), ' ')
            << std::string(static_cast<size_t>(to - from), '#')
            << std::string(static_cast<size_t>(kGanttWidth - to), ' ');
        out << " " << format_seconds(iv.start) << " .. "
            << (iv.completed ? format_seconds(iv.end) : "?") << "\n";
    }
    return out.str();
}

std::string gantt_svg(const std::vector<TraceEvent> &trace) {
    auto intervals = action_intervals(trace);
    Millis horizon = 1;
    for (const auto &iv : intervals) {
        horizon = std::max(horizon, iv.completed ? iv.end : iv.start);
    }
    const int row_h = 24;
    const int label_w = 320;
    const int chart_w = 640;
    int height = row_h * static_cast<int>(intervals.size()) + 40;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + chart_w + 20
        << "\" height=\"" << height << "\">\n";
    int y = 20;
    for (const auto &iv : intervals) {
        Millis end = iv.completed ? iv.end : horizon;
        int x0 = label_w + static_cast<int>(iv.start * chart_w / horizon);
        int x1 = label_w + static_cast<int>(end * chart_w / horizon);
        out << "  <text x=\"4\" y=\"" << y + 15 << "\" font-family=\"monospace\" font-size=\"12\">"
            << iv.signature << "</text>\n";
        out << "  <rect x=\"" << x0 << "\" y=\"" << y + 4 << "\" width=\""
            << std::max(1, x1 - x0) << "\" height=\"" << row_h - 8
            << "\" fill=\"#4b8bbe\"/>\n";
        y += row_h;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace stnbt
