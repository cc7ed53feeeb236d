#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "stnbt/pipeline.h"

namespace fs = std::filesystem;
using namespace stnbt;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct Inputs {
    Domain domain;
    Problem problem;
    TemporalPlan plan;
};

Inputs load_inputs(const std::string &domain_path, const std::string &problem_path,
                   const std::string &plan_path) {
    Inputs in;
    in.domain = parse_domain(slurp(domain_path));
    in.problem = parse_problem(slurp(problem_path), in.domain);
    in.plan = parse_plan(slurp(plan_path), in.domain, in.problem);
    return in;
}

DurationModel model_from_json(const nlohmann::json &j) {
    DurationModel m;
    std::string dist = j.value("dist", std::string("planned"));
    if (dist == "fixed") {
        m.kind = DurationModel::Kind::Fixed;
        m.a = j.value("value", 0.0);
    } else if (dist == "uniform") {
        m.kind = DurationModel::Kind::Uniform;
        m.a = j.value("lo", 0.0);
        m.b = j.value("hi", 0.0);
    } else if (dist == "normal") {
        m.kind = DurationModel::Kind::Normal;
        m.a = j.value("mean", 0.0);
        m.b = j.value("stdev", 0.0);
    } else if (dist == "planned") {
        m.kind = DurationModel::Kind::Planned;
    } else {
        throw std::runtime_error("unknown duration distribution: " + dist);
    }
    m.fail = j.value("fail", false);
    return m;
}

PerformerConfig load_durations(const std::string &path, std::uint64_t seed) {
    PerformerConfig config;
    config.seed = seed;
    if (path.empty()) return config;
    nlohmann::json j = nlohmann::json::parse(slurp(path));
    nlohmann::json by_name = j.value("by_name", nlohmann::json::object());
    nlohmann::json by_signature = j.value("by_signature", nlohmann::json::object());
    for (const auto &[key, value] : by_name.items()) {
        config.by_name[key] = model_from_json(value);
    }
    for (const auto &[key, value] : by_signature.items()) {
        config.by_signature[key] = model_from_json(value);
    }
    return config;
}

struct EmitSet {
    std::vector<std::string> wanted;
    fs::path out_dir = ".";

    bool has(const std::string &name) const {
        for (const auto &w : wanted) {
            if (w == name || w == "all") return true;
        }
        return false;
    }
};

void emit_compile_artifacts(const EmitSet &emit, const Compiled &compiled,
                            const TemporalPlan &plan) {
    fs::create_directories(emit.out_dir);
    if (emit.has("stn.dot")) spit(emit.out_dir / "stn.dot", export_stn_dot(compiled.stn));
    if (emit.has("stn.json")) spit(emit.out_dir / "stn.json", export_stn_json(compiled.stn));
    if (emit.has("bt.xml")) spit(emit.out_dir / "bt.xml", export_bt_xml(compiled.bt));
    if (emit.has("bt.dot")) spit(emit.out_dir / "bt.dot", export_bt_dot(compiled.bt));
    if (emit.has("plan.txt")) spit(emit.out_dir / "plan.txt", render_plan(plan));
    if (emit.has("causal.json")) {
        spit(emit.out_dir / "causal.json",
             causal_results_json(compiled.simple, compiled.states));
    }
}

int cmd_compile(const std::string &domain_path, const std::string &problem_path,
                const std::string &plan_path, const std::string &stn_in,
                const StnOptions &opts, const EmitSet &emit) {
    if (!stn_in.empty()) {
        Stn stn = stn_from_json(slurp(stn_in));
        DistanceMatrix dm = propagate(stn);  // throws on negative cycle
        BehaviorTree bt = build_bt(stn, dm);
        fs::create_directories(emit.out_dir);
        if (emit.has("stn.dot")) spit(emit.out_dir / "stn.dot", export_stn_dot(stn));
        if (emit.has("stn.json")) spit(emit.out_dir / "stn.json", export_stn_json(stn));
        if (emit.has("bt.xml")) spit(emit.out_dir / "bt.xml", export_bt_xml(bt));
        if (emit.has("bt.dot")) spit(emit.out_dir / "bt.dot", export_bt_dot(bt));
        std::cout << "stn consistent: " << stn.nodes.size() << " nodes\n";
        return 0;
    }
    Inputs in = load_inputs(domain_path, problem_path, plan_path);
    Compiled compiled = compile_plan(in.problem, in.plan, opts);
    emit_compile_artifacts(emit, compiled, in.plan);
    std::cout << "compiled: " << in.plan.steps.size() << " actions, "
              << compiled.stn.nodes.size() << " stn nodes, " << compiled.bt.nodes.size()
              << " bt nodes\n";
    return 0;
}

int cmd_validate(const std::string &domain_path, const std::string &problem_path,
                 const std::string &plan_path, bool as_json) {
    Inputs in = load_inputs(domain_path, problem_path, plan_path);
    ValidationReport report = validate_plan(in.problem, in.plan);
    if (as_json) {
        std::cout << report.to_json() << "\n";
    } else if (report.valid) {
        std::cout << "plan valid\n";
    } else {
        std::cout << "plan invalid";
        if (report.first_failure) {
            std::cout << ": " << report.first_failure->step << " requires "
                      << report.first_failure->literal.str() << " at t="
                      << format_seconds(report.first_failure->time_ms);
        }
        std::cout << "\n";
    }
    return report.valid ? 0 : 1;
}

int cmd_execute(const std::string &domain_path, const std::string &problem_path,
                const std::string &plan_path, const StnOptions &stn_opts,
                const std::string &durations_path, std::uint64_t seed,
                const std::string &clock, bool monitor_overall, const EmitSet &emit) {
    Inputs in = load_inputs(domain_path, problem_path, plan_path);
    Compiled compiled = compile_plan(in.problem, in.plan, stn_opts);
    emit_compile_artifacts(emit, compiled, in.plan);

    SimulatedPerformer performer(load_durations(durations_path, seed));
    ExecutorOptions exec_opts;
    exec_opts.clock = clock == "wall" ? ClockMode::Wall : ClockMode::Virtual;
    exec_opts.monitor_overall = monitor_overall;
    ExecutionResult result = run(compiled.bt, in.problem, performer, exec_opts);

    if (emit.has("trace.jsonl")) spit(emit.out_dir / "trace.jsonl", result.trace_jsonl());
    if (emit.has("gantt.txt")) spit(emit.out_dir / "gantt.txt", gantt_text(result.trace));
    if (emit.has("gantt.svg")) spit(emit.out_dir / "gantt.svg", gantt_svg(result.trace));

    std::cout << (result.status == TickStatus::Success ? "SUCCESS" : "FAILURE")
              << " makespan " << format_seconds(result.makespan) << "s\n";
    if (!result.diagnostic.empty()) std::cout << result.diagnostic << "\n";
    return result.status == TickStatus::Success ? 0 : 1;
}

int cmd_generate(const GeneratorConfig &config, int count, const fs::path &out_dir) {
    fs::create_directories(out_dir);
    GeneratorConfig cfg = config;
    for (int i = 0; i < count; ++i) {
        cfg.seed = config.seed + static_cast<std::uint64_t>(i);
        GeneratedInstance inst = generate_instance(cfg);
        std::string stem = "gen" + std::to_string(cfg.seed);
        spit(out_dir / (stem + "-domain.pddl"), render_domain(inst.domain));
        spit(out_dir / (stem + "-problem.pddl"), render_problem(inst.problem));
        spit(out_dir / (stem + "-plan.txt"), render_plan(inst.plan));
        std::cout << stem << ": " << inst.plan.steps.size() << " steps\n";
    }
    return 0;
}

int cmd_bench(const std::string &domain_path, const std::string &problem_path,
              const std::string &plan_path, const StnOptions &stn_opts,
              const std::string &durations_path, std::uint64_t seed, int runs) {
    Inputs in = load_inputs(domain_path, problem_path, plan_path);
    BenchStats stats =
        run_bench(in.problem, in.plan, stn_opts, load_durations(durations_path, seed), runs);
    std::printf("%-12s %10s %10s %10s %10s %10s\n", "", "Mean", "Stdev", "Median", "Max",
                "Min");
    std::printf("%-12s %10.2f %10.2f %10.2f %10.2f %10.2f\n", "STN", stats.mean,
                stats.stdev, stats.median, stats.max, stats.min);
    double sequential = static_cast<double>(sequential_duration_sum(in.plan)) / 1000.0;
    std::printf("sequential sum of planned durations: %.2f s\n", sequential);
    if (stats.failures > 0) {
        std::printf("failures: %d of %d runs\n", stats.failures, stats.runs);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"temporal plan -> STN -> behavior tree compiler and executor"};
    app.require_subcommand(1);

    std::string domain_path, problem_path, plan_path, stn_in, durations_path;
    std::string clock = "virtual";
    std::string out_dir = ".";
    std::vector<std::string> emits;
    bool flexible = false, force = false, as_json = false, monitor_overall = false;
    std::uint64_t seed = 1;
    int runs = 10, count = 1;
    GeneratorConfig gen_config;

    auto add_plan_inputs = [&](CLI::App *cmd, bool required) {
        auto *d = cmd->add_option("--domain", domain_path, "PDDL domain file")
                      ->check(CLI::ExistingFile);
        auto *p = cmd->add_option("--problem", problem_path, "PDDL problem file")
                      ->check(CLI::ExistingFile);
        auto *f = cmd->add_option("--plan", plan_path, "time-triggered plan file")
                      ->check(CLI::ExistingFile);
        if (required) {
            d->required();
            p->required();
            f->required();
        }
    };

    CLI::App *compile = app.add_subcommand("compile", "build the STN and behavior tree");
    add_plan_inputs(compile, false);
    compile->add_option("--stn-in", stn_in, "load an STN from JSON instead of a plan")
        ->check(CLI::ExistingFile);
    compile->add_flag("--flexible", flexible, "relax root links to [t, inf)");
    compile->add_flag("--force", force, "skip the plan validity gate");
    compile->add_option("--out", out_dir, "artifact output directory");
    compile->add_option("--emit", emits,
                        "artifacts: stn.dot stn.json bt.xml bt.dot plan.txt causal.json all");

    CLI::App *validate = app.add_subcommand("validate", "run the plan validity oracle");
    add_plan_inputs(validate, true);
    validate->add_flag("--json", as_json, "print the report as JSON");

    CLI::App *execute = app.add_subcommand("execute", "compile and run the plan");
    add_plan_inputs(execute, true);
    execute->add_flag("--flexible", flexible, "relax root links to [t, inf)");
    execute->add_flag("--force", force, "skip the plan validity gate");
    execute->add_option("--seed", seed, "performer random seed");
    execute->add_option("--durations", durations_path, "duration model JSON")
        ->check(CLI::ExistingFile);
    execute->add_option("--clock", clock, "virtual or wall")
        ->check(CLI::IsMember({"virtual", "wall"}));
    execute->add_flag("--monitor-overall", monitor_overall,
                      "check overall conditions every tick");
    execute->add_option("--out", out_dir, "artifact output directory");
    execute->add_option("--emit", emits,
                        "artifacts: stn.dot stn.json bt.xml bt.dot plan.txt trace.jsonl "
                        "gantt.txt gantt.svg all");

    CLI::App *generate = app.add_subcommand("generate", "emit random valid instances");
    generate->add_option("--out", out_dir, "output directory")->required();
    generate->add_option("--count", count, "number of instances");
    generate->add_option("--seed", gen_config.seed, "base seed");
    generate->add_option("--actions", gen_config.schema_pool, "action pool size");
    generate->add_option("--fluents", gen_config.fluent_pool, "fluent pool size");
    generate->add_option("--length", gen_config.plan_length, "plan length");
    generate->add_option("--dur-min", gen_config.dur_min, "min duration (ms)");
    generate->add_option("--dur-max", gen_config.dur_max, "max duration (ms)");

    CLI::App *bench = app.add_subcommand("bench", "makespan statistics over seeded runs");
    add_plan_inputs(bench, true);
    bench->add_flag("--flexible", flexible, "relax root links to [t, inf)");
    bench->add_option("--runs", runs, "number of runs");
    bench->add_option("--seed", seed, "base performer seed");
    bench->add_option("--durations", durations_path, "duration model JSON")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad arguments and missing files are config errors
    }

    StnOptions stn_opts;
    stn_opts.flexible_root = flexible;
    stn_opts.force = force;
    EmitSet emit{emits, out_dir};

    try {
        if (compile->parsed()) {
            if (stn_in.empty() &&
                (domain_path.empty() || problem_path.empty() || plan_path.empty())) {
                std::cerr << "compile needs --domain/--problem/--plan or --stn-in\n";
                return 2;
            }
            return cmd_compile(domain_path, problem_path, plan_path, stn_in, stn_opts, emit);
        }
        if (validate->parsed()) {
            return cmd_validate(domain_path, problem_path, plan_path, as_json);
        }
        if (execute->parsed()) {
            return cmd_execute(domain_path, problem_path, plan_path, stn_opts,
                               durations_path, seed, clock, monitor_overall, emit);
        }
        if (generate->parsed()) {
            return cmd_generate(gen_config, count, out_dir);
        }
        if (bench->parsed()) {
            return cmd_bench(domain_path, problem_path, plan_path, stn_opts, durations_path,
                             seed, runs);
        }
    } catch (const InvalidPlanError &err) {
        std::cerr << err.what() << "\n";
        return 2;
    } catch (const InconsistentStnError &err) {
        std::cerr << err.what() << "\n";
        return 2;
    } catch (const std::exception &err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
