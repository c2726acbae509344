#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtsched/analysis.hpp"
#include "mtsched/experiment.hpp"
#include "mtsched/io.hpp"
#include "mtsched/multiphase.hpp"
#include "mtsched/rng.hpp"
#include "mtsched/taskgen.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;

fs::path default_out_dir() {
    if (const char* env = std::getenv("MTSCHED_OUT_DIR")) return fs::path(env);
    return fs::current_path();
}

mtsched::SchedulerSpec resolve_spec(const mtsched::TaskSystem& system,
                                    const std::string& sched,
                                    const std::string& order) {
    if (!order.empty()) return mtsched::scheduler_from_order(system, order);
    return mtsched::make_scheduler(system, sched);
}

mtsched::Time default_horizon(const mtsched::TaskSystem& system,
                              const mtsched::SchedulerSpec& spec) {
    const mtsched::Time P = mtsched::hyperperiod(system);
    std::vector<mtsched::OffsetPeriod> entries;
    if (const auto* g = std::get_if<mtsched::GlobalFspSpec>(&spec)) {
        for (const mtsched::SubRef& s : g->order)
            entries.push_back({system.tasks[s.task].offset, system.tasks[s.task].period});
    } else {
        const mtsched::TaskOrder& tasks =
            std::holds_alternative<mtsched::HierarchicalSpec>(spec)
                ? std::get<mtsched::HierarchicalSpec>(spec).task_order
                : std::get<mtsched::GangSpec>(spec).task_order;
        for (int idx : tasks)
            entries.push_back({system.tasks[idx].offset, system.tasks[idx].period});
    }
    const std::vector<mtsched::Time> stab = mtsched::stabilization_points(entries);
    return (stab.empty() ? 0 : stab.back()) + P;
}

mtsched::SimulationResult simulate_spec(const mtsched::TaskSystem& system,
                                        const mtsched::SchedulerSpec& spec,
                                        mtsched::Time horizon) {
    const mtsched::SimOptions opt;  // record everything, run the full horizon
    if (const auto* h = std::get_if<mtsched::HierarchicalSpec>(&spec))
        return mtsched::simulate_threads(
            system, mtsched::flatten_hierarchical(system, h->task_order, h->within),
            horizon, nullptr, opt);
    if (const auto* g = std::get_if<mtsched::GlobalFspSpec>(&spec))
        return mtsched::simulate_threads(system, g->order, horizon, nullptr, opt);
    return mtsched::simulate_gang(system, std::get<mtsched::GangSpec>(spec).task_order,
                                  horizon, nullptr, opt);
}

struct AnalyzeArgs {
    std::string system_path;
    std::string sched = "dm-im";
    std::string order;
    mtsched::Time hyperperiod_bound = 5'000'000;
};

int run_analyze(const AnalyzeArgs& args) {
    const mtsched::TaskSystem system = mtsched::load_system(args.system_path);
    const mtsched::SchedulerSpec spec = resolve_spec(system, args.sched, args.order);
    const mtsched::AnalysisLimits limits{args.hyperperiod_bound};
    const mtsched::AnalysisVerdict verdict = mtsched::run_analysis(system, spec, limits);

    nlohmann::json out = mtsched::verdict_to_json(verdict);
    out["scheduler"] = args.order.empty() ? args.sched : "order";
    out["priority"] = mtsched::scheduler_to_json(spec, system);
    std::cout << out.dump(2) << '\n';
    return verdict.feasible ? kExitFeasible : kExitInfeasible;
}

struct SimulateArgs {
    std::string system_path;
    std::string sched = "dm-im";
    std::string order;
    mtsched::Time horizon = -1;
    std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
    const mtsched::TaskSystem system = mtsched::load_system(args.system_path);
    const mtsched::SchedulerSpec spec = resolve_spec(system, args.sched, args.order);
    const mtsched::Time horizon =
        args.horizon >= 0 ? args.horizon : default_horizon(system, spec);
    const mtsched::SimulationResult sim = simulate_spec(system, spec, horizon);

    if (args.out_path.empty()) {
        mtsched::write_trace_csv(std::cout, sim.trace);
    } else {
        std::ofstream out(args.out_path);
        if (!out) throw std::runtime_error("cannot write " + args.out_path);
        mtsched::write_trace_csv(out, sim.trace);
    }
    if (!sim.misses.empty()) {
        const mtsched::Miss& first = sim.misses.front();
        std::cerr << sim.misses.size() << " deadline miss(es); first: task "
                  << first.thread.task + 1 << " at t=" << first.deadline << '\n';
    }
    return kExitFeasible;
}

struct GenArgs {
    int m = 2;
    std::string dist = "uniform";
    std::uint64_t seed = 1;
    int count = 1;
    mtsched::Time period_min = 1;
    mtsched::Time period_max = 250;
    mtsched::Time hyperperiod_bound = 5'000'000;
    std::string out_dir;
};

int run_gen(const GenArgs& args) {
    const auto dist = mtsched::distribution_from_name(args.dist);
    if (!dist) throw mtsched::ParseError("unknown distribution \"" + args.dist + "\"");
    mtsched::GenConfig cfg;
    cfg.m = args.m;
    cfg.dist = *dist;
    cfg.period_min = args.period_min;
    cfg.period_max = args.period_max;
    cfg.hyperperiod_bound = args.hyperperiod_bound;

    if (args.count == 1 && args.out_dir.empty()) {
        cfg.seed = mtsched::mix_seed(args.seed, 0);
        std::cout << mtsched::system_to_json(mtsched::generate_system(cfg)).dump(2)
                  << '\n';
        return kExitFeasible;
    }
    const fs::path dir = args.out_dir.empty() ? default_out_dir() : fs::path(args.out_dir);
    fs::create_directories(dir);
    for (int i = 0; i < args.count; ++i) {
        cfg.seed = mtsched::mix_seed(args.seed, static_cast<std::uint64_t>(i));
        char name[32];
        std::snprintf(name, sizeof name, "system_%04d.json", i);
        const fs::path path = dir / name;
        mtsched::save_system(path, mtsched::generate_system(cfg));
        std::cout << path.string() << '\n';
    }
    return kExitFeasible;
}

struct ExperimentArgs {
    std::vector<int> platform_sizes;
    std::vector<std::string> dists;
    int count = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
    mtsched::Time period_min = 1;
    mtsched::Time period_max = 250;
    mtsched::Time hyperperiod_bound = 5'000'000;
    std::string out_dir;
};

int run_experiment_cmd(const ExperimentArgs& args) {
    mtsched::ExperimentConfig cfg;
    if (!args.platform_sizes.empty()) cfg.platform_sizes = args.platform_sizes;
    if (!args.dists.empty() && !(args.dists.size() == 1 && args.dists[0] == "all")) {
        cfg.distributions.clear();
        for (const std::string& name : args.dists) {
            const auto dist = mtsched::distribution_from_name(name);
            if (!dist)
                throw mtsched::ParseError("unknown distribution \"" + name + "\"");
            cfg.distributions.push_back(*dist);
        }
    }
    cfg.count_per_cell = args.count;
    cfg.seed = args.seed;
    cfg.jobs = args.jobs;
    cfg.period_min = args.period_min;
    cfg.period_max = args.period_max;
    cfg.hyperperiod_bound = args.hyperperiod_bound;

    const mtsched::ExperimentResult result = mtsched::run_experiment(cfg);

    const fs::path dir = args.out_dir.empty() ? default_out_dir() : fs::path(args.out_dir);
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "records.csv");
        mtsched::write_records_csv(out, result.records);
    }
    std::vector<std::pair<int, mtsched::WcrtComparison>> wcrt_rows;
    for (int m : cfg.platform_sizes) {
        std::ofstream out(dir / ("success_m" + std::to_string(m) + ".csv"));
        mtsched::write_success_csv(out, mtsched::success_table(result.records, m));
        wcrt_rows.emplace_back(m, mtsched::compare_wcrt(result.records, m));
    }
    {
        std::ofstream out(dir / "success_normalized.csv");
        mtsched::write_success_csv(out,
                                   mtsched::success_table_normalized(result.records));
    }
    {
        std::ofstream out(dir / "wcrt.csv");
        mtsched::write_wcrt_csv(out, wcrt_rows);
    }

    std::cout << "records: " << (dir / "records.csv").string() << " ("
              << result.records.size() << " systems)\n";
    for (const auto& [m, cmp] : wcrt_rows) {
        std::int64_t total = 0, dmim = 0, gang = 0;
        for (const mtsched::ExperimentRecord& r : result.records) {
            if (r.m != m) continue;
            ++total;
            dmim += r.dmim_feasible;
            gang += r.gang_feasible;
        }
        std::cout << "m=" << m << ": dmim " << dmim << '/' << total << " feasible, gang "
                  << gang << '/' << total << " feasible; wcrt considered "
                  << cmp.considered << ", dmim wins " << cmp.dmim_wins
                  << ", gang wins " << cmp.gang_wins << ", ties " << cmp.ties << '\n';
    }
    return kExitFeasible;
}

int run_demo(bool as_json) {
    const mtsched::UnpredictabilityDemo demo = mtsched::unpredictability_demo();
    if (as_json) {
        nlohmann::json j{{"full_completion", demo.full_completion},
                         {"reduced_completion", demo.reduced_completion},
                         {"anomaly", demo.anomaly},
                         {"processors", demo.processors},
                         {"observer",
                          {{"task", demo.observer.task + 1},
                           {"thread", demo.observer.sub + 1},
                           {"process", demo.observer.process + 1}}},
                         {"reduced_job",
                          {{"task", demo.reduced_job.task + 1},
                           {"phase", demo.reduced_job.phase + 1},
                           {"thread", demo.reduced_job.sub + 1},
                           {"process", demo.reduced_job.process + 1},
                           {"demand", demo.reduced_demand}}}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "full=" << demo.full_completion
                  << " reduced=" << demo.reduced_completion
                  << (demo.anomaly ? " PREDICTABILITY VIOLATED" : " no anomaly") << '\n';
    }
    return demo.full_completion == 2 && demo.reduced_completion == 4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and exact schedulability analyzer for periodic "
                 "multi-thread task systems on identical multiprocessors"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Exact feasibility test");
    analyze->add_option("system", analyze_args.system_path, "system JSON file")
        ->required();
    analyze->add_option("--sched", analyze_args.sched,
                        "dm-im, rm-im, lsf, gang-dm, or gang-rm")
        ->capture_default_str();
    analyze->add_option("--order", analyze_args.order,
                        "explicit thread priority order, e.g. 1.1,3.2,2.1");
    analyze->add_option("--hyperperiod-bound", analyze_args.hyperperiod_bound,
                        "reject systems with a larger hyperperiod")
        ->capture_default_str();

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Export a schedule trace (CSV)");
    simulate->add_option("system", simulate_args.system_path, "system JSON file")
        ->required();
    simulate->add_option("--sched", simulate_args.sched,
                         "dm-im, rm-im, lsf, gang-dm, or gang-rm")
        ->capture_default_str();
    simulate->add_option("--order", simulate_args.order,
                         "explicit thread priority order");
    simulate->add_option("--horizon", simulate_args.horizon,
                         "instants to simulate (default: the feasibility interval)");
    simulate->add_option("--out", simulate_args.out_path,
                         "output file (default: stdout)");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate random task systems");
    gen->add_option("--m", gen_args.m, "processors")->capture_default_str();
    gen->add_option("--dist", gen_args.dist,
                    "uniform, bimodal, exp-m4, exp-m2, or exp-3m4")
        ->capture_default_str();
    gen->add_option("--seed", gen_args.seed, "base seed")->capture_default_str();
    gen->add_option("--count", gen_args.count, "number of systems")
        ->capture_default_str();
    gen->add_option("--period-min", gen_args.period_min, "")->capture_default_str();
    gen->add_option("--period-max", gen_args.period_max, "")->capture_default_str();
    gen->add_option("--hyperperiod-bound", gen_args.hyperperiod_bound, "")
        ->capture_default_str();
    gen->add_option("--out", gen_args.out_dir,
                    "output directory (default: MTSCHED_OUT_DIR or cwd)");

    ExperimentArgs exp_args;
    CLI::App* experiment = app.add_subcommand(
        "experiment", "Generate systems and compare dm-im against gang-dm");
    experiment->add_option("--m", exp_args.platform_sizes,
                           "platform sizes (repeatable; default 2 4 8 16)");
    experiment->add_option("--dist", exp_args.dists,
                           "distributions (repeatable; default all)");
    experiment->add_option("--count", exp_args.count, "systems per (m, dist) cell")
        ->capture_default_str();
    experiment->add_option("--seed", exp_args.seed, "base seed")->capture_default_str();
    experiment->add_option("--jobs", exp_args.jobs, "worker threads")
        ->capture_default_str();
    experiment->add_option("--period-min", exp_args.period_min, "")
        ->capture_default_str();
    experiment->add_option("--period-max", exp_args.period_max, "")
        ->capture_default_str();
    experiment->add_option("--hyperperiod-bound", exp_args.hyperperiod_bound, "")
        ->capture_default_str();
    experiment->add_option("--out", exp_args.out_dir,
                           "output directory (default: MTSCHED_OUT_DIR or cwd)");

    bool demo_json = false;
    CLI::App* demo = app.add_subcommand(
        "demo-multiphase", "Show the phased-task scheduling anomaly");
    demo->add_flag("--json", demo_json, "machine-readable report");

    try {
        app.parse(argc, argv);
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (gen->parsed()) return run_gen(gen_args);
        if (experiment->parsed()) return run_experiment_cmd(exp_args);
        if (demo->parsed()) return run_demo(demo_json);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInputError;
    } catch (const mtsched::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
