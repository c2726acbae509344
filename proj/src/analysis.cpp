#include "mtsched/analysis.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "mtsched/rng.hpp"

namespace mtsched {

namespace {

Time checked_hyperperiod(const TaskSystem& system, const AnalysisLimits& limits) {
    const Time P = hyperperiod(system);
    if (P > limits.hyperperiod_bound)
        throw std::invalid_argument("hyperperiod exceeds the analysis bound");
    return P;
}

Time max_deadline(const TaskSystem& system) {
    Time d = 0;
    for (const Task& t : system.tasks) d = std::max(d, t.deadline);
    return d;
}

std::vector<Time> stab_over_tasks(const TaskSystem& system, const TaskOrder& order) {
    std::vector<OffsetPeriod> entries;
    entries.reserve(order.size());
    for (int idx : order)
        entries.push_back(OffsetPeriod{system.tasks[idx].offset, system.tasks[idx].period});
    return stabilization_points(entries);
}

std::vector<Time> stab_over_subprograms(const TaskSystem& system,
                                        const SubprogramOrder& order) {
    std::vector<OffsetPeriod> entries;
    entries.reserve(order.size());
    for (const SubRef& s : order)
        entries.push_back(
            OffsetPeriod{system.tasks[s.task].offset, system.tasks[s.task].period});
    return stabilization_points(entries);
}

SimOptions analysis_options(Time window) {
    SimOptions opt;
    opt.record_trace = false;
    opt.record_completions = false;
    opt.stop_at_first_miss = true;
    opt.assert_window = window;
    return opt;
}

AnalysisVerdict verdict_from(SimulationResult&& sim, std::vector<Time>&& stab,
                             Time window, bool constant_wcet) {
    AnalysisVerdict v;
    v.stabilization = std::move(stab);
    v.interval_end = window;
    v.assumes_constant_wcet = constant_wcet;
    if (sim.misses.empty()) {
        v.feasible = true;
        v.wcrt = std::move(sim.task_wcrt);
    } else {
        v.first_miss = sim.misses.front();
    }
    return v;
}

}  // namespace

AnalysisVerdict fsp_test(const TaskSystem& system, const SubprogramOrder& order,
                         const AnalysisLimits& limits) {
    validate_subprogram_order(system, order);
    const Time P = checked_hyperperiod(system, limits);
    std::vector<Time> stab = stab_over_subprograms(system, order);
    const Time window = (stab.empty() ? 0 : stab.back()) + P;
    SimulationResult sim = simulate_threads(system, order, window + max_deadline(system),
                                            nullptr, analysis_options(window));
    return verdict_from(std::move(sim), std::move(stab), window, false);
}

AnalysisVerdict ftp_fsp_test(const TaskSystem& system, const TaskOrder& task_order,
                             const WithinTaskOrders& within,
                             const AnalysisLimits& limits) {
    const SubprogramOrder order = flatten_hierarchical(system, task_order, within);
    const Time P = checked_hyperperiod(system, limits);
    std::vector<Time> stab = stab_over_tasks(system, task_order);
    const Time window = (stab.empty() ? 0 : stab.back()) + P;
    SimulationResult sim = simulate_threads(system, order, window + max_deadline(system),
                                            nullptr, analysis_options(window));
    return verdict_from(std::move(sim), std::move(stab), window, false);
}

AnalysisVerdict gang_test(const TaskSystem& system, const TaskOrder& task_order,
                          const AnalysisLimits& limits) {
    validate_task_order(system, task_order);
    const Time P = checked_hyperperiod(system, limits);
    std::vector<Time> stab = stab_over_tasks(system, task_order);
    const Time window = (stab.empty() ? 0 : stab.back()) + P;
    SimulationResult sim = simulate_gang(system, task_order, window + max_deadline(system),
                                         nullptr, analysis_options(window));
    return verdict_from(std::move(sim), std::move(stab), window, true);
}

AnalysisVerdict run_analysis(const TaskSystem& system, const SchedulerSpec& spec,
                             const AnalysisLimits& limits) {
    if (const auto* h = std::get_if<HierarchicalSpec>(&spec))
        return ftp_fsp_test(system, h->task_order, h->within, limits);
    if (const auto* g = std::get_if<GlobalFspSpec>(&spec))
        return fsp_test(system, g->order, limits);
    return gang_test(system, std::get<GangSpec>(spec).task_order, limits);
}

std::vector<Time> wcrt_per_task(const SimulationResult& result,
                                const TaskSystem& system, Time interval_end) {
    struct Acc {
        int threads_seen = 0;
        Time last = 0;
    };
    std::map<ProcessKey, Acc> processes;
    for (const auto& [key, at] : result.completions) {
        const Task& task = system.tasks[key.task];
        const Time arrival = task.offset + key.process * task.period;
        if (arrival >= interval_end) continue;
        Acc& acc = processes[ProcessKey{key.task, key.process}];
        ++acc.threads_seen;
        acc.last = std::max(acc.last, at);
    }
    std::vector<Time> wcrt(system.task_count(), -1);
    for (const auto& [pk, acc] : processes) {
        const Task& task = system.tasks[pk.first];
        if (acc.threads_seen != task.thread_count()) continue;  // straddles the horizon
        const Time response = acc.last - (task.offset + pk.second * task.period);
        wcrt[pk.first] = std::max(wcrt[pk.first], response);
    }
    return wcrt;
}

namespace {

// The engine and order behind a scheduler spec, shared by the probes.
struct ResolvedRun {
    bool gang = false;
    SubprogramOrder thread_order;  // used unless gang
    TaskOrder task_order;          // used for gang
    std::vector<Time> stab;
    Time hyperperiod = 0;

    Time stabilization() const { return stab.empty() ? 0 : stab.back(); }

    SimulationResult simulate(const TaskSystem& system, Time horizon,
                              const SimOptions& options) const {
        if (gang) return simulate_gang(system, task_order, horizon, nullptr, options);
        return simulate_threads(system, thread_order, horizon, nullptr, options);
    }
};

ResolvedRun resolve(const TaskSystem& system, const SchedulerSpec& spec,
                    const AnalysisLimits& limits) {
    ResolvedRun r;
    r.hyperperiod = checked_hyperperiod(system, limits);
    if (const auto* h = std::get_if<HierarchicalSpec>(&spec)) {
        r.thread_order = flatten_hierarchical(system, h->task_order, h->within);
        r.stab = stab_over_tasks(system, h->task_order);
    } else if (const auto* g = std::get_if<GlobalFspSpec>(&spec)) {
        validate_subprogram_order(system, g->order);
        r.thread_order = g->order;
        r.stab = stab_over_subprograms(system, g->order);
    } else {
        r.gang = true;
        r.task_order = std::get<GangSpec>(spec).task_order;
        validate_task_order(system, r.task_order);
        r.stab = stab_over_tasks(system, r.task_order);
    }
    return r;
}

std::size_t segment_index(const ScheduleTrace& trace, Time t) {
    auto it = std::upper_bound(
        trace.segments.begin(), trace.segments.end(), t,
        [](Time v, const TraceSegment& s) { return v < s.begin; });
    return static_cast<std::size_t>(it - trace.segments.begin()) - 1;
}

}  // namespace

PeriodicityReport periodicity_probe(const TaskSystem& system,
                                    const SchedulerSpec& spec,
                                    const AnalysisLimits& limits) {
    const ResolvedRun run = resolve(system, spec, limits);
    const Time S = run.stabilization();
    const Time P = run.hyperperiod;

    SimOptions opt;
    opt.record_completions = false;
    opt.assert_window = 0;  // deadline bookkeeping not needed here
    const SimulationResult sim = run.simulate(system, S + 2 * P, opt);

    std::vector<std::int64_t> shift(system.task_count());
    for (int i = 0; i < system.task_count(); ++i)
        shift[i] = P / system.tasks[i].period;

    PeriodicityReport report;
    report.window_start = S;
    report.window_end = S + P;

    const ScheduleTrace& tr = sim.trace;
    std::size_t ia = segment_index(tr, S);
    std::size_t ib = segment_index(tr, S + P);
    Time a = S;
    while (a < S + P) {
        const TraceSegment& sa = tr.segments[ia];
        const TraceSegment& sb = tr.segments[ib];
        const Time span = std::min(sa.end - a, sb.end - (a + P));
        for (int p = 0; p < tr.processors; ++p) {
            const TraceCell& ca = sa.procs[p];
            const TraceCell& cb = sb.procs[p];
            const bool same = ca.idle()
                                  ? cb.idle()
                                  : !cb.idle() && ca.task == cb.task &&
                                        ca.sub == cb.sub &&
                                        cb.process == ca.process + shift[ca.task];
            if (!same) {
                report.periodic = false;
                report.mismatch_time = a;
                report.mismatch_proc = p;
                return report;
            }
        }
        a += span;
        if (a >= sa.end) ++ia;
        if (a + P >= sb.end) ++ib;
    }
    return report;
}

std::optional<PredictabilityViolation> predictability_probe(
    const TaskSystem& system, const SchedulerSpec& spec, std::uint64_t seed,
    int trials, const AnalysisLimits& limits) {
    const ResolvedRun run = resolve(system, spec, limits);
    const Time window = run.stabilization() + run.hyperperiod;
    const Time horizon = window + max_deadline(system);

    SimOptions opt;
    opt.record_trace = false;
    opt.assert_window = window;
    const SimulationResult full = run.simulate(system, horizon, opt);
    if (!full.misses.empty())
        throw std::invalid_argument("predictability probe needs a feasible system");

    auto arrival_of = [&](const ThreadKey& key) {
        const Task& task = system.tasks[key.task];
        return task.offset + key.process * task.period;
    };

    Rng rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        SimulationResult reduced;
        if (run.gang) {
            ProcessDemands demands;
            for (int idx : run.task_order) {
                const Task& task = system.tasks[idx];
                const Time wcet = task.subprograms[0].wcet;
                for (Time arr = task.offset; arr < window; arr += task.period)
                    demands[ProcessKey{idx, (arr - task.offset) / task.period}] =
                        rng.uniform_int(0, wcet);
            }
            reduced = simulate_gang(system, run.task_order, horizon, &demands, opt);
        } else {
            ThreadDemands demands;
            for (const SubRef& s : run.thread_order) {
                const Task& task = system.tasks[s.task];
                const Time wcet = task.subprograms[s.sub].wcet;
                for (Time arr = task.offset; arr < window; arr += task.period)
                    demands[ThreadKey{s.task, s.sub, (arr - task.offset) / task.period}] =
                        rng.uniform_int(0, wcet);
            }
            reduced = simulate_threads(system, run.thread_order, horizon, &demands, opt);
        }
        for (const auto& [key, at] : full.completions) {
            if (arrival_of(key) >= window) continue;
            auto it = reduced.completions.find(key);
            if (it == reduced.completions.end())
                return PredictabilityViolation{key, at, -1};
            if (it->second > at) return PredictabilityViolation{key, at, it->second};
        }
    }
    return std::nullopt;
}

}  // namespace mtsched
