#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtsched/engine.hpp"
#include "mtsched/model.hpp"
#include "mtsched/schedulers.hpp"

namespace mtsched {

struct AnalysisLimits {
    Time hyperperiod_bound = 5'000'000;
};

// Result of an exact feasibility test over [0, interval_end). Feasibility
// over this interval implies feasibility over every horizon.
struct AnalysisVerdict {
    bool feasible = false;
    Time interval_end = 0;            // S_last + hyperperiod
    std::vector<Time> stabilization;  // S values, one per entry of the order
    std::optional<Miss> first_miss;   // set iff infeasible
    std::vector<Time> wcrt;           // per-task max response, set iff feasible
    // Gang verdicts are exact only when every job consumes its full wcet.
    bool assumes_constant_wcet = false;
};

// Exact test for a global thread-priority order.
AnalysisVerdict fsp_test(const TaskSystem& system, const SubprogramOrder& order,
                         const AnalysisLimits& limits = {});

// Exact test for a task order refined by per-task thread orders. Equivalent
// to fsp_test on flatten_hierarchical(system, task_order, within).
AnalysisVerdict ftp_fsp_test(const TaskSystem& system, const TaskOrder& task_order,
                             const WithinTaskOrders& within,
                             const AnalysisLimits& limits = {});

// Gang feasibility over the same interval; exact for constant demands only.
AnalysisVerdict gang_test(const TaskSystem& system, const TaskOrder& task_order,
                          const AnalysisLimits& limits = {});

AnalysisVerdict run_analysis(const TaskSystem& system, const SchedulerSpec& spec,
                             const AnalysisLimits& limits = {});

// Per-task max response over processes arriving in [0, interval_end) whose
// threads all completed, recomputed from recorded completions; -1 when a
// task has no such process.
std::vector<Time> wcrt_per_task(const SimulationResult& result,
                                const TaskSystem& system, Time interval_end);

struct PeriodicityReport {
    bool periodic = true;
    Time window_start = 0;  // compared [start, end) against the next hyperperiod
    Time window_end = 0;
    Time mismatch_time = -1;
    int mismatch_proc = -1;
};

// Simulates to S + 2P and compares the trace over [S, S+P) with the slice
// one hyperperiod later (process numbers shifted by P / T per task).
PeriodicityReport periodicity_probe(const TaskSystem& system,
                                    const SchedulerSpec& spec,
                                    const AnalysisLimits& limits = {});

struct PredictabilityViolation {
    ThreadKey thread;
    Time full_completion = 0;
    Time reduced_completion = 0;  // -1 when it never completed in the reduced run
};

// Draws per-job demands uniformly in [0, wcet] and checks that no thread
// completes later than in the full-demand run. Requires a feasible system.
std::optional<PredictabilityViolation> predictability_probe(
    const TaskSystem& system, const SchedulerSpec& spec, std::uint64_t seed,
    int trials, const AnalysisLimits& limits = {});

}  // namespace mtsched
