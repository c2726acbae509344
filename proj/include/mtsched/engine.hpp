#pragma once

#include <compare>
#include <map>
#include <utility>
#include <vector>

#include "mtsched/model.hpp"
#include "mtsched/schedulers.hpp"

namespace mtsched {

struct ThreadKey {
    int task = 0;
    int sub = 0;
    std::int64_t process = 0;

    friend bool operator==(const ThreadKey&, const ThreadKey&) = default;
    friend auto operator<=>(const ThreadKey&, const ThreadKey&) = default;
};

struct TraceCell {
    std::int32_t task = -1;
    std::int32_t sub = -1;
    std::int64_t process = -1;

    bool idle() const { return task < 0; }
    friend bool operator==(const TraceCell&, const TraceCell&) = default;
};

// Run of instants with one constant processor assignment. Segments are the
// compressed form of the per-instant schedule; unit resolution is recovered
// through at().
struct TraceSegment {
    Time begin = 0;
    Time end = 0;
    std::vector<TraceCell> procs;  // one cell per processor
};

struct ScheduleTrace {
    Time horizon = 0;
    int processors = 0;
    std::vector<TraceSegment> segments;  // contiguous, cover [0, horizon)

    TraceCell at(Time t, int proc) const;
};

struct Miss {
    ThreadKey thread;
    Time deadline = 0;
    Time executed = 0;  // units done when the deadline passed
};

struct SimulationResult {
    ScheduleTrace trace;                    // iff SimOptions::record_trace
    std::map<ThreadKey, Time> completions;  // iff SimOptions::record_completions
    std::vector<Miss> misses;               // deadline order; ties by thread identity
    // Max response time per task over processes arriving in the assert
    // window whose threads all completed; -1 when no such process.
    std::vector<Time> task_wcrt;
    bool stopped_early = false;
};

struct SimOptions {
    bool record_trace = true;
    bool record_completions = true;
    bool stop_at_first_miss = false;
    // Misses and response times are accounted for jobs arriving in
    // [0, assert_window); -1 means the whole horizon.
    Time assert_window = -1;
};

using ThreadDemands = std::map<ThreadKey, Time>;
using ProcessKey = std::pair<int, std::int64_t>;  // (task, process)
using ProcessDemands = std::map<ProcessKey, Time>;

// Preemptive global thread scheduling: at every instant the m highest
// priority active threads run, priority = (rank in `order`, process number),
// processors assigned in priority order starting at index 0.
// Deadline misses are recorded for deadlines <= horizon; missed threads
// keep executing.
SimulationResult simulate_threads(const TaskSystem& system,
                                  const SubprogramOrder& order, Time horizon,
                                  const ThreadDemands* demands = nullptr,
                                  const SimOptions& options = {});

// Gang scheduling: tasks scanned by decreasing priority (processes of one
// task by increasing process number); an active process is dispatched iff
// its full width of processors is still free, occupying the lowest free
// indexes; otherwise it is skipped and the scan continues.
// Requires equal wcets within each task and widths <= platform size.
SimulationResult simulate_gang(const TaskSystem& system, const TaskOrder& order,
                               Time horizon,
                               const ProcessDemands* demands = nullptr,
                               const SimOptions& options = {});

}  // namespace mtsched
