#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <vector>

namespace mtsched {

// All timing values are integer multiples of one indivisible time unit.
using Time = std::int64_t;

// Utilizations are exact rationals end-to-end; floating point only appears
// in task generation sampling and CSV output.
using Rational = boost::rational<long long>;

// Mathematical ceiling of a/b for b > 0 (correct for negative a).
Time ceil_div(Time a, Time b);

// lcm with overflow detection; throws std::overflow_error.
Time lcm_checked(Time a, Time b);

// One parallel unit of a task. At run time it spawns one thread per process.
struct Subprogram {
    Time wcet = 1;
};

// Periodic multi-thread task. The order of `subprograms` is the task's
// internal index order (index 0 is the first subprogram).
struct Task {
    Time offset = 0;
    std::vector<Subprogram> subprograms;
    Time deadline = 1;
    Time period = 1;

    Task(Time offset, std::vector<Time> wcets, Time deadline, Time period);

    int thread_count() const { return static_cast<int>(subprograms.size()); }
    Time max_wcet() const;
    Time wcet_sum() const;
};

struct TaskSystem {
    std::vector<Task> tasks;
    int processors = 1;

    TaskSystem(std::vector<Task> tasks, int processors);

    int task_count() const { return static_cast<int>(tasks.size()); }
    int subprogram_count() const;  // r = sum of thread counts
};

// A subprogram lifted out of its task, carrying the task's timing values.
struct FlatSubprogram {
    int task = 0;  // index into TaskSystem::tasks
    int sub = 0;   // index into Task::subprograms
    Time offset = 0;
    Time wcet = 1;
    Time deadline = 1;
    Time period = 1;
};

// All r subprograms of the system in (task, sub) index order.
std::vector<FlatSubprogram> flat_subprograms(const TaskSystem& system);

// Fraction of platform capacity the task requests: sum of wcets / period.
Rational task_utilization(const Task& task);
Rational total_utilization(const TaskSystem& system);

// lcm of all periods; throws std::overflow_error when not representable.
Time hyperperiod(const TaskSystem& system);

struct OffsetPeriod {
    Time offset = 0;
    Time period = 1;
};

// Stabilization recurrence over entries listed by decreasing priority:
//   S_1 = O_1,  S_i = max(O_i, O_i + ceil((S_{i-1} - O_i)/T_i) * T_i).
// Applies unchanged to tasks and to subprograms.
std::vector<Time> stabilization_points(const std::vector<OffsetPeriod>& entries);

// Identity of one thread: process k (0-based) of subprogram (task, sub).
struct ThreadSource {
    int task = 0;
    int sub = 0;
    std::int64_t process = 0;
};

struct ThreadJob {
    ThreadSource source;
    Time arrival = 0;
    Time demand = 0;
    Time deadline = 0;  // absolute
    Time remaining = 0;
};

// All jobs of the subprogram with arrival < window_end.
std::vector<ThreadJob> thread_jobs(const FlatSubprogram& entry, Time window_end);

}  // namespace mtsched
