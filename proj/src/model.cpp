#include "mtsched/model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mtsched {

Time ceil_div(Time a, Time b) {
    // b > 0; C++ integer division truncates toward zero.
    Time q = a / b;
    Time r = a % b;
    return q + (r > 0 ? 1 : 0);
}

Time lcm_checked(Time a, Time b) {
    if (a <= 0 || b <= 0)
        throw std::invalid_argument("lcm arguments must be positive");
    Time g = std::gcd(a, b);
    Time scaled = a / g;
    if (scaled > std::numeric_limits<Time>::max() / b)
        throw std::overflow_error("lcm exceeds representable range");
    return scaled * b;
}

Task::Task(Time offset_, std::vector<Time> wcets, Time deadline_, Time period_)
    : offset(offset_), deadline(deadline_), period(period_) {
    if (offset < 0)
        throw std::invalid_argument("task offset must be non-negative");
    if (wcets.empty())
        throw std::invalid_argument("task needs at least one subprogram");
    if (deadline < 1 || period < 1)
        throw std::invalid_argument("deadline and period must be positive");
    if (deadline > period)
        throw std::invalid_argument("constrained deadline required (D <= T)");
    subprograms.reserve(wcets.size());
    for (Time c : wcets) {
        if (c < 1)
            throw std::invalid_argument("subprogram wcet must be >= 1");
        if (c > deadline)
            throw std::invalid_argument(
                "subprogram wcet " + std::to_string(c) +
                " exceeds deadline " + std::to_string(deadline));
        subprograms.push_back(Subprogram{c});
    }
}

Time Task::max_wcet() const {
    Time best = 0;
    for (const Subprogram& q : subprograms) best = std::max(best, q.wcet);
    return best;
}

Time Task::wcet_sum() const {
    Time sum = 0;
    for (const Subprogram& q : subprograms) sum += q.wcet;
    return sum;
}

TaskSystem::TaskSystem(std::vector<Task> tasks_, int processors_)
    : tasks(std::move(tasks_)), processors(processors_) {
    if (tasks.empty())
        throw std::invalid_argument("task system needs at least one task");
    if (processors < 1)
        throw std::invalid_argument("platform needs at least one processor");
}

int TaskSystem::subprogram_count() const {
    int r = 0;
    for (const Task& t : tasks) r += t.thread_count();
    return r;
}

std::vector<FlatSubprogram> flat_subprograms(const TaskSystem& system) {
    std::vector<FlatSubprogram> out;
    out.reserve(system.subprogram_count());
    for (int i = 0; i < system.task_count(); ++i) {
        const Task& t = system.tasks[i];
        for (int j = 0; j < t.thread_count(); ++j)
            out.push_back(FlatSubprogram{i, j, t.offset, t.subprograms[j].wcet,
                                         t.deadline, t.period});
    }
    return out;
}

Rational task_utilization(const Task& task) {
    return Rational(task.wcet_sum(), task.period);
}

Rational total_utilization(const TaskSystem& system) {
    Rational u(0);
    for (const Task& t : system.tasks) u += task_utilization(t);
    return u;
}

Time hyperperiod(const TaskSystem& system) {
    Time p = 1;
    for (const Task& t : system.tasks) p = lcm_checked(p, t.period);
    return p;
}

std::vector<Time> stabilization_points(const std::vector<OffsetPeriod>& entries) {
    std::vector<Time> s;
    s.reserve(entries.size());
    for (const OffsetPeriod& e : entries) {
        if (e.period < 1)
            throw std::invalid_argument("period must be positive");
        if (e.offset < 0)
            throw std::invalid_argument("offset must be non-negative");
        if (s.empty()) {
            s.push_back(e.offset);
        } else {
            Time prev = s.back();
            Time next = e.offset + ceil_div(prev - e.offset, e.period) * e.period;
            s.push_back(std::max(e.offset, next));
        }
    }
    return s;
}

std::vector<ThreadJob> thread_jobs(const FlatSubprogram& entry, Time window_end) {
    if (window_end < 0)
        throw std::invalid_argument("window_end must be non-negative");
    std::vector<ThreadJob> jobs;
    for (std::int64_t k = 0;; ++k) {
        Time arrival = entry.offset + k * entry.period;
        if (arrival >= window_end) break;
        jobs.push_back(ThreadJob{ThreadSource{entry.task, entry.sub, k}, arrival,
                                 entry.wcet, arrival + entry.deadline, entry.wcet});
    }
    return jobs;
}

}  // namespace mtsched
