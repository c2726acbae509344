#include "mtsched/schedulers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mtsched {

namespace {

TaskOrder order_by_key(const TaskSystem& system, Time Task::*key) {
    TaskOrder order(system.task_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return system.tasks[a].*key < system.tasks[b].*key;
    });
    return order;
}

}  // namespace

TaskOrder dm_order(const TaskSystem& system) {
    return order_by_key(system, &Task::deadline);
}

TaskOrder rm_order(const TaskSystem& system) {
    return order_by_key(system, &Task::period);
}

std::vector<int> im_within_task(const Task& task) {
    std::vector<int> order(task.thread_count());
    std::iota(order.begin(), order.end(), 0);
    return order;
}

WithinTaskOrders im_within(const TaskSystem& system) {
    WithinTaskOrders within;
    within.reserve(system.task_count());
    for (const Task& t : system.tasks) within.push_back(im_within_task(t));
    return within;
}

SubprogramOrder lsf_global(const TaskSystem& system) {
    SubprogramOrder order;
    order.reserve(system.subprogram_count());
    for (const FlatSubprogram& q : flat_subprograms(system))
        order.push_back(SubRef{q.task, q.sub});
    std::stable_sort(order.begin(), order.end(), [&](const SubRef& a, const SubRef& b) {
        Time ca = system.tasks[a.task].subprograms[a.sub].wcet;
        Time cb = system.tasks[b.task].subprograms[b.sub].wcet;
        if (ca != cb) return ca > cb;
        return std::pair(a.task, a.sub) < std::pair(b.task, b.sub);
    });
    return order;
}

SubprogramOrder flatten_hierarchical(const TaskSystem& system,
                                     const TaskOrder& task_order,
                                     const WithinTaskOrders& within) {
    validate_task_order(system, task_order);
    validate_within_orders(system, within);
    SubprogramOrder order;
    order.reserve(system.subprogram_count());
    for (int task : task_order)
        for (int sub : within[task]) order.push_back(SubRef{task, sub});
    return order;
}

void validate_task_order(const TaskSystem& system, const TaskOrder& order) {
    std::vector<bool> seen(system.task_count(), false);
    if (static_cast<int>(order.size()) != system.task_count())
        throw std::invalid_argument("task order must cover every task exactly once");
    for (int i : order) {
        if (i < 0 || i >= system.task_count() || seen[i])
            throw std::invalid_argument("task order is not a permutation");
        seen[i] = true;
    }
}

void validate_subprogram_order(const TaskSystem& system, const SubprogramOrder& order) {
    if (static_cast<int>(order.size()) != system.subprogram_count())
        throw std::invalid_argument("subprogram order must cover all subprograms");
    std::vector<std::vector<bool>> seen;
    for (const Task& t : system.tasks)
        seen.emplace_back(t.thread_count(), false);
    for (const SubRef& s : order) {
        if (s.task < 0 || s.task >= system.task_count() ||
            s.sub < 0 || s.sub >= system.tasks[s.task].thread_count() ||
            seen[s.task][s.sub])
            throw std::invalid_argument("subprogram order is not a permutation");
        seen[s.task][s.sub] = true;
    }
}

void validate_within_orders(const TaskSystem& system, const WithinTaskOrders& within) {
    if (static_cast<int>(within.size()) != system.task_count())
        throw std::invalid_argument("need one within-task order per task");
    for (int i = 0; i < system.task_count(); ++i) {
        const std::vector<int>& w = within[i];
        std::vector<bool> seen(system.tasks[i].thread_count(), false);
        if (static_cast<int>(w.size()) != system.tasks[i].thread_count())
            throw std::invalid_argument("within-task order size mismatch");
        for (int j : w) {
            if (j < 0 || j >= system.tasks[i].thread_count() || seen[j])
                throw std::invalid_argument("within-task order is not a permutation");
            seen[j] = true;
        }
    }
}

}  // namespace mtsched
