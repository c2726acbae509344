#pragma once

#include <variant>
#include <vector>

#include "mtsched/model.hpp"

namespace mtsched {

// Identity of a subprogram within a system.
struct SubRef {
    int task = 0;
    int sub = 0;

    friend bool operator==(const SubRef&, const SubRef&) = default;
    friend auto operator<=>(const SubRef&, const SubRef&) = default;
};

// Task indices, highest priority first.
using TaskOrder = std::vector<int>;

// All r subprograms of the system, highest priority first.
using SubprogramOrder = std::vector<SubRef>;

// Per-task priority order over that task's subprogram indices.
using WithinTaskOrders = std::vector<std::vector<int>>;

// Deadline monotonic: ascending deadline, ties by ascending task index.
TaskOrder dm_order(const TaskSystem& system);

// Rate monotonic: ascending period, ties by ascending task index.
TaskOrder rm_order(const TaskSystem& system);

// Index monotonic: the task's own subprogram index order.
std::vector<int> im_within_task(const Task& task);
WithinTaskOrders im_within(const TaskSystem& system);

// Longest subprogram first over all r subprograms; ties by (task, sub).
SubprogramOrder lsf_global(const TaskSystem& system);

// Turns a hierarchical (task order, within-task orders) assignment into the
// equivalent global subprogram order: all subprograms of the highest
// priority task first, in their within-task order, then the next task.
SubprogramOrder flatten_hierarchical(const TaskSystem& system,
                                     const TaskOrder& task_order,
                                     const WithinTaskOrders& within);

// Validation helpers; throw std::invalid_argument on violation.
void validate_task_order(const TaskSystem& system, const TaskOrder& order);
void validate_subprogram_order(const TaskSystem& system, const SubprogramOrder& order);
void validate_within_orders(const TaskSystem& system, const WithinTaskOrders& within);

// A fully resolved scheduling policy for one system.
struct HierarchicalSpec {
    TaskOrder task_order;
    WithinTaskOrders within;
};

struct GlobalFspSpec {
    SubprogramOrder order;
};

struct GangSpec {
    TaskOrder task_order;
};

using SchedulerSpec = std::variant<HierarchicalSpec, GlobalFspSpec, GangSpec>;

}  // namespace mtsched
