#pragma once

#include <compare>
#include <map>
#include <vector>

#include "mtsched/engine.hpp"
#include "mtsched/model.hpp"

namespace mtsched {

// Task whose threads run in phases: all threads of phase j must complete
// before any thread of phase j+1 becomes active.
struct MultiPhaseTask {
    Time offset = 0;
    std::vector<std::vector<Time>> phases;  // per phase, the thread wcets
    Time deadline = 1;
    Time period = 1;

    MultiPhaseTask(Time offset, std::vector<std::vector<Time>> phases, Time deadline,
                   Time period);

    int phase_count() const { return static_cast<int>(phases.size()); }
    int thread_count() const;
    // Position of thread (phase, sub) in the phase-major flat numbering used
    // by trace cells and completion keys.
    int flat_index(int phase, int sub) const;
};

struct PhaseThreadKey {
    int task = 0;
    int phase = 0;
    int sub = 0;
    std::int64_t process = 0;

    friend bool operator==(const PhaseThreadKey&, const PhaseThreadKey&) = default;
    friend auto operator<=>(const PhaseThreadKey&, const PhaseThreadKey&) = default;
};

using PhaseDemands = std::map<PhaseThreadKey, Time>;

// Hierarchical scheduling of phased tasks: priority by task rank in `order`,
// then process number, then thread position; only the current phase of each
// process contributes active threads. Completion keys and trace cells use
// the flat (phase-major) thread numbering.
SimulationResult simulate_multiphase(const std::vector<MultiPhaseTask>& tasks,
                                     const TaskOrder& order, int processors,
                                     Time horizon,
                                     const PhaseDemands* demands = nullptr,
                                     const SimOptions& options = {});

// Two-task fixture where shrinking one demand of the high-priority task
// postpones the low-priority task's completion.
struct UnpredictabilityDemo {
    std::vector<MultiPhaseTask> tasks;
    int processors = 0;
    ThreadKey observer;            // the thread whose completion moves
    PhaseThreadKey reduced_job;    // the demand that was shrunk
    Time reduced_demand = 0;
    Time full_completion = 0;
    Time reduced_completion = 0;
    bool anomaly = false;          // completion got later with less work
};

UnpredictabilityDemo unpredictability_demo();

}  // namespace mtsched
