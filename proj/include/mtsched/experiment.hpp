#pragma once

#include <cstdint>
#include <vector>

#include "mtsched/analysis.hpp"
#include "mtsched/taskgen.hpp"

namespace mtsched {

struct ExperimentConfig {
    std::vector<int> platform_sizes{2, 4, 8, 16};
    std::vector<Distribution> distributions{std::begin(kAllDistributions),
                                            std::end(kAllDistributions)};
    int count_per_cell = 100;  // systems per (m, distribution) pair
    std::uint64_t seed = 1;
    int jobs = 1;
    Time period_min = 1;
    Time period_max = 250;
    Time hyperperiod_bound = 5'000'000;
};

// Outcome of analyzing one generated system under both schedulers.
struct ExperimentRecord {
    std::int64_t id = 0;
    std::uint64_t seed = 0;  // seed that regenerates exactly this system
    int m = 0;
    Distribution dist = Distribution::Uniform;
    Rational utilization;
    int tasks = 0;
    bool dmim_feasible = false;
    bool gang_feasible = false;
    int lowest_task = -1;  // task with the lowest deadline-monotonic priority
    Time dmim_wcrt = -1;   // its response time; set iff both analyses feasible
    Time gang_wcrt = -1;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;  // ordered by id
};

// Deterministic for a fixed config: per-system seeds derive from cfg.seed
// and the system id, independent of worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

ExperimentRecord analyze_generated(const ExperimentConfig& cfg, std::int64_t id,
                                   int m, Distribution dist);

// Success counts per utilization bucket of width m/20 (normalized variant:
// width 1/20 over U/m, aggregating across platform sizes).
struct SuccessBucket {
    int index = 0;
    Rational lo;  // bucket covers [lo, hi), last bucket [lo, hi]
    Rational hi;
    int total = 0;
    int dmim = 0;
    int gang = 0;
    int both = 0;
};

std::vector<SuccessBucket> success_table(const std::vector<ExperimentRecord>& records,
                                         int m);
std::vector<SuccessBucket> success_table_normalized(
    const std::vector<ExperimentRecord>& records);

// Strict win counts for the lowest-priority task's response time, over
// both-feasible systems with utilization strictly inside (m/4, 9m/10).
struct WcrtComparison {
    int considered = 0;
    int dmim_wins = 0;
    int gang_wins = 0;
    int ties = 0;
};

WcrtComparison compare_wcrt(const std::vector<ExperimentRecord>& records, int m);

}  // namespace mtsched
