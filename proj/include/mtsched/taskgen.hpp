#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mtsched/model.hpp"
#include "mtsched/rng.hpp"

namespace mtsched {

// Per-task utilization distributions. The exponential ones are truncated to
// the admissible range by redraw.
enum class Distribution {
    Uniform,          // uniform on [1/T, m]
    Bimodal,          // heavy with probability 1/3: uniform on [m/2, m], else [1/T, m/2)
    ExpQuarter,       // exponential with mean m/4
    ExpHalf,          // exponential with mean m/2
    ExpThreeQuarter,  // exponential with mean 3m/4
};

constexpr Distribution kAllDistributions[] = {
    Distribution::Uniform, Distribution::Bimodal, Distribution::ExpQuarter,
    Distribution::ExpHalf, Distribution::ExpThreeQuarter};

std::string_view distribution_name(Distribution dist);
std::optional<Distribution> distribution_from_name(std::string_view name);

struct GenConfig {
    int m = 2;
    Distribution dist = Distribution::Uniform;
    Time period_min = 1;
    Time period_max = 250;
    Time hyperperiod_bound = 5'000'000;
    std::uint64_t seed = 1;
};

// One task drawn per the config: period, offset in [1, T], utilization from
// the distribution, thread count in [1, m], equal integer wcets, deadline in
// [wcet, T]. current_lcm constrains the period so the running system
// hyperperiod stays within bound.
Task generate_task(const GenConfig& cfg, Rng& rng, Time current_lcm = 1);

// Accumulates tasks until the next one would push total utilization above m;
// that task is discarded and generation stops.
TaskSystem generate_system(const GenConfig& cfg, Rng& rng);
TaskSystem generate_system(const GenConfig& cfg);  // rng seeded from cfg.seed

}  // namespace mtsched
