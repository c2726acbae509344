#include "mtsched/taskgen.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mtsched {

std::string_view distribution_name(Distribution dist) {
    switch (dist) {
        case Distribution::Uniform: return "uniform";
        case Distribution::Bimodal: return "bimodal";
        case Distribution::ExpQuarter: return "exp-m4";
        case Distribution::ExpHalf: return "exp-m2";
        case Distribution::ExpThreeQuarter: return "exp-3m4";
    }
    return "unknown";
}

std::optional<Distribution> distribution_from_name(std::string_view name) {
    for (Distribution d : kAllDistributions)
        if (name == distribution_name(d)) return d;
    return std::nullopt;
}

namespace {

void check_config(const GenConfig& cfg) {
    if (cfg.m < 1) throw std::invalid_argument("platform needs at least one processor");
    if (cfg.period_min < 1 || cfg.period_min > cfg.period_max)
        throw std::invalid_argument("invalid period range");
    if (cfg.hyperperiod_bound < cfg.period_min)
        throw std::invalid_argument("hyperperiod bound below the smallest period");
}

Time draw_period(const GenConfig& cfg, Rng& rng, Time current_lcm) {
    auto fits = [&](Time t) {
        try {
            return lcm_checked(current_lcm, t) <= cfg.hyperperiod_bound;
        } catch (const std::overflow_error&) {
            return false;
        }
    };
    for (int tries = 0; tries < 64; ++tries) {
        const Time t = rng.uniform_int(cfg.period_min, cfg.period_max);
        if (fits(t)) return t;
    }
    std::vector<Time> admissible;
    for (Time t = cfg.period_min; t <= cfg.period_max; ++t)
        if (fits(t)) admissible.push_back(t);
    if (admissible.empty())
        throw std::domain_error("no period keeps the hyperperiod within bound");
    return admissible[rng.uniform_int(0, static_cast<Time>(admissible.size()) - 1)];
}

double draw_utilization(const GenConfig& cfg, Rng& rng, Time period) {
    const double lo = 1.0 / static_cast<double>(period);
    const double hi = static_cast<double>(cfg.m);
    double mean = 0;
    switch (cfg.dist) {
        case Distribution::Uniform:
            return rng.uniform_real(lo, hi);
        case Distribution::Bimodal: {
            const double half = hi / 2.0;
            if (rng.real01() < 1.0 / 3.0) return rng.uniform_real(half, hi);
            if (lo >= half) return rng.uniform_real(lo, hi);  // no room below m/2
            return rng.uniform_real(lo, half);
        }
        case Distribution::ExpQuarter:
            mean = hi / 4.0;
            break;
        case Distribution::ExpHalf:
            mean = hi / 2.0;
            break;
        case Distribution::ExpThreeQuarter:
            mean = 3.0 * hi / 4.0;
            break;
    }
    for (int tries = 0; tries < 64; ++tries) {
        const double u = rng.exponential(mean);
        if (u >= lo && u <= hi) return u;
    }
    return rng.uniform_real(lo, hi);
}

}  // namespace

Task generate_task(const GenConfig& cfg, Rng& rng, Time current_lcm) {
    check_config(cfg);
    const Time period = draw_period(cfg, rng, current_lcm);
    const Time offset = rng.uniform_int(1, period);
    double u = 0;
    Time threads = 1;
    // Redraw the pair until every thread fits its period (wcet <= period
    // needs u <= v); v = m always accepts since u is truncated to <= m.
    for (int tries = 0;; ++tries) {
        u = draw_utilization(cfg, rng, period);
        threads = rng.uniform_int(1, cfg.m);
        if (u <= static_cast<double>(threads)) break;
        if (tries >= 4096) {
            threads = cfg.m;
            break;
        }
    }
    Time wcet = std::llround(u * static_cast<double>(period) /
                             static_cast<double>(threads));
    if (wcet < 1) wcet = 1;
    const Time deadline = rng.uniform_int(wcet, period);
    return Task(offset, std::vector<Time>(static_cast<std::size_t>(threads), wcet),
                deadline, period);
}

TaskSystem generate_system(const GenConfig& cfg, Rng& rng) {
    check_config(cfg);
    std::vector<Task> tasks;
    Rational total(0);
    const Rational capacity(cfg.m);
    Time running_lcm = 1;
    for (;;) {
        Task candidate = generate_task(cfg, rng, running_lcm);
        const Rational u = task_utilization(candidate);
        if (total + u > capacity) {
            // The task that would overload the platform is discarded and
            // generation stops; a lone over-capacity draw cannot end it
            // because systems need at least one task.
            if (tasks.empty()) continue;
            break;
        }
        running_lcm = lcm_checked(running_lcm, candidate.period);
        total += u;
        tasks.push_back(std::move(candidate));
    }
    return TaskSystem(std::move(tasks), cfg.m);
}

TaskSystem generate_system(const GenConfig& cfg) {
    Rng rng(cfg.seed);
    return generate_system(cfg, rng);
}

}  // namespace mtsched
