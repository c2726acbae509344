#pragma once

#include <cstdint>
#include <random>

#include "mtsched/model.hpp"

namespace mtsched {

// Deterministic draws over mt19937_64. The standard <random> distributions
// are implementation defined, so the value mappings are spelled out here to
// keep seeded runs reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform integer on [lo, hi], rejection sampled to stay unbiased.
    Time uniform_int(Time lo, Time hi);

    // Uniform on [0, 1) with 53 random bits.
    double real01();

    double uniform_real(double lo, double hi);

    // Exponential with the given mean, inverse transform.
    double exponential(double mean);

private:
    std::mt19937_64 eng_;
};

// Stateless mixer for deriving independent per-item seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace mtsched
