#include "mtsched/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mtsched {

Time Rng::uniform_int(Time lo, Time hi) {
    if (lo > hi) throw std::invalid_argument("empty integer range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return lo + static_cast<Time>(eng_());  // whole 64-bit span
    const std::uint64_t lowest_fair = (0 - range) % range;  // 2^64 mod range
    std::uint64_t x;
    do {
        x = eng_();
    } while (x < lowest_fair);
    return lo + static_cast<Time>(x % range);
}

double Rng::real01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_real(double lo, double hi) {
    return lo + real01() * (hi - lo);
}

double Rng::exponential(double mean) {
    return -mean * std::log1p(-real01());
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t x = base + salt * 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace mtsched
