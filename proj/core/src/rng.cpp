#include "girglab/rng.hpp"

#include <cmath>
#include <numbers>

namespace girglab {

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = mix64(base);
    for (std::uint64_t p : parts)
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

CounterRng CounterRng::split(std::uint64_t stream) const noexcept {
    return CounterRng(RawKey{}, mix64(key_ ^ mix64(stream ^ 0xbb67ae8584caa73bULL)));
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t t = (0 - n) % n;
        while (low < t) {
            m = static_cast<unsigned __int128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::normal() noexcept {
    // Box-Muller, one variate per call
    const double u = uniform_open_closed();
    const double v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

} // namespace girglab
