#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace girglab {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Folds a list of integers into one seed. Order matters.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept;

// Counter-based stream: the i-th output is mix64(key + i * gamma), so any
// position can be reached in O(1) and streams can be split by key.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
        : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)), counter_(counter) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(key_ + kGamma * counter_++); }

    // independent child stream; does not advance this one
    CounterRng split(std::uint64_t stream) const noexcept;

    // position the stream at an absolute counter value
    CounterRng at(std::uint64_t counter) const noexcept {
        CounterRng r = *this;
        r.counter_ = counter;
        return r;
    }

    std::uint64_t counter() const noexcept { return counter_; }
    std::uint64_t key() const noexcept { return key_; }

    // [0, 1)
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    // (0, 1]
    double uniform_open_closed() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
    // [lo, hi)
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
    // uniform integer in [0, n), Lemire's nearly-divisionless method; n > 0
    std::uint64_t below(std::uint64_t n) noexcept;
    double normal() noexcept;

private:
    struct RawKey {};
    CounterRng(RawKey, std::uint64_t key) noexcept : key_(key), counter_(0) {}

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace girglab
