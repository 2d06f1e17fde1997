#pragma once

#include <cstdint>

namespace sepskel {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: the value of draw `i` depends only on
/// (seed, stream, i), so streams can be handed to any thread.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

    constexpr std::uint64_t at(std::uint64_t counter) const { return mix64(key_ ^ mix64(counter)); }
    constexpr std::uint64_t next() { return at(counter_++); }

    /// Uniform in [0, 1).
    constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). Slight modulo bias is irrelevant at our sizes.
    constexpr std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace sepskel
