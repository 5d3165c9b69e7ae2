#pragma once

#include <cstdint>

namespace chainbell {

/// Counter-based generator keyed by (seed, stream, trial).
///
/// Each key opens an independent splitmix64 sequence, so trial i of stream s
/// produces the same draws no matter which thread generates it or in what
/// order. That makes sharded Monte Carlo runs bit-identical to serial ones.
class KeyedRng {
public:
    KeyedRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
        : state_(derive_key(seed, stream, trial)) {}

    /// Next raw 64-bit word.
    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return finalize(state_);
    }

    /// Next uniform double in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t trial) {
        std::uint64_t h = finalize(seed + 0x9E3779B97F4A7C15ULL);
        h = finalize(h ^ (stream + 0xBF58476D1CE4E5B9ULL));
        h = finalize(h ^ (trial + 0x94D049BB133111EBULL));
        return h;
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace chainbell
