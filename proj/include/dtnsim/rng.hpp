#pragma once

#include <cstdint>

namespace dtnsim {

// Deterministic, platform-independent PRNG (splitmix64). The standard
// <random> engines are portable but the distributions are not; every draw
// in the simulator goes through this class so that equal seeds give
// bit-equal runs on any machine.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n). Multiply-shift; the bias for n << 2^64 is
    // far below anything observable here.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Stream derivation: hash (seed, a, b) into an independent stream seed.
// Used to give every node its own mobility and protocol streams, so adding
// a node never perturbs the draws of existing nodes.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xC2B2AE3D27D4EB4Full);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Fixed stream tags; keep the values stable, they are part of the
// reproducibility contract.
enum class StreamKind : std::uint64_t {
    Mobility = 1,
    Protocol = 2,
    Failures = 3,
};

inline SplitMix64 node_stream(std::uint64_t seed, std::uint32_t node, StreamKind kind) {
    return SplitMix64(mix_seed(seed, node, static_cast<std::uint64_t>(kind)));
}

} // namespace dtnsim
