#pragma once

// Deterministic random streams for reproducible experiments.
//
// Every consumer of randomness receives its own stream, derived from a
// master seed plus a path of integer ids (cell id, trial index, purpose
// tag). Streams depend only on those values, never on execution order,
// so results are identical for any worker count.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace oas::rng {

// splitmix64 finalizer, used to whiten seed material.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(const char* s) noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    while (*s != '\0') {
        h ^= static_cast<unsigned char>(*s++);
        h *= 1099511628211ULL;
    }
    return h;
}

// Purpose tags for the independent streams used by one trial.
inline constexpr std::uint64_t kTruthTag = fnv1a("truth");
inline constexpr std::uint64_t kNoiseTag = fnv1a("noise");

// Fold a path of ids into a master seed. Each id is whitened before
// mixing so that small integer ids (0, 1, 2, ...) yield unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(master);
    for (std::uint64_t id : path) h = mix64(h ^ mix64(id));
    return h;
}

// pcg32: 64-bit LCG state with an xorshift-rotate output permutation.
// Gaussians come from the Marsaglia polar method (rejection on the unit
// disk, one cached spare per accepted pair).
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t initstate, std::uint64_t initseq = 0) {
        state_ = 0u;
        inc_ = (initseq << 1u) | 1u;
        next_u32();
        state_ += initstate;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal deviate.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline Pcg32 make_stream(std::uint64_t seed) {
    return Pcg32(mix64(seed), mix64(seed ^ 0xda3e39cb94b95bdbULL));
}

} // namespace oas::rng
