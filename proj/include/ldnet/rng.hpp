#pragma once

#include "ldnet/types.hpp"

#include <cstdint>
#include <string_view>

namespace ldnet {

/// Deterministic pseudo-random generator (SplitMix64 core).
///
/// Every random draw in the library is fully determined by a
/// (seed, purpose, index) triple: `Rng::derive` hashes the purpose string
/// (FNV-1a) and the index into an independent stream, so e.g. sample i of a
/// dataset gets the same numbers whether samples are generated serially or
/// in parallel. Uniform doubles use the top 53 bits of the state; normals
/// use the Box-Muller transform (cosine branch, two uniforms per draw).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Decorrelate trivially related seeds.
        next_u64();
        next_u64();
    }

    static Rng derive(std::uint64_t seed, std::string_view purpose, std::uint64_t index);

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal();

    Vector uniform_vector(Index n, double lo, double hi);
    Vector normal_vector(Index n);

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit hash, used for stream derivation and config hashing.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace ldnet
