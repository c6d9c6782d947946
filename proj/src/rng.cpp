#include "ldnet/rng.hpp"

#include <cmath>
#include <numbers>

namespace ldnet {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng Rng::derive(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
    std::uint64_t s = seed;
    s ^= fnv1a64(purpose);
    s ^= index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    return Rng(s);
}

double Rng::normal() {
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::uniform_vector(Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
}

Vector Rng::normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
}

}  // namespace ldnet
