#ifndef QDFORGE_COMMON_HPP
#define QDFORGE_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qdforge {

// Thrown for malformed shapes, bad arguments, and misuse of an API.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown for invalid configuration values (files, presets, CLI input).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent deterministic RNG stream derived from a base seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0)
{
    return Rng(splitmix64(seed ^ splitmix64(stream)));
}

} // namespace qdforge

#endif
