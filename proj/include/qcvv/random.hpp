#pragma once

// Portable, seed-reproducible random streams. Only the raw engine comes from
// the standard library (mt19937_64 is fully specified); the distributions are
// implemented here or taken from Boost so that outputs do not depend on the
// standard library vendor.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qcvv {

/// Identifier written into every dataset so reruns can be checked.
inline constexpr const char* kPrngAlgorithm = "mt19937_64+splitmix64-split+box-muller/v1";

/// SplitMix64 finaliser, used to derive independent per-task seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for a task identified by a path of integers under a master seed.
/// derive_seed(m, {a, b}) == splitmix64(splitmix64(splitmix64(m) ^ a) ^ b).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, n) by rejection (n > 0).
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal via the Box-Muller transform (pairs cached).
    double normal();
    double normal(double mean, double sigma) { return mean + sigma * normal(); }
    /// Binomial(trials, p) draw.
    std::uint64_t binomial(std::uint64_t trials, double p);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace qcvv
