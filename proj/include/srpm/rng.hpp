#pragma once

// Seed derivation for reproducible runs.
//
// Every run owns a 64-bit seed. Independent streams inside a run (entry order,
// resolution draw, omega0 sampling, ...) are derived from it by hashing the run
// seed with a fixed stream tag through splitmix64. Batch run i uses seed
// base + i, so the randomness of a run never depends on which worker executes
// it or in what order.

#include <cstdint>
#include <random>
#include <span>

namespace srpm {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
    EntryOrder = 1,
    Resolution = 2,
    TrueAtom = 3,
    Scenario = 4,
};

constexpr std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
    return base_seed + run_index;
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
    return splitmix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL));
}

/// mt19937_64 with platform-independent helpers (the std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Index drawn with probability proportional to weights.
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

}  // namespace srpm
