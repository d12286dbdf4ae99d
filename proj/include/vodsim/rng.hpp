#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vodsim {

// All randomness in the simulator flows through this wrapper. mt19937_64 is
// bit-identical across platforms, and the double conversion uses raw engine
// bits rather than std:: distributions (whose output is implementation
// defined), so a (parameters, seed) pair reproduces the same catalog, trace
// and eviction sequence everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return (engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Unbiased uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n)
    {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Knuth's product-of-uniforms sampler; exact and fast for the moderate
    // lambdas this simulator uses (underflows only past lambda ~ 700).
    uint64_t poisson(double lambda)
    {
        const double threshold = std::exp(-lambda);
        uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > threshold);
        return k - 1;
    }

private:
    std::mt19937_64 engine_;
};

// Derives an independent sub-seed for a named stream (catalog, trace, ...),
// so one top-level seed drives several generators without overlap.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream)
{
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace seed_stream {
constexpr uint64_t catalog = 1;
constexpr uint64_t trace = 2;
constexpr uint64_t rank_shuffle = 3;
constexpr uint64_t rand_policy = 4;
} // namespace seed_stream

} // namespace vodsim
