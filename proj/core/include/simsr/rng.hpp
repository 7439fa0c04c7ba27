#pragma once

#include <cstdint>
#include <random>

namespace simsr {

/// Seeded random stream. The engine is std::mt19937_64; the distribution
/// functions are pinned here (not delegated to std:: distributions, whose
/// algorithms are implementation-defined) so that identical seeds give
/// identical draws everywhere the library runs.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Rejection sampling, unbiased.
    int uniform_int(int n);

    /// Standard normal via Marsaglia's polar method (one spare cached).
    double normal();

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stable seed derivation for independent sub-streams of one master seed.
uint64_t derive_seed(uint64_t master, uint64_t stream);

}  // namespace simsr
