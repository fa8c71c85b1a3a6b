#pragma once

#include <cstdint>
#include <cmath>

namespace earcardio {

// Deterministic, stdlib-independent RNG. std::normal_distribution output is
// implementation-defined, so every stochastic component in the pipeline draws
// from this generator instead to keep seeded runs byte-identical.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // warm up so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    uint64_t next_u64() {
        // splitmix64
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

    // standard normal via Box-Muller (no rejection, fully deterministic)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // derive an independent stream, e.g. one per subject or per window
    Rng fork(uint64_t stream_id) {
        uint64_t s = next_u64();
        return Rng(s ^ (0x9E3779B97F4A7C15ull * (stream_id + 1)));
    }

private:
    uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Stateless seed mixer for deriving per-task seeds from a master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace earcardio
