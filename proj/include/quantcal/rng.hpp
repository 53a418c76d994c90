#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace quantcal {

// Deterministic random source for data generation and tests. The mt19937_64
// stream is fixed by the standard and the mappings below avoid distribution
// classes, so identical seeds give identical values on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller on fresh uniforms.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Uniform integer in [0, n). Modulo bias is irrelevant at test scales.
    std::uint64_t integer(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace quantcal
