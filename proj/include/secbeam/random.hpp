#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace secbeam {

/**
 * Seeded Gaussian source with a fixed, documented algorithm.
 *
 * std::normal_distribution is implementation-defined, so reproducibility
 * across standard libraries requires rolling the transform ourselves:
 * uniforms come from mt19937_64 (bit-specified by the standard) and are
 * mapped through Box-Muller. Identical seeds therefore produce identical
 * streams on every platform.
 */
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on (0,1]; never returns 0 so log() below is safe.
    double uniform() {
        const std::uint64_t bits = gen_() >> 11;  // 53 random bits
        return static_cast<double>(bits + 1) * 0x1.0p-53;
    }

    /// Standard normal deviate (Box-Muller, both outputs consumed in order).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    /// Circularly symmetric complex Gaussian with total variance `variance`.
    std::complex<double> cscg(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * normal();
        const double im = s * normal();
        return {re, im};
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// splitmix64 finalizer; used to derive independent per-task seeds from
/// (base seed, index) pairs without correlated mt19937_64 states.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace secbeam
