#pragma once

// Seeded generator with distributions written out by hand, so that streams
// are identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lpvar {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// Log-uniform on [a, b], 0 < a < b.
    double log_uniform(double a, double b) { return a * std::exp(uniform() * std::log(b / a)); }
    /// Integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }
    double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

    /// Standard normal by Box-Muller (one draw per pair of uniforms).
    double normal()
    {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace lpvar
