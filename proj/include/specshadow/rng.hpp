#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace specshadow {

/// Deterministic sampling helpers on top of mt19937_64. Doubles are derived
/// from raw bits directly so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    long integer(long lo, long hi) {
        return lo + static_cast<long>(bits() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::complex<double> complex_in_box(double half_width) {
        return {uniform(-half_width, half_width), uniform(-half_width, half_width)};
    }

    /// Uniform on the annulus r_min <= |z| <= r_max (area measure).
    std::complex<double> complex_in_annulus(double r_min, double r_max) {
        double r = std::sqrt(uniform(r_min * r_min, r_max * r_max));
        double phi = uniform(0.0, 2.0 * M_PI);
        return std::polar(r, phi);
    }

    std::complex<double> on_unit_circle() { return std::polar(1.0, uniform(0.0, 2.0 * M_PI)); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace specshadow
