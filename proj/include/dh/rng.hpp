#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dh {

// Deterministic random source. mt19937_64 output is fixed by the standard;
// the uniform/gaussian mappings below avoid std::*_distribution, whose
// streams are implementation-defined, so seeded runs are reproducible
// across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    double angle() { return uniform() * 2.0 * std::numbers::pi; }

    // Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Derived stream for a sub-task, so trial k is reproducible in isolation.
    Rng child(std::uint64_t salt) {
        return Rng(eng_() ^ (salt * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace dh
