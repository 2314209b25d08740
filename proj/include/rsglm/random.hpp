#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rsglm/errors.hpp"

namespace rsglm {

/// Seeded random source used everywhere randomness is needed. The engine is
/// std::mt19937_64 (sequence fixed by the standard), and all variate
/// transforms below are implemented here so that a given 64-bit seed
/// reproduces the same stream on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Unbiased integer in [0, n) by rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw validation_error("Rng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform double in (0, 1).
    double uniform() {
        // 53 random bits; never returns exactly 0.
        const std::uint64_t bits = eng_() >> 11;
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Gamma(shape, scale = 1) by Marsaglia-Tsang squeeze; shape < 1 handled
    /// by the usual power boost.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw validation_error("Rng::gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Gamma variate with mean mu and scale nu: shape = nu, rate = nu / mu.
    double gamma_mean_scale(double mu, double nu) {
        return gamma(nu) * (mu / nu);
    }

private:
    std::mt19937_64 eng_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

/// In-place Fisher-Yates shuffle driven by the Rng above.
template <typename T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace rsglm
