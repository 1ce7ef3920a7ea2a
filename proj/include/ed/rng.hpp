#pragma once

// Seeded random streams. Every randomized routine takes an explicit seed and
// derives independent streams from (seed, stream index), so replicates and
// chains can run in any order and still replay bit-identically.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ed {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    return Rng(seq);
}

inline double draw_uniform(Rng& rng, double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double draw_normal(Rng& rng, double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(rng);
}

/// Gamma with shape/rate parameterization.
inline double draw_gamma(Rng& rng, double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

/// Inverse-Gamma(shape, scale) as the reciprocal of Gamma(shape, rate = scale).
inline double draw_inverse_gamma(Rng& rng, double shape, double scale) {
    return 1.0 / draw_gamma(rng, shape, scale);
}

inline long long draw_poisson(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<long long>(mean)(rng);
}

/// Multinomial via sequential conditional binomials.
inline std::vector<long long> draw_multinomial(Rng& rng, long long trials,
                                               std::span<const double> weights) {
    double remaining_mass = 0.0;
    for (double w : weights) remaining_mass += w;
    std::vector<long long> out(weights.size(), 0);
    long long remaining = trials;
    for (std::size_t i = 0; i < weights.size() && remaining > 0; ++i) {
        if (i + 1 == weights.size()) {
            out[i] = remaining;
            break;
        }
        const double p = remaining_mass > 0.0 ? std::min(1.0, weights[i] / remaining_mass) : 0.0;
        out[i] = p > 0.0 ? std::binomial_distribution<long long>(remaining, p)(rng) : 0;
        remaining -= out[i];
        remaining_mass -= weights[i];
    }
    return out;
}

}  // namespace ed
