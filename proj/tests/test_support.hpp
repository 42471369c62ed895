#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <zeq/grid.hpp>

namespace zeq::testing {

/// Real band-limited field with random coefficients on modes 0 < |j| <= max_mode.
inline Field random_band_limited(const Grid& g, std::mt19937_64& rng, int max_mode)
{
    std::normal_distribution<double> coef(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Field f(g);
    const double c0 = coef(rng);
    for (std::size_t i = 0; i < g.size(); ++i)
        f.values[i] = c0;
    for (int j = 1; j <= max_mode; ++j) {
        const double a = coef(rng) / j, ph = phase(rng);
        const double k = std::numbers::pi * j / g.half_length();
        for (std::size_t i = 0; i < g.size(); ++i)
            f.values[i] += a * std::cos(k * g.node(i) + ph);
    }
    return f;
}

inline Field gaussian(const Grid& g, double width = 1.0, double center = 0.0)
{
    return Field::sample(g, [&](double x) {
        const double r = (x - center) / width;
        return std::exp(-r * r);
    });
}

inline double max_abs_diff(const Field& a, const Field& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace zeq::testing
