#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynamics.hpp"
#include "grid.hpp"
#include "spectral.hpp"

namespace zeq {

enum class Family { gaussian_u, gaussian_momentum, poisson_kernel, smooth_bump, single_mode, file };

inline const char* to_string(Family f)
{
    switch (f) {
    case Family::gaussian_u: return "gaussian_u";
    case Family::gaussian_momentum: return "gaussian_momentum";
    case Family::poisson_kernel: return "poisson_kernel";
    case Family::smooth_bump: return "smooth_bump";
    case Family::single_mode: return "single_mode";
    case Family::file: return "file";
    }
    return "?";
}

inline Family family_from_string(const std::string& s)
{
    for (Family f : {Family::gaussian_u, Family::gaussian_momentum, Family::poisson_kernel, Family::smooth_bump,
                     Family::single_mode, Family::file})
        if (s == to_string(f))
            return f;
    throw ConfigError("unknown initial-data family '" + s + "'");
}

/// Named initial-data family and its parameters.
///
/// `width` is the Gaussian width, the Poisson-kernel decay parameter a, or the
/// bump half-support; `mode` selects the wavenumber of single_mode.
struct InitialDataSpec {
    Family family = Family::gaussian_momentum;
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
    int sign = 1;
    int mode = 1;
    std::string path;

    bool operator==(const InitialDataSpec&) const = default;
};

/// Poisson kernel a / (pi (x^2 + a^2)) summed over all periodic images of the box.
/// Its grid transform is exactly e^{-a|xi|} / sqrt(2 pi) up to aliasing.
inline double periodic_poisson_kernel(double x, double a, double half_length)
{
    const double q = std::numbers::pi / half_length;
    return std::sinh(q * a) / (2.0 * half_length * (std::cosh(q * a) - std::cos(q * x)));
}

/// exp(1 - 1/(1 - r^2)) for |r| < 1, else 0.  Peak value 1 at r = 0.
inline double smooth_bump(double r)
{
    if (std::abs(r) >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

/// Two-column "x,u" CSV with a header line; nodes must form a uniform grid starting at -L.
inline Field read_sample_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open sample file '" + path + "'");
    std::string line;
    std::vector<double> xs, us;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x = 0, u = 0;
        if (!(ss >> x >> u)) {
            if (std::exchange(header, false))
                continue;
            throw ConfigError("malformed line in sample file '" + path + "': " + line);
        }
        header = false;
        xs.push_back(x);
        us.push_back(u);
    }
    if (xs.size() < 16)
        throw ConfigError("sample file '" + path + "' has fewer than 16 points");
    const double half = -xs.front();
    Grid g(half, xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - g.node(i)) > 1e-9 * std::max(1.0, half))
            throw ConfigError("sample file '" + path + "' is not on a uniform grid starting at -L");
    return Field(g, std::move(us));
}

inline void write_sample_file(const std::string& path, const Field& f)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write sample file '" + path + "'");
    out << "x,u\n";
    char buf[64];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid.node(i), f.values[i]);
        out << buf;
    }
}

inline Field make_initial_data(const InitialDataSpec& spec, const Grid& g)
{
    if (spec.sign != 1 && spec.sign != -1)
        throw ConfigError("initial-data sign must be +1 or -1");
    if (spec.family != Family::single_mode && spec.family != Family::file && !(spec.width > 0.0))
        throw ConfigError("initial-data width must be positive");
    const double amp = spec.sign * spec.amplitude;
    switch (spec.family) {
    case Family::gaussian_u:
        return Field::sample(g, [&](double x) {
            const double r = (x - spec.center) / spec.width;
            return amp * std::exp(-r * r);
        });
    case Family::gaussian_momentum: {
        const Field m0 = Field::sample(g, [&](double x) {
            const double r = (x - spec.center) / spec.width;
            return amp * std::exp(-r * r);
        });
        return velocity_from_momentum(m0);
    }
    case Family::poisson_kernel:
        return Field::sample(g, [&](double x) {
            return amp * periodic_poisson_kernel(x - spec.center, spec.width, g.half_length());
        });
    case Family::smooth_bump:
        return Field::sample(g, [&](double x) { return amp * smooth_bump((x - spec.center) / spec.width); });
    case Family::single_mode:
        return Field::sample(g, [&](double x) {
            return amp * std::cos(std::numbers::pi * spec.mode * (x - spec.center) / g.half_length());
        });
    case Family::file: {
        Field f = read_sample_file(spec.path);
        if (!(f.grid == g))
            throw ConfigError("sample file grid (L = " + std::to_string(f.grid.half_length())
                              + ", N = " + std::to_string(f.grid.size()) + ") does not match the configured grid");
        return amp * f;
    }
    }
    throw ConfigError("unhandled initial-data family");
}

} // namespace zeq
