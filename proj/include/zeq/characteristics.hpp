#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "dynamics.hpp"
#include "spectral.hpp"

namespace zeq {

/// Particle positions y(t, x_i) of the flow dy/dt = u^k(t, y), y(0, x) = x.
struct FlowMap {
    double t = 0.0;
    std::vector<double> seeds;
    std::vector<double> positions;

    bool monotone() const
    {
        for (std::size_t i = 1; i < positions.size(); ++i)
            if (!(positions[i] > positions[i - 1]))
                return false;
        return true;
    }
};

enum class TimeInterpolation {
    hermite, ///< cubic Hermite from u and F(u) at the bracketing snapshots
    linear,
};

struct FlowOptions {
    int substeps = 1; ///< RK4 steps per snapshot interval
    double dealias_fraction = kTwoThirds;
    TimeInterpolation interpolation = TimeInterpolation::hermite;
};

struct FlowHistory {
    std::vector<FlowMap> maps; ///< one per snapshot
    bool monotone = true;
    double first_violation_t = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct SnapshotSpectra {
    double t;
    Spectrum u;
    Spectrum rate;
};

inline Spectrum interpolate_in_time(const SnapshotSpectra& a, const SnapshotSpectra& b, double t,
                                    TimeInterpolation mode)
{
    const double h = b.t - a.t;
    const double tau = h != 0.0 ? (t - a.t) / h : 0.0;
    Spectrum out(a.u.grid);
    if (mode == TimeInterpolation::linear) {
        for (std::size_t i = 0; i < out.size(); ++i)
            out.coeffs[i] = (1.0 - tau) * a.u.coeffs[i] + tau * b.u.coeffs[i];
        return out;
    }
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + tau;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.coeffs[i] = h00 * a.u.coeffs[i] + h10 * h * a.rate.coeffs[i] + h01 * b.u.coeffs[i]
                        + h11 * h * b.rate.coeffs[i];
    return out;
}

inline std::vector<double> velocity_at(const Spectrum& U, std::span<const double> y, int k)
{
    std::vector<double> v = evaluate_series(U, y);
    for (double& x : v)
        x = ipow(x, k);
    return v;
}

} // namespace detail

/// Integrate the characteristics through a time-ordered list of snapshots.
///
/// Positions are kept unwrapped (they may leave [-L, L)); the velocity field
/// is evaluated periodically.  The returned history has one FlowMap per
/// snapshot, the first being the identity map.
inline FlowHistory evolve_flow(std::span<const State> snapshots, const ModelParams& p, std::vector<double> seeds,
                               FlowOptions opt = {})
{
    p.validate();
    if (snapshots.empty())
        throw ConfigError("evolve_flow needs at least one snapshot");
    if (opt.substeps < 1)
        throw ConfigError("flow substeps must be >= 1");
    if (seeds.empty())
        seeds = snapshots.front().u.grid.nodes();

    FlowHistory hist;
    FlowMap current{snapshots.front().t, seeds, seeds};
    hist.maps.push_back(current);

    const auto spectra = [&](const State& s) {
        Spectrum U = to_spectrum(s.u);
        Spectrum R = opt.interpolation == TimeInterpolation::hermite ? rhs_spectrum(U, p, opt.dealias_fraction)
                                                                     : Spectrum(s.u.grid);
        return detail::SnapshotSpectra{s.t, std::move(U), std::move(R)};
    };

    detail::SnapshotSpectra a = spectra(snapshots.front());
    std::vector<double> y = seeds, stage(seeds.size());
    for (std::size_t n = 1; n < snapshots.size(); ++n) {
        detail::SnapshotSpectra b = spectra(snapshots[n]);
        const double h = (b.t - a.t) / opt.substeps;
        for (int sub = 0; sub < opt.substeps; ++sub) {
            const double t0 = a.t + sub * h;
            const auto field_at = [&](double t) { return detail::interpolate_in_time(a, b, t, opt.interpolation); };
            const Spectrum U0 = field_at(t0);
            const Spectrum Um = field_at(t0 + 0.5 * h);
            const Spectrum U1 = field_at(t0 + h);

            const auto k1 = detail::velocity_at(U0, y, p.k);
            for (std::size_t i = 0; i < y.size(); ++i)
                stage[i] = y[i] + 0.5 * h * k1[i];
            const auto k2 = detail::velocity_at(Um, stage, p.k);
            for (std::size_t i = 0; i < y.size(); ++i)
                stage[i] = y[i] + 0.5 * h * k2[i];
            const auto k3 = detail::velocity_at(Um, stage, p.k);
            for (std::size_t i = 0; i < y.size(); ++i)
                stage[i] = y[i] + h * k3[i];
            const auto k4 = detail::velocity_at(U1, stage, p.k);
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        current.t = b.t;
        current.positions = y;
        if (hist.monotone && !current.monotone()) {
            hist.monotone = false;
            hist.first_violation_t = b.t;
        }
        hist.maps.push_back(current);
        a = std::move(b);
    }
    return hist;
}

/// max_i |m_t(y(t, x_i)) - m_0(x_i)| over seeds where |m_0| > 1e-10 max|m_0|,
/// widened by two grid cells on each side.
inline double transport_residual(const FlowMap& flow, const Field& m0, const Field& mt)
{
    const Grid& g = m0.grid;
    const std::vector<double> m0_at = fourier_interpolate(m0, flow.seeds);
    const std::vector<double> mt_at = fourier_interpolate(mt, flow.positions);

    double peak = 0.0;
    for (double v : m0_at)
        peak = std::max(peak, std::abs(v));
    const double margin = 2.0 * g.dx();

    std::vector<double> active;
    for (std::size_t i = 0; i < flow.seeds.size(); ++i)
        if (std::abs(m0_at[i]) > 1e-10 * peak)
            active.push_back(flow.seeds[i]);
    std::sort(active.begin(), active.end());

    double worst = 0.0;
    for (std::size_t i = 0; i < flow.seeds.size(); ++i) {
        bool include = active.empty();
        if (!include) {
            const auto it = std::lower_bound(active.begin(), active.end(), flow.seeds[i] - margin);
            include = it != active.end() && *it <= flow.seeds[i] + margin;
        }
        if (include)
            worst = std::max(worst, std::abs(mt_at[i] - m0_at[i]));
    }
    return worst;
}

} // namespace zeq
