#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "norms.hpp"
#include "spectral.hpp"

namespace zeq {

/// Nonlinearity exponent k in m_t + u^k m_x = 0.
struct ModelParams {
    int k = 1;

    void validate() const
    {
        if (k < 1)
            throw ConfigError("nonlinearity exponent k must be >= 1");
    }

    bool operator==(const ModelParams&) const = default;
};

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double dealias_fraction = kTwoThirds;
    bool filter_on = false;
    double c_m = 1.0; ///< algebra constant in the lifespan formula
    double c_s = 1.0; ///< Sobolev embedding constant in the energy estimate
    int snapshot_stride = 1;

    void validate() const
    {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw ConfigError("dt must be positive");
        if (!(t_end >= 0.0) || !std::isfinite(t_end))
            throw ConfigError("t_end must be >= 0");
        if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
            throw ConfigError("dealias fraction must lie in (0, 1]");
        if (!(c_m > 0.0) || !(c_s > 0.0))
            throw ConfigError("embedding constants c_m, c_s must be positive");
        if (snapshot_stride < 1)
            throw ConfigError("snapshot stride must be >= 1");
    }

    bool operator==(const SolverConfig&) const = default;
};

struct State {
    double t = 0.0;
    Field u;
};

namespace detail {

inline double ipow(double x, int p)
{
    double r = 1.0;
    for (int i = 0; i < p; ++i)
        r *= x;
    return r;
}

} // namespace detail

/// Spectrum of F(u) for
///   F(u) = -d_x[u^{k+1}/(k+1) + 3/2 (1-d_xx)^{-1}(k u^{k-1} u_x^2)]
///          + (1-d_xx)^{-1}[k(k-1)/2 u^{k-2} u_x^3].
/// Inputs and every product are truncated to the dealiasing band.
inline Spectrum rhs_spectrum(const Spectrum& U, const ModelParams& p, double dealias_fraction = kTwoThirds)
{
    p.validate();
    const Grid& g = U.grid;
    const int k = p.k;
    const Spectrum Ud = dealias(U, dealias_fraction);
    const Field u = to_field(Ud);
    const Field ux = to_field(differentiate(Ud, 1));

    const std::size_t n = g.size();
    Field flux(g), source(g), cubic(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u.values[i];
        const double vx = ux.values[i];
        flux.values[i] = detail::ipow(v, k + 1) / (k + 1);
        source.values[i] = k * detail::ipow(v, k - 1) * vx * vx;
        // k = 1: coefficient k(k-1)/2 vanishes; u^{k-2} is never formed.
        if (k >= 2)
            cubic.values[i] = 0.5 * k * (k - 1) * detail::ipow(v, k - 2) * vx * vx * vx;
    }

    const Spectrum A = dealias(to_spectrum(flux), dealias_fraction);
    const Spectrum B = dealias(to_spectrum(source), dealias_fraction);
    Spectrum out(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = g.wavenumber(i);
        const std::complex<double> ik(0.0, xi);
        const double h = 1.0 / (1.0 + xi * xi);
        out.coeffs[i] = -ik * (A.coeffs[i] + 1.5 * h * B.coeffs[i]);
    }
    out.coeffs[g.nyquist_slot()] = 0.0;

    if (k >= 2) {
        const Spectrum C = dealias(to_spectrum(cubic), dealias_fraction);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = g.wavenumber(i);
            out.coeffs[i] += C.coeffs[i] / (1.0 + xi * xi);
        }
    }
    return out;
}

inline Field rhs(const Field& u, const ModelParams& p, double dealias_fraction = kTwoThirds)
{
    return to_field(rhs_spectrum(to_spectrum(u), p, dealias_fraction));
}

/// m = u - u_xx.
inline Field momentum(const Field& u)
{
    Spectrum S = to_spectrum(u);
    for (std::size_t i = 0; i < S.size(); ++i) {
        const double xi = S.grid.wavenumber(i);
        S.coeffs[i] *= 1.0 + xi * xi;
    }
    return to_field(S);
}

/// u = g * m.
inline Field velocity_from_momentum(const Field& m) { return helmholtz_inverse(m); }

/// Advisory step 0.5 dx / max(1, max|u|^k).
inline double cfl_dt(const Field& u, const ModelParams& p)
{
    p.validate();
    const double speed = detail::ipow(max_abs(u), p.k);
    return 0.5 * u.grid.dx() / std::max(1.0, speed);
}

/// One classical RK4 step of size `dt` (may be negative).
inline State rk4_step(const State& s, double dt, const ModelParams& p, double dealias_fraction = kTwoThirds,
                      bool filter_on = false)
{
    const Spectrum U = to_spectrum(s.u);
    const auto stage = [&](const Spectrum& base, const Spectrum& slope, double h) {
        Spectrum v = base;
        for (std::size_t i = 0; i < v.size(); ++i)
            v.coeffs[i] += h * slope.coeffs[i];
        return v;
    };
    const Spectrum k1 = rhs_spectrum(U, p, dealias_fraction);
    const Spectrum k2 = rhs_spectrum(stage(U, k1, 0.5 * dt), p, dealias_fraction);
    const Spectrum k3 = rhs_spectrum(stage(U, k2, 0.5 * dt), p, dealias_fraction);
    const Spectrum k4 = rhs_spectrum(stage(U, k3, dt), p, dealias_fraction);

    Spectrum next = U;
    for (std::size_t i = 0; i < next.size(); ++i)
        next.coeffs[i] += dt / 6.0 * (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] + k4.coeffs[i]);
    if (filter_on)
        next = exponential_filter(std::move(next));
    return State{s.t + dt, to_field(next)};
}

inline State rk4_step(const State& s, const SolverConfig& cfg, const ModelParams& p)
{
    return rk4_step(s, cfg.dt, p, cfg.dealias_fraction, cfg.filter_on);
}

enum class RunStatus { completed, diverged };

inline const char* to_string(RunStatus s) { return s == RunStatus::completed ? "completed" : "diverged"; }

struct IntegrationOutcome {
    RunStatus status = RunStatus::completed;
    std::string message;
    State final_state;
    std::size_t steps = 0;
};

/// Called with every accepted state that falls on the snapshot stride
/// (always including the initial and the final state).
using Observer = std::function<void(const State&)>;

/// Blow-up guard: abort once ||u||_{H^1} exceeds this multiple of its initial value.
inline constexpr double kBlowupFactor = 1e6;

/// Number of RK4 steps covering [0, t_end]; the last step is shortened to land on t_end.
inline std::size_t step_count(const SolverConfig& cfg)
{
    if (cfg.t_end <= 0.0)
        return 0;
    return static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
}

inline IntegrationOutcome integrate(const State& s0, const SolverConfig& cfg, const ModelParams& p,
                                    const Observer& observe = {})
{
    cfg.validate();
    p.validate();
    if (!s0.u.all_finite())
        throw ConfigError("initial state contains non-finite values");

    IntegrationOutcome out;
    out.final_state = s0;
    if (observe)
        observe(s0);

    const double h1_initial = sobolev_norm(s0.u, 1.0);
    const std::size_t n = step_count(cfg);
    State s = s0;
    for (std::size_t step = 1; step <= n; ++step) {
        const double t_next = step == n ? s0.t + cfg.t_end : s0.t + static_cast<double>(step) * cfg.dt;
        State next = rk4_step(s, t_next - s.t, p, cfg.dealias_fraction, cfg.filter_on);
        next.t = t_next;

        if (!next.u.all_finite()) {
            out.status = RunStatus::diverged;
            out.message = "non-finite values in u at t = " + std::to_string(t_next);
            break;
        }
        if (h1_initial > 0.0) {
            const double h1 = sobolev_norm(next.u, 1.0);
            if (h1 > kBlowupFactor * h1_initial) {
                out.status = RunStatus::diverged;
                out.message = "H^1 norm exceeded the blow-up guard at t = " + std::to_string(t_next);
                break;
            }
        }
        s = std::move(next);
        out.steps = step;
        if (observe && (step % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || step == n))
            observe(s);
    }
    out.final_state = s;
    return out;
}

} // namespace zeq
