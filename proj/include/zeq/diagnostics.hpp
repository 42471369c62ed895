#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "norms.hpp"
#include "spectral.hpp"

namespace zeq {

struct KatoMasudaRequest {
    double sigma = -0.5;
    double s = 2.0;
    int J = 10;

    bool operator==(const KatoMasudaRequest&) const = default;
};

struct EmRequest {
    double sigma = 0.5;
    int m = 3;
    int J = 10;

    bool operator==(const EmRequest&) const = default;
};

struct DiagnosticsOptions {
    std::vector<double> sobolev_s;               ///< extra H^s norms per record
    std::vector<KatoMasudaRequest> kato_masuda;  ///< ||u||^2_{sigma,s} per record
    std::vector<EmRequest> em;                   ///< ||u||_{E_{sigma,m}} per record
    double support_eps_rel = 1e-10;              ///< support threshold relative to max|u_0|
    bool keep_snapshots = false;                 ///< store the state at every RK4 step
};

/// Everything monitored at one snapshot.
struct DiagnosticsRecord {
    double t = 0.0;
    double mean_u = 0.0; ///< \int u dx
    double l1_u = 0.0;
    double l1_m = 0.0;
    double min_m = 0.0, max_m = 0.0;
    double min_u = 0.0, max_u = 0.0;
    double min_neg_ux = 0.0, max_neg_ux = 0.0;
    double h1 = 0.0, h2 = 0.0, h3 = 0.0;
    std::vector<double> hs;
    double c1 = 0.0;
    double i_functional = 0.0;
    double di_dt_integral = 0.0; ///< \int (-u_x)(2 u_xx^2 + u_xxx^2 / 2) dx
    double di_dt_residual = 0.0; ///< differenced dI/dt minus the integral (filled by finalize)
    double support_lo = 0.0, support_hi = 0.0;
    bool support_empty = true;
    double radius_fit = std::numeric_limits<double>::infinity();
    double radius_fit_quality = 0.0;
    bool radius_infinite = true;
    std::vector<double> km_sq;
    std::vector<double> em;
    double edge_ratio = 0.0; ///< max(|u(-L)|, |u(L - dx)|) / max|u|
};

struct DiagnosticsSeries {
    Grid grid;
    ModelParams model;
    double dt = 0.0;
    int stride = 1;
    Field u0;
    Field m0;
    DiagnosticsOptions options;
    std::vector<DiagnosticsRecord> records;
    RunStatus status = RunStatus::completed;
    std::string message;
    std::vector<State> snapshots; ///< every RK4 step when options.keep_snapshots

    bool diverged() const { return status == RunStatus::diverged; }
};

inline DiagnosticsRecord measure(const State& s, const DiagnosticsOptions& opt, double support_threshold)
{
    const Field& u = s.u;
    const Grid& g = u.grid;
    const double dx = g.dx();
    const Spectrum U = to_spectrum(u);
    const Field ux = to_field(differentiate(U, 1));
    const Field uxx = to_field(differentiate(U, 2));
    const Field uxxx = to_field(differentiate(U, 3));

    DiagnosticsRecord r;
    r.t = s.t;
    r.min_m = std::numeric_limits<double>::infinity();
    r.max_m = -r.min_m;
    r.min_u = r.min_m;
    r.max_u = r.max_m;
    r.min_neg_ux = r.min_m;
    r.max_neg_ux = r.max_m;

    double peak = 0.0, peak_ux = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = u.values[i], v1 = ux.values[i], v2 = uxx.values[i], v3 = uxxx.values[i];
        const double m = v - v2;
        r.mean_u += v;
        r.l1_u += std::abs(v);
        r.l1_m += std::abs(m);
        r.min_m = std::min(r.min_m, m);
        r.max_m = std::max(r.max_m, m);
        r.min_u = std::min(r.min_u, v);
        r.max_u = std::max(r.max_u, v);
        r.min_neg_ux = std::min(r.min_neg_ux, -v1);
        r.max_neg_ux = std::max(r.max_neg_ux, -v1);
        peak = std::max(peak, std::abs(v));
        peak_ux = std::max(peak_ux, std::abs(v1));
        r.i_functional += 0.25 * (v * v + v1 * v1) + 0.5 * (v1 * v1 + v2 * v2) + 0.5 * (v2 * v2 + v3 * v3);
        r.di_dt_integral += -v1 * (2.0 * v2 * v2 + 0.5 * v3 * v3);
        if (std::abs(v) > support_threshold) {
            if (r.support_empty) {
                r.support_lo = g.node(i);
                r.support_empty = false;
            }
            r.support_hi = g.node(i);
        }
    }
    r.mean_u *= dx;
    r.l1_u *= dx;
    r.l1_m *= dx;
    r.i_functional *= dx;
    r.di_dt_integral *= dx;
    r.c1 = peak + peak_ux;
    r.h1 = sobolev_norm(U, 1.0);
    r.h2 = sobolev_norm(U, 2.0);
    r.h3 = sobolev_norm(U, 3.0);
    for (double sv : opt.sobolev_s)
        r.hs.push_back(sobolev_norm(U, sv));
    for (const auto& req : opt.kato_masuda)
        r.km_sq.push_back(kato_masuda_sq(u, req.sigma, req.s, NormTruncation{req.J}));
    for (const auto& req : opt.em)
        r.em.push_back(em_norm(u, req.sigma, req.m, NormTruncation{req.J}));
    if (peak > 0.0) {
        const RadiusEstimate est = analyticity_radius(u);
        r.radius_fit = est.radius;
        r.radius_infinite = est.infinite;
        r.radius_fit_quality = est.fit_quality;
        r.edge_ratio = std::max(std::abs(u.values.front()), std::abs(u.values.back())) / peak;
    }
    return r;
}

/// Three-point derivative estimates of y(t) (second order, nonuniform spacing allowed).
inline std::vector<double> differentiate_series(const std::vector<double>& t, const std::vector<double>& y)
{
    const std::size_t n = t.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        return d;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
        const double t0 = t[c - 1], t1 = t[c], t2 = t[c + 1];
        const double h1 = t1 - t0, h2 = t2 - t1;
        const double y0 = y[c - 1], y1 = y[c], y2 = y[c + 1];
        if (i == c) {
            d[i] = -h2 / (h1 * (h1 + h2)) * y0 + (h2 - h1) / (h1 * h2) * y1 + h1 / (h2 * (h1 + h2)) * y2;
        } else if (i < c) {
            d[i] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * y0 + (h1 + h2) / (h1 * h2) * y1 - h1 / (h2 * (h1 + h2)) * y2;
        } else {
            d[i] = h2 / (h1 * (h1 + h2)) * y0 - (h1 + h2) / (h1 * h2) * y1 + (h1 + 2 * h2) / (h2 * (h1 + h2)) * y2;
        }
    }
    return d;
}

/// Fill the differenced-dI/dt residual column.
inline void finalize(DiagnosticsSeries& series)
{
    std::vector<double> t, I;
    for (const auto& r : series.records) {
        t.push_back(r.t);
        I.push_back(r.i_functional);
    }
    const std::vector<double> dI = differentiate_series(t, I);
    for (std::size_t i = 0; i < series.records.size(); ++i)
        series.records[i].di_dt_residual = series.records.size() >= 3 ? dI[i] - series.records[i].di_dt_integral : 0.0;
}

/// Integrate from u0 and record diagnostics every `cfg.snapshot_stride` steps.
inline DiagnosticsSeries simulate_series(const Field& u0, const SolverConfig& cfg, const ModelParams& p,
                                         const DiagnosticsOptions& opt = {})
{
    DiagnosticsSeries series;
    series.grid = u0.grid;
    series.model = p;
    series.dt = cfg.dt;
    series.stride = cfg.snapshot_stride;
    series.u0 = u0;
    series.m0 = momentum(u0);
    series.options = opt;

    const double threshold = opt.support_eps_rel * max_abs(u0);
    const double t_final = cfg.t_end;
    const std::size_t n = step_count(cfg);

    SolverConfig run = cfg;
    if (opt.keep_snapshots)
        run.snapshot_stride = 1;

    auto observe = [&](const State& s) {
        if (opt.keep_snapshots)
            series.snapshots.push_back(s);
        const auto step = static_cast<std::size_t>(std::llround(s.t / cfg.dt));
        const bool last = n == 0 || s.t == t_final;
        if (step % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || last) {
            if (series.records.empty() || series.records.back().t != s.t)
                series.records.push_back(measure(s, opt, threshold));
        }
    };
    const IntegrationOutcome out = integrate(State{0.0, u0}, run, p, observe);
    series.status = out.status;
    series.message = out.message;
    finalize(series);
    return series;
}

} // namespace zeq
