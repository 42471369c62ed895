#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "grid.hpp"
#include "spectral.hpp"

namespace zeq {

/// Strip half-width proxy sigma and Sobolev index s.
struct GevreyParams {
    double sigma = 0.0;
    double s = 0.0;
};

/// Cutoff J for the infinite Kato-Masuda sum and the E_{sigma,m} sup.
struct NormTruncation {
    int max_j = 10;
};

namespace detail {

inline void check_truncation(NormTruncation t)
{
    if (t.max_j < 0)
        throw ConfigError("norm truncation J must be nonnegative");
    if (t.max_j > kDefaultMaxDerivativeOrder)
        throw ConfigError("norm truncation J = " + std::to_string(t.max_j)
                          + " exceeds the maximum derivative order " + std::to_string(kDefaultMaxDerivativeOrder));
}

/// ||d^j f||_{H^s}^2 computed directly on the spectrum.
inline double derivative_sobolev_sq(const Spectrum& F, int j, double s)
{
    const Grid& g = F.grid;
    double sum = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (j % 2 == 1 && i == g.nyquist_slot())
            continue;
        const double k2 = g.wavenumber(i) * g.wavenumber(i);
        double w = std::pow(1.0 + k2, s);
        if (j > 0)
            w *= std::pow(k2, j);
        sum += w * std::norm(F.coeffs[i]);
    }
    return sum * g.dxi();
}

inline double factorial(int j)
{
    double r = 1.0;
    for (int i = 2; i <= j; ++i)
        r *= i;
    return r;
}

} // namespace detail

inline double sobolev_norm(const Spectrum& F, double s) { return std::sqrt(detail::derivative_sobolev_sq(F, 0, s)); }

/// (sum_j (1+xi_j^2)^s |fhat_j|^2 dxi)^{1/2}.  Negative s is accepted.
inline double sobolev_norm(const Field& f, double s) { return sobolev_norm(to_spectrum(f), s); }

struct GevreyNorm {
    double value = 0.0;
    /// The top decade of wavenumbers carries more than 10% of the squared norm:
    /// the true norm is infinite or the field is under-resolved.
    bool tail_dominated = false;
};

inline GevreyNorm gevrey_norm(const Field& f, GevreyParams p)
{
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
        throw ConfigError("Gevrey sigma must be finite and >= 0");
    const Spectrum F = to_spectrum(f);
    const Grid& g = f.grid;
    const double top = 0.9 * static_cast<double>(g.size() / 2);
    double total = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double k = g.wavenumber(i);
        const double term = std::pow(1.0 + k * k, p.s) * std::exp(2.0 * p.sigma * std::abs(k)) * std::norm(F.coeffs[i]);
        total += term;
        if (static_cast<double>(std::abs(g.mode(i))) > top)
            tail += term;
    }
    GevreyNorm out;
    out.value = std::sqrt(total * g.dxi());
    out.tail_dominated = total > 0.0 && tail > 0.1 * total;
    return out;
}

/// Individual terms e^{2 sigma j}/(j!)^2 ||d^j f||_{H^s}^2, j = 0..J.
inline std::vector<double> kato_masuda_terms(const Field& f, double sigma, double s, NormTruncation t = {})
{
    detail::check_truncation(t);
    const Spectrum F = to_spectrum(f);
    std::vector<double> terms(static_cast<std::size_t>(t.max_j) + 1);
    for (int j = 0; j <= t.max_j; ++j) {
        const double fact = detail::factorial(j);
        terms[static_cast<std::size_t>(j)] = std::exp(2.0 * sigma * j) / (fact * fact) * detail::derivative_sobolev_sq(F, j, s);
    }
    return terms;
}

/// Squared Kato-Masuda norm ||f||^2_{sigma,s}, truncated at J.  Phi_{sigma} = value / 2.
inline double kato_masuda_sq(const Field& f, double sigma, double s, NormTruncation t = {})
{
    double sum = 0.0;
    for (double term : kato_masuda_terms(f, sigma, s, t))
        sum += term;
    return sum;
}

/// sup_{j<=J} sigma^j (j+1)^2 / j! ||d^j f||_{H^{2m}}.
inline double em_norm(const Field& f, double sigma, int m, NormTruncation t = {})
{
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw ConfigError("E_{sigma,m} requires 0 < sigma <= 1");
    if (m < 1)
        throw ConfigError("E_{sigma,m} requires m >= 1");
    detail::check_truncation(t);
    const Spectrum F = to_spectrum(f);
    double best = 0.0;
    for (int j = 0; j <= t.max_j; ++j) {
        const double w = std::pow(sigma, j) * (j + 1.0) * (j + 1.0) / detail::factorial(j);
        best = std::max(best, w * std::sqrt(detail::derivative_sobolev_sq(F, j, 2.0 * m)));
    }
    return best;
}

inline double c1_norm(const Field& f) { return max_abs(f) + max_abs(derivative(f, 1)); }

inline double l1_norm(const Field& f)
{
    double s = 0.0;
    for (double v : f.values)
        s += std::abs(v);
    return s * f.grid.dx();
}

/// Exponential decay rate of |fhat|, read as the analyticity strip half-width.
struct RadiusEstimate {
    double radius = 0.0;   ///< +inf when `infinite` is set
    bool infinite = false; ///< super-exponential decay: entire function
    double fit_quality = 0.0;
    std::size_t points = 0;
    bool low_quality = false;
    double curvature = 0.0; ///< second derivative of log|fhat| in xi over the fit band
};

/// Fit-band bounds and convexity threshold for the radius estimator.
struct RadiusFitOptions {
    double band_low = 1e-13;
    double band_high = 1e-2;
    double curvature_threshold = -1e-3;
    std::size_t min_points = 8;
};

namespace detail {

// Solves the (n+1)x(n+1) normal equations for a polynomial fit in x.
template <std::size_t Deg>
std::array<double, Deg + 1> polyfit(const std::vector<double>& x, const std::vector<double>& y)
{
    constexpr std::size_t n = Deg + 1;
    std::array<std::array<double, n + 1>, n> a{};
    for (std::size_t p = 0; p < x.size(); ++p) {
        std::array<double, 2 * n> pw{};
        pw[0] = 1.0;
        for (std::size_t q = 1; q < 2 * n; ++q)
            pw[q] = pw[q - 1] * x[p];
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c)
                a[r][c] += pw[r + c];
            a[r][n] += pw[r] * y[p];
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c]))
                piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[c][c] == 0.0)
                continue;
            const double m = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k)
                a[r][k] -= m * a[c][k];
        }
    }
    std::array<double, n> coef{};
    for (std::size_t r = 0; r < n; ++r)
        coef[r] = a[r][r] != 0.0 ? a[r][n] / a[r][r] : 0.0;
    return coef;
}

} // namespace detail

/// Paley-Wiener radius: least-squares slope of log|fhat| against |xi|.
///
/// Uses the monotone upper envelope of the one-sided amplitude spectrum so that
/// interference zeros do not bias the fit, restricted to the band where the
/// envelope lies in [band_low, band_high] * max.  A quadratic fit over the same
/// band gives the curvature; below the threshold the decay is super-exponential
/// and the radius is reported as infinite.
inline RadiusEstimate analyticity_radius(const Field& f, RadiusFitOptions opt = {})
{
    const Spectrum F = to_spectrum(f);
    const Grid& g = f.grid;
    const std::size_t half = g.size() / 2;

    std::vector<double> amp(half, 0.0);
    double peak = 0.0;
    for (std::size_t j = 0; j < half; ++j) {
        const double a = std::norm(F.at_mode(static_cast<long>(j)));
        const double b = std::norm(F.at_mode(-static_cast<long>(j)));
        amp[j] = std::sqrt(0.5 * (a + b));
        peak = std::max(peak, amp[j]);
    }
    if (peak == 0.0)
        throw ConfigError("analyticity radius is undefined for the zero field");

    std::vector<double> env(half, 0.0);
    double running = 0.0;
    for (std::size_t j = half; j-- > 0;) {
        running = std::max(running, amp[j]);
        env[j] = running;
    }

    std::vector<double> xs, ys;
    for (std::size_t j = 1; j < half; ++j) {
        if (env[j] <= opt.band_high * peak && env[j] >= opt.band_low * peak) {
            xs.push_back(static_cast<double>(j) * g.dxi());
            ys.push_back(std::log(env[j]));
        }
    }

    RadiusEstimate out;
    out.points = xs.size();
    out.low_quality = xs.size() < opt.min_points;
    if (xs.size() < 3) {
        // The whole decay happens within a couple of modes.
        out.infinite = true;
        out.radius = std::numeric_limits<double>::infinity();
        return out;
    }

    const auto lin = detail::polyfit<1>(xs, ys);
    double mean = 0.0;
    for (double y : ys)
        mean += y;
    mean /= static_cast<double>(ys.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double r = ys[p] - (lin[0] + lin[1] * xs[p]);
        ss_res += r * r;
        ss_tot += (ys[p] - mean) * (ys[p] - mean);
    }
    out.fit_quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    // Center x for conditioning; curvature is shift-invariant.
    const double xc = 0.5 * (xs.front() + xs.back());
    std::vector<double> xcen(xs.size());
    for (std::size_t p = 0; p < xs.size(); ++p)
        xcen[p] = xs[p] - xc;
    const auto quad = detail::polyfit<2>(xcen, ys);
    out.curvature = 2.0 * quad[2];

    if (out.curvature < opt.curvature_threshold) {
        out.infinite = true;
        out.radius = std::numeric_limits<double>::infinity();
    } else {
        out.radius = std::max(0.0, -lin[1]);
    }
    return out;
}

} // namespace zeq
