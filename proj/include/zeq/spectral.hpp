#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"

namespace zeq {

/// Default cap on spectral derivative order; (i xi)^j amplifies roundoff like xi^j.
inline constexpr int kDefaultMaxDerivativeOrder = 12;

/// Default 2/3-rule truncation fraction.
inline constexpr double kTwoThirds = 2.0 / 3.0;

inline Spectrum to_spectrum(const Field& f)
{
    const Grid& g = f.grid;
    const std::size_t n = g.size();
    if (f.values.size() != n)
        throw ConfigError("field size does not match its grid");

    std::vector<std::complex<double>> in(n);
    for (std::size_t i = 0; i < n; ++i)
        in[i] = f.values[i];

    Spectrum out(g);
    detail::dft(in, out.coeffs, FFTW_FORWARD);

    // x_n = -L + n dx gives the phase e^{i pi j} = (-1)^j relative to the plain DFT.
    const double scale = g.dx() / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i)
        out.coeffs[i] *= (i % 2 == 0 ? scale : -scale);
    return out;
}

inline Field to_field(const Spectrum& s)
{
    const Grid& g = s.grid;
    const std::size_t n = g.size();
    if (s.coeffs.size() != n)
        throw ConfigError("spectrum size does not match its grid");

    const double scale = std::sqrt(2.0 * std::numbers::pi) / (g.dx() * static_cast<double>(n));
    std::vector<std::complex<double>> in(n), out(n);
    for (std::size_t i = 0; i < n; ++i)
        in[i] = s.coeffs[i] * (i % 2 == 0 ? scale : -scale);
    detail::dft(in, out, FFTW_BACKWARD);

    Field f(g);
    for (std::size_t i = 0; i < n; ++i)
        f.values[i] = out[i].real();
    return f;
}

/// Multiply by (i xi)^order.  Odd orders drop the Nyquist slot so real fields stay real.
inline Spectrum differentiate(Spectrum s, int order, int max_order = kDefaultMaxDerivativeOrder)
{
    if (order < 0)
        throw ConfigError("derivative order must be nonnegative");
    if (order > max_order)
        throw ConfigError("derivative order " + std::to_string(order) + " exceeds the configured maximum "
                          + std::to_string(max_order) + "; higher orders are dominated by amplified roundoff");
    if (order == 0)
        return s;
    const Grid& g = s.grid;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::complex<double> ik(0.0, g.wavenumber(i));
        std::complex<double> factor(1.0, 0.0);
        for (int p = 0; p < order; ++p)
            factor *= ik;
        s.coeffs[i] *= factor;
    }
    if (order % 2 == 1)
        s.coeffs[g.nyquist_slot()] = 0.0;
    return s;
}

inline Field derivative(const Field& f, int order, int max_order = kDefaultMaxDerivativeOrder)
{
    if (order == 0)
        return f;
    return to_field(differentiate(to_spectrum(f), order, max_order));
}

/// Fourier multiplier 1/(1 + xi^2).
inline Spectrum apply_helmholtz_inverse(Spectrum s)
{
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double k = s.grid.wavenumber(i);
        s.coeffs[i] /= (1.0 + k * k);
    }
    return s;
}

/// (1 - d_xx)^{-1} f, i.e. convolution with e^{-|x|}/2.
inline Field helmholtz_inverse(const Field& f) { return to_field(apply_helmholtz_inverse(to_spectrum(f))); }

/// Zero every mode with |j| > fraction * N/2.  Idempotent; fraction = 1 is the identity.
inline Spectrum dealias(Spectrum s, double fraction = kTwoThirds)
{
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("dealias fraction must lie in (0, 1]");
    const double cutoff = fraction * static_cast<double>(s.grid.size() / 2);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (static_cast<double>(std::abs(s.grid.mode(i))) > cutoff)
            s.coeffs[i] = 0.0;
    return s;
}

/// exp(-alpha (|j|/(N/2))^order), applied multiplicatively.
inline Spectrum exponential_filter(Spectrum s, double alpha = 36.0, int order = 36)
{
    const double half = static_cast<double>(s.grid.size() / 2);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = static_cast<double>(std::abs(s.grid.mode(i))) / half;
        s.coeffs[i] *= std::exp(-alpha * std::pow(r, order));
    }
    return s;
}

/// Evaluate the trigonometric interpolant of a real field's spectrum at arbitrary points.
///
/// The Nyquist coefficient is split symmetrically between +-N/2, so the
/// interpolant is real everywhere and reproduces the samples at the nodes.
inline std::vector<double> evaluate_series(const Spectrum& s, std::span<const double> points)
{
    const Grid& g = s.grid;
    const std::size_t half = g.size() / 2;
    const double scale = std::sqrt(2.0 * std::numbers::pi) / g.period();
    const double base = std::numbers::pi / g.half_length();
    const std::complex<double> nyq = s.coeffs[g.nyquist_slot()];

    std::vector<double> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double x = g.wrap(points[p]);
        const std::complex<double> z = std::polar(1.0, base * x);
        // Horner on sum_{j=1}^{N/2-1} c_j z^j; negative modes are the conjugates.
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t j = half - 1; j >= 1; --j)
            acc = (acc + s.coeffs[j]) * z;
        double value = s.coeffs[0].real() + 2.0 * acc.real();
        value += nyq.real() * std::cos(base * static_cast<double>(half) * x);
        out[p] = scale * value;
    }
    return out;
}

inline std::vector<double> fourier_interpolate(const Field& f, std::span<const double> points)
{
    return evaluate_series(to_spectrum(f), points);
}

/// Result of the direct Green's-function convolution.
struct ConvolutionResult {
    Field value;
    bool edge_warning = false; ///< input did not decay to 1e-10 (relative) at the box edges
};

/// Direct quadrature of (e^{-|x|}/2) * f on the grid.
///
/// Trapezoid sum over the nodes with the Euler-Maclaurin corrections for the
/// derivative jump of the kernel at y = x:
///   I = T - dx^2/12 f(x) + dx^4/720 (f(x) + 3 f''(x)),
/// f'' by centered differences.  Independent of the FFT path.
inline ConvolutionResult convolution_oracle(const Field& f)
{
    const Grid& g = f.grid;
    const std::size_t n = g.size();
    const double dx = g.dx();

    ConvolutionResult res{Field(g), false};
    const double peak = max_abs(f);
    if (peak > 0.0) {
        const double edge = std::max(std::abs(f.values.front()), std::abs(f.values.back()));
        res.edge_warning = edge > 1e-10 * peak;
    }

    std::vector<double> kernel(n);
    for (std::size_t d = 0; d < n; ++d)
        kernel[d] = 0.5 * std::exp(-static_cast<double>(d) * dx);

    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t d = i > k ? i - k : k - i;
            sum += kernel[d] * f.values[k];
        }
        const double fi = f.values[i];
        const double fm = f.values[(i + n - 1) % n];
        const double fp = f.values[(i + 1) % n];
        const double fxx = (fp - 2.0 * fi + fm) / (dx * dx);
        res.value.values[i] = dx * sum - dx * dx / 12.0 * fi + std::pow(dx, 4) / 720.0 * (fi + 3.0 * fxx);
    }
    return res;
}

} // namespace zeq
