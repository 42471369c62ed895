#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeq {

/// Raised for malformed grids, mismatched sizes and out-of-range parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Filesystem failure; the CLI maps it to exit status 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform periodic grid on [-L, L) with N (even) points.
///
/// Nodes are x_i = -L + i*dx and the resolved wavenumbers are
/// xi_j = pi*j/L for j = -N/2 ... N/2-1.  Spectral arrays are stored in
/// FFT order: index i holds mode j = i for i < N/2 and j = i - N otherwise.
class Grid {
public:
    Grid() = default;

    Grid(double half_length, std::size_t n_points)
        : half_length_(half_length), n_(n_points)
    {
        if (!(half_length > 0.0) || !std::isfinite(half_length))
            throw ConfigError("grid half-length L must be positive and finite");
        if (n_points < 16 || n_points % 2 != 0)
            throw ConfigError("grid size N must be even and >= 16 (got " + std::to_string(n_points) + ")");
    }

    double half_length() const { return half_length_; }
    std::size_t size() const { return n_; }
    double dx() const { return 2.0 * half_length_ / static_cast<double>(n_); }
    double period() const { return 2.0 * half_length_; }

    double node(std::size_t i) const { return -half_length_ + static_cast<double>(i) * dx(); }

    std::vector<double> nodes() const
    {
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i)
            x[i] = node(i);
        return x;
    }

    /// Signed mode number of spectral slot i.
    long mode(std::size_t i) const
    {
        const auto half = static_cast<long>(n_ / 2);
        const auto j = static_cast<long>(i);
        return j < half ? j : j - static_cast<long>(n_);
    }

    /// Spectral slot of signed mode j (|j| <= N/2).
    std::size_t slot(long j) const
    {
        return j >= 0 ? static_cast<std::size_t>(j) : static_cast<std::size_t>(j + static_cast<long>(n_));
    }

    double wavenumber(std::size_t i) const { return std::numbers::pi * static_cast<double>(mode(i)) / half_length_; }
    double dxi() const { return std::numbers::pi / half_length_; }
    std::size_t nyquist_slot() const { return n_ / 2; }

    /// Reduce x modulo the period into [-L, L).
    double wrap(double x) const
    {
        const double p = period();
        double r = std::fmod(x + half_length_, p);
        if (r < 0.0)
            r += p;
        if (r >= p)
            r = 0.0;
        return r - half_length_;
    }

    bool operator==(const Grid&) const = default;

private:
    double half_length_ = 1.0;
    std::size_t n_ = 16;
};

/// Real function sampled on a Grid: values[i] = f(x_i).
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;

    explicit Field(const Grid& g) : grid(g), values(g.size(), 0.0) {}

    Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v))
    {
        if (values.size() != grid.size())
            throw ConfigError("field has " + std::to_string(values.size()) + " values but grid has "
                              + std::to_string(grid.size()) + " points");
    }

    template <class F>
    static Field sample(const Grid& g, F&& f)
    {
        Field out(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            out.values[i] = f(g.node(i));
        return out;
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    bool all_finite() const
    {
        for (double v : values)
            if (!std::isfinite(v))
                return false;
        return true;
    }

    Field& operator+=(const Field& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] += o.values[i];
        return *this;
    }

    Field& operator-=(const Field& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] -= o.values[i];
        return *this;
    }

    Field& operator*=(double a)
    {
        for (double& v : values)
            v *= a;
        return *this;
    }

    void check_same(const Field& o) const
    {
        if (!(grid == o.grid))
            throw ConfigError("fields live on different grids");
    }
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(double s, Field a) { return a *= s; }
inline Field operator*(Field a, double s) { return a *= s; }

/// Fourier coefficients under fhat(xi) = (1/sqrt(2 pi)) \int e^{-i x xi} f(x) dx,
/// sampled at the grid wavenumbers (FFT slot order).
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> coeffs;

    Spectrum() = default;
    explicit Spectrum(const Grid& g) : grid(g), coeffs(g.size()) {}

    std::size_t size() const { return coeffs.size(); }
    std::complex<double> operator[](std::size_t i) const { return coeffs[i]; }
    std::complex<double>& operator[](std::size_t i) { return coeffs[i]; }

    /// Coefficient of signed mode j.
    std::complex<double> at_mode(long j) const { return coeffs[grid.slot(j)]; }

    Spectrum& operator+=(const Spectrum& o)
    {
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            coeffs[i] += o.coeffs[i];
        return *this;
    }

    Spectrum& operator*=(double a)
    {
        for (auto& c : coeffs)
            c *= a;
        return *this;
    }
};

inline double max_abs(const Field& f)
{
    double m = 0.0;
    for (double v : f.values)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace zeq
