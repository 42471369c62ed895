#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <zeq/dynamics.hpp>
#include <zeq/initial_data.hpp>

#include "test_support.hpp"

using namespace zeq;
using zeq::testing::max_abs_diff;
using zeq::testing::random_band_limited;

namespace {

Field gaussian_momentum_u(const Grid& g, double amp = 1.0)
{
    return make_initial_data({Family::gaussian_momentum, amp, 1.0, 0.0, 1, 1, ""}, g);
}

// u_t = (1 - d_xx)^{-1}(-u^k m_x), computed without the flux splitting.
Field direct_rate(const Field& u, int k)
{
    const Field mx = derivative(momentum(u), 1);
    Field r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i)
        r.values[i] = -std::pow(u[i], k) * mx[i];
    return helmholtz_inverse(r);
}

TEST(Rhs, MatchesNonConservativeForm)
{
    std::mt19937_64 rng(101);
    const Grid g(4.0, 128);
    for (int k : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            // band-limited so that every product fits inside the dealiasing band
            const Field u = 0.3 * random_band_limited(g, rng, 10);
            const Field fast = rhs(u, {k});
            const Field slow = direct_rate(u, k);
            EXPECT_LE(max_abs_diff(fast, slow), 1e-10 * std::max(1.0, max_abs(slow))) << "k=" << k;
        }
    }
}

TEST(Rhs, ZeroIsFixedPoint)
{
    const Grid g(4.0, 64);
    for (int k : {1, 2, 5})
        EXPECT_EQ(max_abs(rhs(Field(g), {k})), 0.0);
}

TEST(Rhs, MeanRateVanishesForK1)
{
    std::mt19937_64 rng(103);
    const Grid g(4.0, 128);
    for (int trial = 0; trial < 10; ++trial) {
        const Spectrum F = to_spectrum(rhs(random_band_limited(g, rng, 30), {1}));
        EXPECT_LE(std::abs(F.at_mode(0)), 1e-13);
    }
}

TEST(Rhs, InvalidExponent)
{
    const Grid g(4.0, 64);
    EXPECT_THROW(rhs(Field(g), {0}), ConfigError);
}

TEST(Rhs, ConstantsAreSteady)
{
    const Grid g(4.0, 64);
    for (int k : {1, 2, 3, 4})
        for (double c : {-1.3, 0.5, 2.0}) {
            const Field u = Field::sample(g, [&](double) { return c; });
            EXPECT_EQ(max_abs(rhs(u, {k})), 0.0) << "k=" << k << " c=" << c;
        }
}

// k = 1 written out by hand: -u u_x - 3/2 d_x (1 - d_xx)^{-1} u_x^2.
TEST(Rhs, K1ReducedForm)
{
    std::mt19937_64 rng(127);
    const Grid g(4.0, 128);
    for (int trial = 0; trial < 5; ++trial) {
        const Field u = 0.5 * random_band_limited(g, rng, 12);
        const Field ux = derivative(u, 1);
        Field uux(g), ux2(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            uux.values[i] = u[i] * ux[i];
            ux2.values[i] = ux[i] * ux[i];
        }
        const Field expect = -1.0 * uux - 1.5 * derivative(helmholtz_inverse(ux2), 1);
        EXPECT_LE(max_abs_diff(rhs(u, {1}), expect), 1e-12 * std::max(1.0, max_abs(expect)));
    }
}

// k = 2 against the Green's-function quadrature of -u^2 m_x.
TEST(Rhs, K2GaussianAgainstConvolutionOracle)
{
    const Grid g(20.0, 512);
    const Field u = zeq::testing::gaussian(g);
    const Field mx = derivative(momentum(u), 1);
    Field local(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        local.values[i] = -u[i] * u[i] * mx[i];
    const auto oracle = convolution_oracle(local);
    ASSERT_FALSE(oracle.edge_warning);
    EXPECT_LE(max_abs_diff(rhs(u, {2}), oracle.value), 1e-5);
}

TEST(Momentum, CosineEigenfunction)
{
    const Grid g(std::numbers::pi, 64);
    const Field u = Field::sample(g, [](double x) { return std::cos(x); });
    EXPECT_LE(max_abs_diff(momentum(u), 2.0 * u), 1e-12); // roundoff times xi_max^2
    EXPECT_EQ(max_abs(momentum(Field(g))), 0.0);
}

TEST(Integrate, ZeroDataStaysZero)
{
    const Grid g(10.0, 64);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    bool all_zero = true;
    integrate({0.0, Field(g)}, cfg, {2}, [&](const State& s) { all_zero = all_zero && max_abs(s.u) == 0.0; });
    EXPECT_TRUE(all_zero);
}

TEST(Momentum, VelocityRoundTrip)
{
    std::mt19937_64 rng(107);
    const Grid g(5.0, 128);
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = random_band_limited(g, rng, 30);
        EXPECT_LE(max_abs_diff(velocity_from_momentum(momentum(u)), u), 1e-11 * std::max(1.0, max_abs(u)));
    }
}

TEST(SolverConfig, Validation)
{
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.t_end = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.dealias_fraction = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.snapshot_stride = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Integrate, StepCountAndObserverSchedule)
{
    const Grid g(20.0, 128);
    SolverConfig cfg;
    cfg.dt = 0.03;
    cfg.t_end = 0.1;
    cfg.snapshot_stride = 2;
    EXPECT_EQ(step_count(cfg), 4u);
    std::vector<double> seen;
    const auto out = integrate({0.0, gaussian_momentum_u(g)}, cfg, {1}, [&](const State& s) { seen.push_back(s.t); });
    EXPECT_EQ(out.status, RunStatus::completed);
    EXPECT_EQ(out.steps, 4u);
    ASSERT_EQ(seen.size(), 3u);
    EXPECT_EQ(seen[0], 0.0);
    EXPECT_DOUBLE_EQ(seen[1], 0.06);
    EXPECT_EQ(seen[2], 0.1);
    EXPECT_EQ(out.final_state.t, 0.1);
}

TEST(Integrate, ZeroHorizonObservesOnlyInitialState)
{
    const Grid g(20.0, 64);
    SolverConfig cfg;
    cfg.t_end = 0.0;
    int calls = 0;
    const Field u0 = gaussian_momentum_u(g);
    const auto out = integrate({0.0, u0}, cfg, {1}, [&](const State&) { ++calls; });
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(out.steps, 0u);
    EXPECT_EQ(out.final_state.u.values, u0.values);
}

TEST(Integrate, RejectsNonFiniteInitialData)
{
    const Grid g(20.0, 64);
    Field u = gaussian_momentum_u(g);
    u.values[3] = std::nan("");
    EXPECT_THROW(integrate({0.0, u}, SolverConfig{}, {1}), ConfigError);
}

TEST(Integrate, UnstableStepIsReportedAsDiverged)
{
    const Grid g(20.0, 256);
    SolverConfig cfg;
    cfg.dt = 2.0;
    cfg.t_end = 400.0;
    const auto out = integrate({0.0, gaussian_momentum_u(g, 20.0)}, cfg, {1});
    EXPECT_EQ(out.status, RunStatus::diverged);
    EXPECT_FALSE(out.message.empty());
    EXPECT_TRUE(out.final_state.u.all_finite());
}

Field run(const Field& u0, double dt, double t_end, int k = 1)
{
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return integrate({0.0, u0}, cfg, {k}).final_state.u;
}

TEST(Integrate, FourthOrderInTime)
{
    const Grid g(20.0, 256);
    for (int k : {1, 2}) {
        const Field u0 = gaussian_momentum_u(g);
        const Field ref = run(u0, 0.005, 1.0, k);
        const double e1 = max_abs_diff(run(u0, 0.04, 1.0, k), ref);
        const double e2 = max_abs_diff(run(u0, 0.02, 1.0, k), ref);
        const double order = std::log2(e1 / e2);
        EXPECT_NEAR(order, 4.0, 0.3) << "k=" << k << " e1=" << e1 << " e2=" << e2;
    }
}

// Errors against an N = 1024 reference shrink geometrically with N.
TEST(Integrate, SpectrallyConvergentInSpace)
{
    const Grid fine(20.0, 1024);
    const Field ref = run(gaussian_momentum_u(fine), 0.01, 1.0);
    std::vector<double> errs;
    for (std::size_t n : {128u, 256u, 512u}) {
        const Grid g(20.0, n);
        const Field a = run(gaussian_momentum_u(g), 0.01, 1.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(a[i] - ref[(1024 / n) * i]));
        errs.push_back(worst);
    }
    EXPECT_LT(errs[1], 1e-2 * errs[0]);
    EXPECT_LT(errs[2], 1e-2 * errs[1]);
    EXPECT_LE(errs[2], 1e-12);
}

// Shifting the data by whole grid cells commutes with the solver.
TEST(Integrate, TranslationEquivariance)
{
    std::mt19937_64 rng(109);
    const Grid g(10.0, 128);
    for (int trial = 0; trial < 3; ++trial) {
        const Field u0 = 0.2 * random_band_limited(g, rng, 8);
        const std::size_t shift = std::uniform_int_distribution<std::size_t>(1, 127)(rng);
        Field shifted(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            shifted.values[(i + shift) % g.size()] = u0[i];
        const Field a = run(u0, 0.01, 0.2);
        const Field b = run(shifted, 0.01, 0.2);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            worst = std::max(worst, std::abs(b[(i + shift) % g.size()] - a[i]));
        EXPECT_LE(worst, 1e-12);
    }
}

// A step forward followed by a step back returns to the start up to O(dt^5).
TEST(Rk4, ForwardBackwardConsistency)
{
    std::mt19937_64 rng(113);
    const Grid g(10.0, 128);
    for (int trial = 0; trial < 5; ++trial) {
        const Field u0 = 0.2 * random_band_limited(g, rng, 8);
        const State fwd = rk4_step({0.0, u0}, 1e-2, {1});
        const State back = rk4_step(fwd, -1e-2, {1});
        EXPECT_LE(max_abs_diff(back.u, u0), 1e-9);
        EXPECT_NEAR(back.t, 0.0, 1e-15);
    }
}

// The forward/backward defect is at most a local error, O(dt^5).  The h^5 terms of
// the two steps cancel in practice and the observed order is close to 6.
TEST(Rk4, ForwardBackwardDefectIsFifthOrder)
{
    const Grid g(20.0, 256);
    const Field u0 = gaussian_momentum_u(g);
    const auto defect = [&](double dt) {
        const State fwd = rk4_step({0.0, u0}, dt, {1});
        return max_abs_diff(rk4_step(fwd, -dt, {1}).u, u0);
    };
    const double order = std::log2(defect(0.1) / defect(0.05));
    EXPECT_GE(order, 4.5);
}

TEST(Cfl, AdvisoryStep)
{
    const Grid g(20.0, 256);
    const Field u = Field::sample(g, [](double) { return 3.0; });
    EXPECT_DOUBLE_EQ(cfl_dt(u, {2}), 0.5 * g.dx() / 9.0);
    EXPECT_DOUBLE_EQ(cfl_dt(Field(g), {1}), 0.5 * g.dx());
    const Field two = Field::sample(g, [](double) { return 2.0; });
    EXPECT_DOUBLE_EQ(cfl_dt(two, {2}), 0.5 * g.dx() / 4.0);
    double prev = cfl_dt(Field(g), {3});
    for (double a : {0.5, 1.0, 1.5, 3.0, 10.0}) {
        const double cur = cfl_dt(a * zeq::testing::gaussian(g), {3});
        EXPECT_LE(cur, prev);
        prev = cur;
    }
}

} // namespace
