#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <zeq/initial_data.hpp>
#include <zeq/theorems.hpp>

#include "test_support.hpp"

using namespace zeq;

namespace {

constexpr double pi = std::numbers::pi;

Field make(Family f, const Grid& g, double amp = 1.0, double width = 1.0, int sign = 1)
{
    return make_initial_data({f, amp, width, 0.0, sign, 1, ""}, g);
}

DiagnosticsSeries run(const Field& u0, int k, double dt, double t_end, int stride = 1, bool keep = false)
{
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_stride = stride;
    DiagnosticsOptions opt;
    opt.keep_snapshots = keep;
    return simulate_series(u0, cfg, {k}, opt);
}

// ---------------------------------------------------------------------------
// diagnostics plumbing

TEST(DifferentiateSeries, ExactOnQuadraticsWithUnevenSpacing)
{
    const std::vector<double> t{0.0, 0.1, 0.25, 0.3, 0.6};
    std::vector<double> y;
    for (double x : t)
        y.push_back(3 * x * x - 2 * x + 1);
    const auto d = differentiate_series(t, y);
    for (std::size_t i = 0; i < t.size(); ++i)
        EXPECT_NEAR(d[i], 6 * t[i] - 2, 1e-12);
    EXPECT_EQ(differentiate_series({0.0, 1.0}, {1.0, 2.0}), (std::vector<double>{0.0, 0.0}));
}

// For e^{-x^2}, int (d^j u)^2 = c (1, 1, 3, 15) with c = sqrt(pi/2).
TEST(Measure, GaussianClosedForms)
{
    const Grid g(20.0, 512);
    const Field u = zeq::testing::gaussian(g);
    const auto r = measure({0.0, u}, {}, 1e-10);
    const double c = std::sqrt(pi / 2);
    EXPECT_NEAR(r.i_functional, 11.5 * c, 1e-10);
    EXPECT_NEAR(r.mean_u, std::sqrt(pi), 1e-12);
    EXPECT_NEAR(r.l1_u, std::sqrt(pi), 1e-12);
    EXPECT_NEAR(r.di_dt_integral, 0.0, 1e-12); // odd integrand
    EXPECT_NEAR(r.max_neg_ux, std::sqrt(2.0) * std::exp(-0.5), 1e-3);
    EXPECT_NEAR(r.support_lo, -r.support_hi, 1e-12);
    EXPECT_TRUE(r.radius_infinite);
}

TEST(Measure, ZeroField)
{
    const Grid g(5.0, 64);
    const auto r = measure({0.0, Field(g)}, {}, 0.0);
    EXPECT_TRUE(r.support_empty);
    EXPECT_EQ(r.h3, 0.0);
    EXPECT_EQ(r.i_functional, 0.0);
    EXPECT_EQ(r.edge_ratio, 0.0);
}

TEST(SimulateSeries, RecordsOnStrideAndFinalTime)
{
    const Grid g(20.0, 128);
    const auto s = run(make(Family::gaussian_momentum, g), 1, 0.01, 0.105, 5);
    ASSERT_EQ(s.records.size(), 4u);
    EXPECT_EQ(s.records[0].t, 0.0);
    EXPECT_NEAR(s.records[1].t, 0.05, 1e-15);
    EXPECT_NEAR(s.records[2].t, 0.10, 1e-15);
    EXPECT_EQ(s.records[3].t, 0.105);
    for (std::size_t i = 1; i < s.records.size(); ++i)
        EXPECT_GT(s.records[i].t, s.records[i - 1].t);
}

TEST(SimulateSeries, KeepSnapshotsStoresEveryStep)
{
    const Grid g(20.0, 64);
    const auto s = run(make(Family::gaussian_momentum, g), 1, 0.01, 0.05, 2, true);
    EXPECT_EQ(s.snapshots.size(), 6u);
    EXPECT_EQ(s.records.size(), 4u);
}

TEST(SimulateSeries, BitwiseDeterministic)
{
    const Grid g(20.0, 128);
    const Field u0 = make(Family::gaussian_momentum, g);
    const auto a = run(u0, 2, 0.01, 0.2, 3);
    const auto b = run(u0, 2, 0.01, 0.2, 3);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].h3, b.records[i].h3);
        EXPECT_EQ(a.records[i].i_functional, b.records[i].i_functional);
        EXPECT_EQ(a.records[i].radius_fit, b.records[i].radius_fit);
    }
}

// ---------------------------------------------------------------------------
// conservation and sign

TEST(MeanConservation, ZeroDataPasses)
{
    const Grid g(20.0, 64);
    const auto r = check_mean_conservation(run(Field(g), 1, 0.01, 0.1));
    EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(MeanConservation, GaussianMomentumDrift)
{
    const Grid g(20.0, 256);
    const auto s = run(make(Family::gaussian_momentum, g), 1, 0.005, 0.5, 10);
    const auto r = check_mean_conservation(s);
    EXPECT_EQ(r.verdict, Verdict::pass) << r.measured;
    EXPECT_LE(r.measured, 1e-7);
}

// Odd data: the integral is zero, so the drift is measured absolutely.
TEST(MeanConservation, OddDataAbsoluteDrift)
{
    const Grid g(20.0, 256);
    const Field u0 = Field::sample(g, [](double x) { return 0.3 * x * std::exp(-x * x); });
    const auto r = check_mean_conservation(run(u0, 1, 0.01, 0.5, 10));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LE(r.measured, 1e-12);
}

TEST(MeanConservation, InapplicableOutsideHypotheses)
{
    const Grid g(20.0, 128);
    EXPECT_EQ(check_mean_conservation(run(make(Family::gaussian_momentum, g), 2, 0.01, 0.05)).verdict,
              Verdict::inapplicable);
    const Grid small(pi, 32);
    const Field wave = make(Family::single_mode, small, 0.1);
    EXPECT_EQ(check_mean_conservation(run(wave, 1, 0.01, 0.05)).verdict, Verdict::inapplicable);
}

// N = 256 under-resolves m in the tails (min m ~ -1e-6 max m0 for k = 2); 512 is the reference.
TEST(SignInvariance, PositiveGaussianMomentumAllK)
{
    const Grid g(20.0, 512);
    const Field u0 = make(Family::gaussian_momentum, g);
    const Field m0 = momentum(u0);
    for (int k : {1, 2, 3}) {
        const auto r = check_sign_invariance(run(u0, k, 0.01, 1.0, 10), m0);
        EXPECT_EQ(r.verdict, Verdict::pass) << "k=" << k << " measured=" << r.measured;
    }
}

TEST(SignInvariance, NegativeDataMirroredAndNoted)
{
    const Grid g(20.0, 256);
    const Field u0 = make(Family::gaussian_momentum, g, 1.0, 1.0, -1);
    for (int k : {1, 2}) {
        const auto r = check_sign_invariance(run(u0, k, 0.01, 0.5, 10), momentum(u0));
        EXPECT_EQ(r.verdict, Verdict::pass) << "k=" << k;
        EXPECT_EQ(r.notes.find("even k") != std::string::npos, k == 2);
    }
}

TEST(SignInvariance, ZeroAndSignChangingData)
{
    const Grid g(20.0, 64);
    EXPECT_EQ(check_sign_invariance(run(Field(g), 1, 0.01, 0.1), Field(g)).verdict, Verdict::pass);
    const Grid small(pi, 32);
    const Field wave = make(Family::single_mode, small, 0.1);
    EXPECT_EQ(check_sign_invariance(run(wave, 1, 0.01, 0.05), momentum(wave)).verdict, Verdict::inapplicable);
}

// A series whose min m dips below the floor must fail.
TEST(SignInvariance, DetectsViolation)
{
    const Grid g(20.0, 128);
    const Field u0 = make(Family::gaussian_momentum, g);
    auto s = run(u0, 1, 0.01, 0.05);
    s.records.back().min_m = -1e-3;
    EXPECT_EQ(check_sign_invariance(s, momentum(u0)).verdict, Verdict::fail);
}

TEST(L1Conservation, SignedRunAndCoincidenceWithMean)
{
    const Grid g(20.0, 256);
    const auto s = run(make(Family::gaussian_momentum, g), 1, 0.005, 0.5, 10);
    const auto r = check_l1_conservation(s);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (const auto& rec : s.records)
        EXPECT_NEAR(rec.l1_u, rec.mean_u, 1e-9 * rec.l1_u);
    EXPECT_EQ(check_l1_conservation(run(Field(g), 1, 0.01, 0.05)).verdict, Verdict::pass);
}

// ---------------------------------------------------------------------------
// Lemma-level bounds

TEST(SlopeAndH3, GaussianMomentumRun)
{
    const Grid g(20.0, 256);
    const Field u0 = make(Family::gaussian_momentum, g);
    const auto s = run(u0, 1, 0.01, 1.0, 10);
    const Field m0 = momentum(u0);
    const auto slope = check_slope_bound(s, m0);
    const auto h3 = check_h3_growth(s, m0);
    EXPECT_EQ(slope.verdict, Verdict::pass);
    EXPECT_LT(slope.measured, 1.0);
    EXPECT_EQ(h3.verdict, Verdict::pass);
    EXPECT_LE(h3.measured, 1.0 + 1e-6);
    EXPECT_EQ(check_slope_bound(run(Field(g), 1, 0.01, 0.05), Field(g)).verdict, Verdict::pass);
}

TEST(H3Growth, InitialRecordIsEquality)
{
    const Grid g(20.0, 128);
    const Field u0 = make(Family::gaussian_momentum, g);
    const auto s = run(u0, 1, 0.01, 0.0);
    ASSERT_EQ(s.records.size(), 1u);
    const auto r = check_h3_growth(s, momentum(u0));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(r.measured, 1.0);
}

// Narrow momentum approaches a peakon profile: -u_x nears ||m0||_L1 from below.
TEST(SlopeBound, NearPeakonData)
{
    const Grid g(20.0, 2048);
    const Field u0 = make(Family::gaussian_momentum, g, 1.0, 0.1);
    const Field m0 = momentum(u0);
    const auto s = run(u0, 1, 1e-3, 0.2, 20);
    const auto r = check_slope_bound(s, m0);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_GT(r.measured, 0.4);
    EXPECT_LE(r.measured, 1.0 + 1e-6);
}

TEST(IFunctional, TrivialRuns)
{
    const Grid g(5.0, 64);
    const auto zero = check_i_functional_identity(run(Field(g), 1, 0.01, 0.05));
    EXPECT_EQ(zero.verdict, Verdict::pass);
    const Field c = Field::sample(g, [](double) { return 0.7; });
    const auto flat = check_i_functional_identity(run(c, 1, 0.01, 0.05));
    EXPECT_EQ(flat.verdict, Verdict::pass);
    EXPECT_LE(flat.measured, 1e-10);
}

TEST(IFunctional, ResidualShrinksFourfoldWithDt)
{
    const Grid g(20.0, 256);
    const Field u0 = make(Family::gaussian_momentum, g);
    const auto a = check_i_functional_identity(run(u0, 1, 2e-3, 0.5, 10));
    const auto b = check_i_functional_identity(run(u0, 1, 1e-3, 0.5, 10));
    EXPECT_EQ(a.verdict, Verdict::pass) << a.measured;
    EXPECT_EQ(b.verdict, Verdict::pass) << b.measured;
    EXPECT_NEAR(std::log2(a.measured / b.measured), 2.0, 0.2);
}

TEST(EnergyEstimate, FiniteEmpiricalConstant)
{
    const Grid g(20.0, 128);
    const auto r = check_energy_estimate(run(make(Family::gaussian_momentum, g), 1, 0.01, 0.3, 5));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_GT(r.measured, 0.0);
    EXPECT_TRUE(std::isfinite(r.measured));
}

// ---------------------------------------------------------------------------
// support spreading

TEST(SupportSpreading, BumpSpreadsAfterOneStep)
{
    const Grid g(10.0, 1024);
    const Field u0 = make(Family::smooth_bump, g);
    const auto r = check_support_spreading(run(u0, 1, 1e-3, 0.02, 1));
    EXPECT_EQ(r.verdict, Verdict::pass) << r.notes;
    EXPECT_GT(r.measured, 0.0);
}

TEST(SupportSpreading, FrozenControlFails)
{
    const Grid g(10.0, 1024);
    const Field u0 = make(Family::smooth_bump, g);
    auto s = run(u0, 1, 1e-3, 0.0);
    auto rec = s.records.front();
    for (int i = 1; i <= 3; ++i) {
        rec.t = i * 1e-3;
        s.records.push_back(rec);
    }
    const auto r = check_support_spreading(s);
    EXPECT_EQ(r.verdict, Verdict::fail);
    EXPECT_EQ(r.measured, 0.0);
}

TEST(SupportSpreading, InapplicableCases)
{
    const Grid g(10.0, 256);
    EXPECT_EQ(check_support_spreading(run(Field(g), 1, 1e-3, 0.002)).verdict, Verdict::inapplicable);
    const Field wide = make(Family::gaussian_momentum, g);
    EXPECT_EQ(check_support_spreading(run(wide, 1, 1e-3, 0.002)).verdict, Verdict::inapplicable);
}

// ---------------------------------------------------------------------------
// transport, and its consistency with the sign check

TEST(Transport, GaussianRunPasses)
{
    const Grid g(20.0, 256);
    const auto s = run(make(Family::gaussian_momentum, g), 1, 0.01, 0.5, 10, true);
    const auto r = check_transport(s);
    EXPECT_EQ(r.verdict, Verdict::pass) << r.measured;
    EXPECT_EQ(check_transport(run(make(Family::gaussian_momentum, g), 1, 0.01, 0.1)).verdict,
              Verdict::inapplicable);
}

TEST(Transport, ConsistentWithSignInvariance)
{
    std::mt19937_64 rng(307);
    std::uniform_real_distribution<double> amp(0.2, 1.5), pos(-3.0, 3.0), wid(0.5, 1.5);
    const Grid g(20.0, 512);
    for (int trial = 0; trial < 4; ++trial) {
        Field m0(g);
        for (int bump = 0; bump < 3; ++bump) {
            const double a = amp(rng), c = pos(rng), w = wid(rng);
            m0 += Field::sample(g, [&](double x) { return a * std::exp(-(x - c) * (x - c) / (w * w)); });
        }
        const auto s = run(velocity_from_momentum(m0), 1, 0.01, 0.3, 5, true);
        const auto tr = check_transport(s);
        if (tr.measured <= tolerance::transport) {
            EXPECT_EQ(check_sign_invariance(s, m0).verdict, Verdict::pass);
        }
    }
}

// ---------------------------------------------------------------------------
// lifespan

TEST(Lifespan, ExactConstants)
{
    EXPECT_EQ(lifespan_constant_exact(1), (Rational{1, 144}));
    EXPECT_EQ(lifespan_constant_exact(2), (Rational{1, 1144}));
    // bracket 1/4 + 9/2 + 3 = 31/4, power 2^10 + 8 = 1032
    EXPECT_EQ(lifespan_constant_exact(3), (Rational{1, 7998}));
    EXPECT_DOUBLE_EQ(lifespan_constant(1, 2.0), 1.0 / 288.0);
    EXPECT_THROW(lifespan_constant_exact(0), ConfigError);
}

TEST(Lifespan, CalculatorExample)
{
    EXPECT_NEAR(lifespan_bound_from_norm(1.0, 1, 1.0, 0.5), 0.5 / 144, 1e-18);
}

TEST(Lifespan, HomogeneityInNorm)
{
    const Grid g(20.0, 256);
    const Field u0 = make(Family::gaussian_u, g, 0.5);
    for (int k : {1, 2, 3}) {
        const double a = lifespan_bound(u0, k, 3, 0.8, 0.4);
        const double b = lifespan_bound(2.0 * u0, k, 3, 0.8, 0.4);
        EXPECT_NEAR(b / a, std::pow(2.0, -k), 1e-13);
    }
}

TEST(Lifespan, RejectsBadStrips)
{
    const Grid g(20.0, 64);
    const Field u0 = make(Family::gaussian_u, g);
    EXPECT_THROW(lifespan_bound(u0, 1, 3, 0.5, 0.5), ConfigError);
    EXPECT_THROW(lifespan_bound(u0, 1, 3, 0.5, 0.7), ConfigError);
    EXPECT_THROW(lifespan_bound(u0, 1, 2, 0.5, 0.2), ConfigError);
    EXPECT_EQ(lifespan_bound_from_norm(0.0, 1, 1.0, 0.5), std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------
// radius bound

TEST(RadiusBound, InitialTimeIsStripProxy)
{
    EXPECT_EQ(radius_lower_bound(0.0, -0.5, 3.0, 2.0), std::exp(-0.5));
    EXPECT_THROW(radius_lower_bound(0.1, 0.5, 1.0, 1.0), ConfigError);
    EXPECT_THROW(radius_bound_coefficients(1.0, 0.5), ConfigError);
}

// mu = 1 and ||u0|| = 7/(52 sqrt 2) make L1 = 1: bound = r(0) e e^{-e^{112 t}}.
TEST(RadiusBound, ClosedFormSubstitution)
{
    const double km = 7.0 / (52.0 * std::sqrt(2.0));
    EXPECT_NEAR(radius_bound_coefficients(km, 1.0).L1, 1.0, 1e-15);
    for (double t : {0.0, 0.001, 0.005, 0.01}) {
        const double expect = std::exp(-0.5) * std::exp(1.0) * std::exp(-std::exp(112.0 * t));
        EXPECT_NEAR(radius_lower_bound(t, -0.5, km, 1.0), expect, 1e-14 * expect);
    }
}

TEST(RadiusBound, PoissonRunClearsBoundByThreeDecades)
{
    const Grid g(20.0, 512);
    const Field u0 = make(Family::poisson_kernel, g, 1.0, 1.5);
    const auto s = run(u0, 1, 1e-3, 0.05, 10);
    const auto r = check_radius_bound(s, -0.5);
    EXPECT_EQ(r.verdict, Verdict::pass);
    // At t = 0 the bound is e^{sigma0} itself, so the margin there is only a e^{-sigma0}.
    EXPECT_NEAR(r.measured, std::log10(1.5 / std::exp(-0.5)), 0.01);
    double after = 0.0;
    for (const auto& [name, value] : r.parameters)
        if (name == "min_log10_ratio_t_pos")
            after = value;
    EXPECT_GE(after, 3.0);
    EXPECT_EQ(check_radius_bound(run(u0, 2, 1e-3, 0.01, 5), -0.5).verdict, Verdict::inapplicable);
}

} // namespace
