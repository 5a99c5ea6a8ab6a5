#include "unwind/inflow_sim.hpp"
#include "unwind/metrics.hpp"
#include "unwind/policy.hpp"
#include "unwind/riccati.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace unwind;

namespace {

InflowParams inflow_with(double theta, double sigma, double z0 = 0.1) {
    InflowParams in;
    in.theta = Curve{theta};
    in.sigma = Curve{sigma};
    in.z0 = z0;
    return in;
}

PolicyCoefficients policy_for(const MarketCurves& m, const InflowParams& in, std::size_t n = 2000) {
    return feedback_coefficients(solve_riccati(m, in, n), m);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    const double mu = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

TEST(Inflow, ConstantWithoutNoiseOrDrift) {
    PathRng rng{1, 0};
    for (auto kind : {DriverSpec::Kind::brownian, DriverSpec::Kind::gaussian_shocks}) {
        auto in = inflow_with(0.0, 0.0);
        in.driver.kind = kind;
        const auto p = simulate_inflow(in, TimeGrid{1.0, 100}, rng);
        for (double z : p.Z) {
            ASSERT_EQ(z, 0.1);
        }
        EXPECT_EQ(p.tv, 0.1);
    }
}

TEST(Inflow, DeterministicDecay) {
    PathRng rng{1, 0};
    for (auto kind : {DriverSpec::Kind::brownian, DriverSpec::Kind::gaussian_shocks}) {
        auto in = inflow_with(1.0, 0.0);
        in.driver.kind = kind;
        const TimeGrid g{1.0, 200};
        const auto p = simulate_inflow(in, g, rng);
        for (std::size_t k = 0; k < g.size(); ++k) {
            ASSERT_NEAR(p.Z[k], 0.1 * std::exp(-g.at(k)), 1e-15);
        }
        EXPECT_NEAR(p.tv, 0.1 + 0.1 * (1.0 - std::exp(-1.0)), 1e-15);
    }
}

TEST(Inflow, ShockTotalVariationHalfNormalOracle) {
    const auto in = inflow_with(0.0, 0.1);
    const InflowGenerator gen{in, TimeGrid{1.0, 200}};
    std::vector<double> tv;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        PathRng rng{11, i};
        tv.push_back(gen.generate(rng).tv);
    }
    const double oracle = 0.1 + 20.0 * std::sqrt(0.01 / 20.0) * std::sqrt(2.0 / M_PI);
    EXPECT_NEAR(oracle, 0.457, 1e-3);
    EXPECT_NEAR(mean(tv), oracle, 4.0 * stderr_of(tv));
}

TEST(Inflow, ShockLedgerAndQuadraticVariation) {
    const auto in = inflow_with(0.5, 0.1);
    PathRng rng{3, 9};
    const auto p = simulate_inflow(in, TimeGrid{1.0, 100}, rng);
    ASSERT_EQ(p.shock_times.size(), 20u);
    double qv = 0.0;
    for (double s : p.shock_sizes) qv += s * s;
    EXPECT_NEAR(p.qv, qv, 1e-15);
    // reconstruct Z_T from the ledger
    double z = 0.1, t = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        z = z * std::exp(-0.5 * (p.shock_times[i] - t)) + p.shock_sizes[i];
        t = p.shock_times[i];
    }
    z *= std::exp(-0.5 * (1.0 - t));
    EXPECT_NEAR(p.Z.back(), z, 1e-14);
}

TEST(Inflow, ShocksIndependentOfGrid) {
    const auto in = inflow_with(-1.0, 0.1);
    PathRng a{5, 2}, b{5, 2};
    const auto pa = simulate_inflow(in, TimeGrid{1.0, 100}, a);
    const auto pb = simulate_inflow(in, TimeGrid{1.0, 3000}, b);
    EXPECT_EQ(pa.shock_sizes, pb.shock_sizes);
    EXPECT_NEAR(pa.Z.back(), pb.Z.back(), 1e-13);
    EXPECT_NEAR(pa.tv, pb.tv, 1e-13);
}

TEST(Inflow, BrownianOuMoments) {
    auto in = inflow_with(1.0, 0.1);
    in.driver.kind = DriverSpec::Kind::brownian;
    const InflowGenerator gen{in, TimeGrid{1.0, 50}};
    std::vector<double> zt;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        PathRng rng{17, i};
        zt.push_back(gen.generate(rng).Z.back());
    }
    const double m = mean(zt);
    double var = 0.0;
    for (double z : zt) var += (z - m) * (z - m);
    var /= static_cast<double>(zt.size() - 1);
    const double var_oracle = 0.01 * (1.0 - std::exp(-2.0)) / 2.0;
    EXPECT_NEAR(m, 0.1 * std::exp(-1.0), 4.0 * std::sqrt(var_oracle / zt.size()));
    // sample variance sd ~ var * sqrt(2/n)
    EXPECT_NEAR(var, var_oracle, 4.0 * var_oracle * std::sqrt(2.0 / zt.size()));
}

TEST(Simulation, ZeroInflowTradesNothing) {
    const auto m = MarketCurves::constant(8.0, 0.2, 0.01);
    const auto in = inflow_with(0.0, 0.0, 0.0);
    const auto pol = policy_for(m, in);
    const Simulator sim{pol, m, in, InitialState{0.0, 0.0}, pol.grid};
    const auto p = sim.run(1, 0, true);
    EXPECT_EQ(p.j0, 0.0);
    EXPECT_EQ(p.jt, 0.0);
    EXPECT_EQ(p.impact_cost, 0.0);
    EXPECT_EQ(p.spread_cost, 0.0);
    for (double q : p.q) ASSERT_EQ(q, 0.0);
}

TEST(Simulation, LiquidationIdentityAndRealizedCosts) {
    const auto m = MarketCurves::constant(8.0, 0.2, 0.01);
    for (double theta : {-1.0, 0.0, 1.0}) {
        const auto in = inflow_with(theta, 0.1);
        const auto pol = policy_for(m, in);
        const Simulator sim{pol, m, in, InitialState::from_inflow(in), pol.grid};
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto p = sim.run(42, i, true);
            const double dt = p.t[1] - p.t[0];
            double qsum = 0.0;
            for (std::size_t k = 0; k + 1 < p.q.size(); ++k) qsum += p.q[k] * dt;
            // J0 + sum q dt + JT = Z_T (pure in-flow start)
            EXPECT_NEAR(p.j0 + qsum + p.jt, p.Z.back(), 1e-14);
            // inventory after the closing block
            EXPECT_NEAR(p.X.back() + p.jt, 0.0, 1e-13);
            const auto c = realized_costs(p, m);
            EXPECT_NEAR(c.impact, p.impact_cost, 1e-15);
            EXPECT_NEAR(c.spread, p.spread_cost, 1e-15);
        }
    }
}

TEST(RealizedCosts, SingleOpeningBlock) {
    const auto m = MarketCurves::constant(8.0, 0.2, 0.01);
    PathResult p;
    p.j0 = 0.05;
    p.t = {0.0, 0.5, 1.0};
    p.Z = {0.05, 0.05, 0.05};
    p.X = {0.0, 0.0, 0.0};
    p.Y = {0.01, 0.0, 0.0};
    p.q = {0.0, 0.0, 0.0};
    const auto c = realized_costs(p, m);
    EXPECT_DOUBLE_EQ(c.impact, 0.1 * 0.05 * 0.05);
    EXPECT_EQ(c.spread, 0.0);
    PathResult empty;
    empty.t = {0.0, 0.5, 1.0};
    empty.Z = empty.X = empty.Y = empty.q = {0.0, 0.0, 0.0};
    EXPECT_EQ(realized_costs(empty, m).impact, 0.0);
}

TEST(Simulation, DeterministicAcrossThreadCounts) {
    const auto m = MarketCurves::constant(8.0, 0.2, 0.01);
    const auto in = inflow_with(-1.0, 0.1);
    const auto pol = policy_for(m, in, 500);
    const Simulator sim{pol, m, in, InitialState::from_inflow(in), pol.grid};
    const auto a = sim.run_batch(300, 99, 1);
    const auto b = sim.run_batch(300, 99, 4);
    const auto c = sim.run_batch(300, 99, 7);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].impact_cost, b[i].impact_cost);
        ASSERT_EQ(a[i].spread_cost, c[i].spread_cost);
        ASSERT_EQ(a[i].tv_inflow, c[i].tv_inflow);
        ASSERT_EQ(a[i].jt, b[i].jt);
    }
    // a single path replays identically on its own
    EXPECT_EQ(sim.run(99, 123).impact_cost, a[123].impact_cost);
}

// Monte Carlo oracle for the expected-cost formula.
class ExpectedCostMc : public ::testing::TestWithParam<std::tuple<double, DriverSpec::Kind>> {};

TEST_P(ExpectedCostMc, MeanRealizedCostWithinThreeStandardErrors) {
    const auto [theta, kind] = GetParam();
    const auto m = MarketCurves::constant(8.0, 0.2, 0.01);
    auto in = inflow_with(theta, 0.1);
    in.driver.kind = kind;
    const auto sol = solve_riccati(m, in, 2000);
    const auto pol = feedback_coefficients(sol, m);
    const auto init = InitialState::from_inflow(in);
    double k0 = sol.K[0];
    if (kind == DriverSpec::Kind::gaussian_shocks) {
        const auto ts = shock_schedule(20, 1.0);
        k0 = k_for_jump_driver(sol, ts, std::vector<double>(20, 0.01 / 20))[0];
    }
    const double expected = expected_cost(sol, pol, m, init, in.z0, &k0);

    const Simulator sim{pol, m, in, init, pol.grid};
    const auto paths = sim.run_batch(100000, 2024);
    std::vector<double> cost;
    cost.reserve(paths.size());
    for (const auto& p : paths) cost.push_back(p.impact_cost + p.spread_cost);
    const double mc = mean(cost);
    const double se = stderr_of(cost);
    EXPECT_NEAR(mc, expected, 3.0 * se) << "mc " << mc << " se " << se << " expected " << expected;
}

INSTANTIATE_TEST_SUITE_P(
    Drivers, ExpectedCostMc,
    ::testing::Values(std::make_tuple(-1.0, DriverSpec::Kind::gaussian_shocks),
                      std::make_tuple(0.0, DriverSpec::Kind::gaussian_shocks),
                      std::make_tuple(1.0, DriverSpec::Kind::gaussian_shocks),
                      std::make_tuple(-1.0, DriverSpec::Kind::brownian)));
