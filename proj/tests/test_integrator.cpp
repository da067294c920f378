#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <kuramoto3/integrator.hpp>
#include <kuramoto3/observe.hpp>

using namespace kuramoto3;

TEST(IntegratorConfig, Validation) {
    IntegratorConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.t_measure = 50.0 * c.dt;
    try {
        c.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "integrator.t_measure");
    }
    c = {};
    c.t_transient = -1.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.record_stride = 0;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Integrate, UncoupledDampingIsExponential) {
    ModelParams p;
    const PhaseState s0{{0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}};
    const Trajectory traj = integrate(s0, p, {0.01, 0.0, 10.0, 1});
    ASSERT_EQ(traj.size(), 1001u);
    EXPECT_NEAR(traj.time(1000), 10.0, 1e-12);
    for (double w : traj.samples.back().omega) EXPECT_NEAR(w, std::exp(-1.0), 1e-8);
    // θ(t) = θ0 + (1 − e^{−εt})/ε
    EXPECT_NEAR(traj.samples.back().theta[1], 1.0 + (1.0 - std::exp(-1.0)) / 0.1, 1e-8);
}

TEST(Integrate, EquilibriumStaysPut) {
    ModelParams p;
    p.mu = 1.5;
    p.gamma = -2.0;
    const Trajectory traj = integrate(PhaseState{}, p, {0.01, 10.0, 10.0, 5});
    for (const PhaseState& s : traj.samples) EXPECT_EQ(s, PhaseState{});
}

TEST(Integrate, SamplingLayout) {
    ModelParams p;
    const Trajectory traj = integrate(PhaseState{}, p, {0.01, 3.0, 2.0, 10});
    EXPECT_NEAR(traj.t0, 3.0, 1e-12);
    EXPECT_NEAR(traj.dt_rec, 0.1, 1e-15);
    EXPECT_EQ(traj.size(), 21u);
    EXPECT_NEAR(traj.t_end(), 5.0, 1e-12);
}

TEST(Integrate, Deterministic) {
    ModelParams p;
    p.mu = -4.5;
    p.gamma = -3.0;
    p.alpha = 0.1;
    const PhaseState s0 = random_initial_state(42);
    const IntegratorConfig cfg{0.01, 50.0, 50.0, 10};
    const Trajectory a = integrate(s0, p, cfg);
    const Trajectory b = integrate(s0, p, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) ASSERT_EQ(a.samples[k], b.samples[k]);
    EXPECT_EQ(settle(s0, p, cfg), a.samples.back());
}

TEST(Integrate, NonFiniteStateIsReported) {
    ModelParams p;
    p.mu = 5.0;
    PhaseState s{{0.0, 1.0, 2.0}, {1e308, -1e308, 1e308}};
    EXPECT_THROW(integrate(s, p, {0.5, 0.0, 50.0, 1}), NonFiniteError);
    try {
        settle(s, p, {0.5, 0.0, 50.0, 1});
    } catch (const NonFiniteError& e) {
        EXPECT_GT(e.time(), 0.0);
    }
}

TEST(Integrate, StepHalvingRatio) {
    ModelParams p;
    p.mu = 0.7;
    p.gamma = -1.2;
    p.alpha = 0.4;
    const PhaseState s0{{0.1, 2.0, -1.0}, {0.3, -0.4, 0.2}};
    auto run = [&](double dt) { return settle(s0, p, {dt, 0.0, 10.0, 1}); };
    const PhaseState a = run(0.04), b = run(0.02), c = run(0.01);
    auto err = [](const PhaseState& x, const PhaseState& y) {
        double d = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            d = std::max({d, std::abs(x.theta[i] - y.theta[i]), std::abs(x.omega[i] - y.omega[i])});
        return d;
    };
    const double ratio = err(a, b) / err(b, c);
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(Integrate, DissipationWithoutCoupling) {
    ModelParams p;
    const PhaseState s0{{0.0, 0.0, 0.0}, {2.0, -1.0, 0.5}};
    const Trajectory traj = integrate(s0, p, {0.01, 0.0, 30.0, 1});
    double prev = 1e300;
    for (const PhaseState& s : traj.samples) {
        const double e = s.omega[0] * s.omega[0] + s.omega[1] * s.omega[1] + s.omega[2] * s.omega[2];
        ASSERT_LE(e, prev);
        prev = e;
    }
}

TEST(Integrate, UnwrappedPhasesTrackVelocity) {
    ModelParams p;
    p.mu = 1.0;
    p.gamma = 3.0;
    p.alpha = 0.5;
    const Trajectory traj = integrate(random_initial_state(7), p, {0.01, 200.0, 50.0, 10});
    for (std::size_t k = 1; k < traj.size(); ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            const double step = traj.samples[k].theta[i] - traj.samples[k - 1].theta[i];
            const double predicted = 0.5 * (traj.samples[k].omega[i] + traj.samples[k - 1].omega[i]) * traj.dt_rec;
            ASSERT_NEAR(step, predicted, 0.05 * std::abs(predicted) + 1e-9);
        }
    }
}

TEST(Settle, SyncRegionConverges) {
    ModelParams p;
    p.mu = 1.0;
    const PhaseState s{{0.1, -0.2, 0.15}, {0.05, -0.05, 0.0}};
    const PhaseState end = settle(s, p, {0.01, 400.0, 100.0, 10});
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LT(std::abs(end.omega[i]), 1e-6);
        EXPECT_LT(std::abs(wrap_angle(end.theta[i] - end.theta[(i + 1) % 3])), 1e-6);
    }
}

TEST(Settle, EquilibriumUnchanged) {
    ModelParams p;
    p.mu = -1.0;
    const PhaseState s = splay_equilibrium(0.25);
    const PhaseState end = settle(s, p, {0.01, 5.0, 5.0, 10});
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(end.theta[i], s.theta[i], 1e-12);
        EXPECT_NEAR(end.omega[i], 0.0, 1e-12);
    }
}

TEST(Settle, SwitchingRegimeStaysBounded) {
    ModelParams p;
    p.mu = -4.5;
    p.gamma = -3.0;
    p.alpha = 0.1;
    const PhaseState end = settle(random_initial_state(3), p, {0.01, 0.0, 5000.0, 10});
    EXPECT_TRUE(end.finite());
    for (double w : end.omega) EXPECT_LT(std::abs(w), 50.0);
}

TEST(Integrate, RepulsiveLargeLagVelocitiesMerge) {
    ModelParams p;
    p.mu = -0.01;
    p.gamma = -0.01;
    p.alpha = 1.6;
    const PhaseState s0 = random_initial_state(99);
    auto spread = [](const PhaseState& s) {
        return std::max(std::abs(s.omega[0] - s.omega[1]), std::abs(s.omega[1] - s.omega[2]));
    };
    const PhaseState mid = settle(s0, p, {0.01, 0.0, 1000.0, 10});
    const PhaseState end = settle(s0, p, {0.01, 0.0, 6000.0, 10});
    EXPECT_LT(spread(end), spread(mid));
    EXPECT_LT(spread(end), 1e-4);
}
