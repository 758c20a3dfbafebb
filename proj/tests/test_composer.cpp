#include <gtest/gtest.h>

#include <cmath>

#include "kdva/composer.hpp"
#include "kdva/verifier.hpp"

using namespace kdva;

namespace {

const NonlinearitySpec quadratic{{{2, 0, 1.0}}, 1};

InitialConditionSpec burst(double amplitude) {
    return {IcKind::Burst, Profile::gaussian(amplitude, 1.0), Profile{}};
}

}  // namespace

TEST(SplitBurst, HalvesTheProfile) {
    const Grid1D zeta(40.0, 512);
    const auto [left, right] = split_initial_burst(burst(2.0), zeta);
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        const double z = zeta.node(i);
        EXPECT_EQ(left.S[i], std::exp(-z * z));
        EXPECT_EQ(right.S[i], left.S[i]);
        EXPECT_EQ(left.S[i] + right.S[i], burst(2.0).u0(z));
    }
    EXPECT_EQ(left.direction, Direction::Left);
    EXPECT_EQ(right.direction, Direction::Right);

    const auto [zl, zr] = split_initial_burst(InitialConditionSpec{IcKind::Burst, Profile{}, Profile{}}, zeta);
    for (std::size_t i = 0; i < zeta.size(); ++i) EXPECT_EQ(zl.S[i] + zr.S[i], 0.0);
}

TEST(Compose, InitialTimeRoundTrip) {
    const PhysParams params{1, 4, 1, 1};
    const Grid1D zeta(40.0, 512);
    const Epsilon eps(0.3);
    const double times[] = {0.0};
    const auto asym = build_burst_asymptotics(burst(1.0), params, quadratic, eps, zeta, times);
    const Grid1D grid(10.0, 1024);
    const auto [u, v] = compose(asym, params, grid.nodes(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(u[i], burst(1.0).u0(grid.node(i) / eps.value()), 1e-8);
    }
}

TEST(Compose, ZeroTrajectoriesGiveZeroFields) {
    const PhysParams params{};
    const double times[] = {0.0, 0.5};
    const auto asym = build_burst_asymptotics({IcKind::Burst, Profile{}, Profile{}}, params, quadratic, Epsilon(0.3),
                                              Grid1D(40.0, 256), times);
    const auto [u, v] = compose(asym, params, Grid1D(20.0, 256).nodes(), 0.5);
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_EQ(u[i], 0.0);
        EXPECT_EQ(v[i], 0.0);
    }
}

TEST(Compose, ManifoldClosureWithUnequalCoupling) {
    const PhysParams params{1, 4, 3, 2};
    const double times[] = {0.2};
    const auto asym = build_burst_asymptotics(burst(0.5), params, quadratic, Epsilon(0.3), Grid1D(40.0, 512), times);
    const Grid1D grid(20.0, 512);
    const auto [u, v] = compose(asym, params, grid.nodes(), 0.2);
    double peak = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_EQ(v[i], 1.5 * u[i]);
        peak = std::max(peak, std::abs(u[i]));
    }
    EXPECT_GT(peak, 0.1);
    const auto fields = compose_fields(asym, params, grid, 0.2);
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_NEAR(params.a * fields.u[i] - params.b * fields.v[i], 0.0, 1e-14);
        EXPECT_NEAR(params.a * fields.p[i] - params.b * fields.q[i], 0.0, 1e-12);
    }
}

TEST(Compose, RatesMatchTimeDifferences) {
    const PhysParams params{};
    const Epsilon eps(0.3);
    const double t = 0.4, h = 1e-4;
    const double times[] = {t - h, t, t + h};
    const auto asym = build_burst_asymptotics(burst(0.5), params, quadratic, eps, Grid1D(40.0, 512), times);
    const Grid1D grid(20.0, 1024);
    const auto fields = compose_fields(asym, params, grid, t);
    const auto before = compose(asym, params, grid.nodes(), t - h).first;
    const auto after = compose(asym, params, grid.nodes(), t + h).first;
    double scale = 0.0;
    for (double p : fields.p) scale = std::max(scale, std::abs(p));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(fields.p[i], (after[i] - before[i]) / (2 * h), 1e-5 * scale);
    }
}

TEST(Compose, OutOfBoxWhenTheKdvSolutionIsNotDecayed) {
    const Grid1D zeta(10.0, 64);
    BurstAsymptotics asym;
    asym.eps = 0.5;
    asym.c = 1.0;
    asym.eff = effective_params({});
    asym.left = {KdvState{zeta, std::vector<double>(zeta.size(), 1.0), 0.0, Direction::Left}};
    asym.right = {KdvState{zeta, std::vector<double>(zeta.size(), 1.0), 0.0, Direction::Right}};
    const double x[] = {20.0};
    try {
        compose(asym, {}, x, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfBox);
    }
}

TEST(Compose, HumpsTravelAtTheEffectiveSpeed) {
    const PhysParams params{};
    const Epsilon eps(0.3);
    const double c = std::sqrt(effective_speed_squared(params));
    const double t1 = 3.0 * eps.value() / c, t2 = 1.0;
    const double times[] = {t1, t2};
    const auto asym = build_burst_asymptotics(burst(0.5), params, quadratic, eps, Grid1D(80.0, 1024), times);
    const Grid1D grid(30.0, 2048);
    const auto u1 = compose(asym, params, grid.nodes(), t1).first;
    const auto u2 = compose(asym, params, grid.nodes(), t2).first;

    const auto speeds = hump_speeds(u1, t1, u2, t2, grid);
    EXPECT_NEAR(speeds.right_moving / c, 1.0, 0.02);
    EXPECT_NEAR(speeds.left_moving / c, -1.0, 0.02);
}
