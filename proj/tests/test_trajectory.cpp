#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kinoplan/dynamics.hpp"
#include "kinoplan/trajectory.hpp"

using namespace kinoplan;

namespace {

Trajectory straight(double x0, double y0, double theta, double speed, double duration) {
    return propagate({x0, y0, theta, speed, speed}, {{0, 0}, duration}, {});
}

Trajectory random_trajectory(Rng& rng) {
    const State s{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-3, 3), rng.uniform(-2, 2),
                  rng.uniform(-2, 2)};
    return propagate(s, sample_random_maneuver(rng, {}, {}), {});
}

}  // namespace

TEST(Cost, SingleSampleIsZero) {
    Trajectory t;
    t.samples.push_back({0.0, State{}});
    EXPECT_EQ(trajectory_cost(t), 0.0);
}

TEST(Cost, FiftyOneSamplesIsOneSecond) {
    EXPECT_NEAR(trajectory_cost(straight(0, 0, 0, 0, 1.0)), 1.0, 1e-12);
}

TEST(Cost, ConcatenationAdds) {
    const auto a = straight(0, 0, 0, 1, 1.0);
    const auto b = propagate(a.back(), {{0.3, -0.2}, 0.7}, {});
    EXPECT_NEAR(trajectory_cost(concatenate(a, b)), trajectory_cost(a) + trajectory_cost(b), 1e-12);
    EXPECT_EQ(concatenate(a, b).size(), a.size() + b.size() - 1);
}

TEST(Cost, EmptyThrows) { EXPECT_THROW(trajectory_cost(Trajectory{}), std::logic_error); }

TEST(Resample, StraightLine) {
    const auto p = resample(straight(0, 0, 0, 1, 2.0), 3);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_NEAR(p[0].x, 0.0, 1e-12);
    EXPECT_NEAR(p[1].x, 1.0, 1e-12);
    EXPECT_NEAR(p[2].x, 2.0, 1e-12);
    for (const auto& q : p) EXPECT_NEAR(q.y, 0.0, 1e-12);
}

TEST(Resample, TwoPointsAreTheEndpoints) {
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const auto t = random_trajectory(rng);
        const auto p = resample(t, 2);
        EXPECT_EQ(p[0], (Point2{t.front().x, t.front().y}));
        EXPECT_EQ(p[1], (Point2{t.back().x, t.back().y}));
        EXPECT_EQ(resample(t, 33)[0], p[0]);
    }
}

TEST(Resample, RejectsBadK) { EXPECT_THROW(resample(straight(0, 0, 0, 1, 1.0), 1), std::invalid_argument); }

TEST(Dispersion, IdenticalIsZero) {
    Rng rng(5);
    for (std::size_t k : {2u, 3u, 33u, 100u}) {
        const auto t = random_trajectory(rng);
        EXPECT_EQ(dispersion(t, t, k), 0.0);
    }
}

TEST(Dispersion, ParallelStripArea) {
    const auto a = straight(0, 0, 0, 2, 2.0);
    const auto b = straight(0, 1, 0, 2, 2.0);
    EXPECT_NEAR(dispersion(a, b, 33), 4.0, 1e-9);
}

TEST(Dispersion, SymmetricAndNonNegative) {
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_trajectory(rng);
        const auto b = random_trajectory(rng);
        const double ab = dispersion(a, b);
        EXPECT_EQ(ab, dispersion(b, a));
        EXPECT_GE(ab, 0.0);
    }
}

TEST(Dispersion, RigidMotionInvariant) {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_trajectory(rng);
        const auto b = random_trajectory(rng);
        const double phi = rng.uniform(-3, 3), tx = rng.uniform(-10, 10), ty = rng.uniform(-10, 10);
        auto move = [&](Trajectory t) {
            for (auto& s : t.samples) {
                const double x = s.state.x, y = s.state.y;
                s.state.x = std::cos(phi) * x - std::sin(phi) * y + tx;
                s.state.y = std::sin(phi) * x + std::cos(phi) * y + ty;
            }
            return t;
        };
        EXPECT_NEAR(dispersion(move(a), move(b)), dispersion(a, b), 1e-9);
    }
}

TEST(Dispersion, ConvergesAsKDoubles) {
    // Smooth pairs: wheels stay forward (no cusp in arc length), separate
    // starts and no crossing (no kink in the distance).
    Rng rng(8);
    int pairs = 0;
    while (pairs < 50) {
        const State s{0, 0, rng.uniform(-3, 3), rng.uniform(1, 2), rng.uniform(1, 2)};
        State s2 = s;
        s2.x += rng.uniform(-2, 2);
        s2.y += rng.uniform(-2, 2);
        const auto a = propagate(s, {{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}, 2.0}, {});
        const auto b = propagate(s2, {{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}, 2.0}, {});
        double closest = INFINITY;
        for (std::size_t i = 0; i < a.size(); ++i)
            closest = std::min(closest, std::hypot(a.samples[i].state.x - b.samples[i].state.x,
                                                   a.samples[i].state.y - b.samples[i].state.y));
        if (closest < 0.3) continue;
        ++pairs;
        double prev_gap = INFINITY;
        for (std::size_t k : {5u, 9u, 17u, 33u}) {
            const double gap = std::abs(dispersion(a, b, k) - dispersion(a, b, 2 * k - 1));
            EXPECT_LE(gap, prev_gap) << "pair " << pairs << " K=" << k;
            prev_gap = gap;
        }
    }
}

TEST(Dump, RoundTripsExactly) {
    Rng rng(9);
    std::ostringstream os;
    const auto a = random_trajectory(rng);
    const auto b = random_trajectory(rng);
    write_trajectory(os, a, "exploit");
    write_trajectory(os, b, "explore");
    std::istringstream is(os.str());
    const auto back = read_trajectories(is);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].role, "exploit");
    EXPECT_EQ(back[1].role, "explore");
    ASSERT_EQ(back[0].trajectory.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(back[0].trajectory.samples[i].t, a.samples[i].t);
        EXPECT_EQ(back[0].trajectory.samples[i].state, a.samples[i].state);
    }
}

TEST(Dump, MalformedLineReportsLine) {
    std::istringstream is("# trajectory\n0 0 0 0 0 0\n0.02 1 2 3\n");
    try {
        read_trajectories(is, "t.traj");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}
