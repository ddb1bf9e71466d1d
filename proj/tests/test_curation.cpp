#include <gtest/gtest.h>

#include <set>

#include "kinoplan/curation.hpp"
#include "kinoplan/environment.hpp"
#include "kinoplan/provider.hpp"
#include "oracles.hpp"

using namespace kinoplan;

namespace {

Workspace open_space() { return Workspace(Box{0, 0, 20, 20}, {}, Footprint{}); }

// Straight-line candidates with hand-picked endpoints.
CandidateSet from_endpoints(const std::vector<Point2>& ends, std::vector<bool> free) {
    CandidateSet c;
    for (const auto& e : ends) {
        Trajectory t;
        t.samples.push_back({0, State{}});
        t.samples.push_back({1, State{e.x, e.y, 0, 0, 0}});
        c.maneuvers.push_back({{0, 0}, 1.0});
        c.trajectories.push_back(t);
    }
    c.collision_free = std::move(free);
    return c;
}

}  // namespace

TEST(Candidates, DeterministicReplay) {
    Rng a(3), b(3);
    const auto ca = generate_candidates({10, 10, 0, 0, 0}, 5, open_space(), {}, {}, a);
    const auto cb = generate_candidates({10, 10, 0, 0, 0}, 5, open_space(), {}, {}, b);
    ASSERT_EQ(ca.size(), 5u);
    EXPECT_EQ(ca.maneuvers, cb.maneuvers);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(ca.trajectories[i].back(), cb.trajectories[i].back());
}

TEST(Candidates, RootInObstacleCollides) {
    const Workspace w(Box{0, 0, 20, 20}, {Box{8, 8, 12, 12}}, Footprint{});
    Rng rng(1);
    const auto c = generate_candidates({10, 10, 0, 0, 0}, 20, w, {}, {}, rng);
    for (bool f : c.collision_free) EXPECT_FALSE(f);
}

TEST(Candidates, OpenSpaceAllFree) {
    Rng rng(1);
    const auto c = generate_candidates({10, 10, 0, 0, 0}, 50, open_space(), {}, {}, rng);
    for (bool f : c.collision_free) EXPECT_TRUE(f);
}

TEST(Exploit, Argmin) {
    const GoalRegion g{{0, 0}, 0};
    EXPECT_EQ(select_exploitative(from_endpoints({{5, 0}, {3, 0}, {7, 0}}, {true, true, true}), g, 1.0), 1u);
    EXPECT_EQ(select_exploitative(from_endpoints({{5, 0}, {3, 0}, {7, 0}}, {true, false, true}), g, 1.0), 0u);
    EXPECT_FALSE(select_exploitative(from_endpoints({{5, 0}, {3, 0}}, {false, false}), g, 1.0));
}

TEST(Exploit, TieGoesToLowestIndex) {
    const GoalRegion g{{0, 0}, 0};
    EXPECT_EQ(select_exploitative(from_endpoints({{5, 0}, {0, 3}, {3, 0}}, {true, true, true}), g, 1.0), 1u);
}

TEST(Explore, PicksLargestMinDispersion) {
    // Straight two-sample trajectories from the origin; dispersion with the
    // selected one grows with the endpoint gap.
    const auto c = from_endpoints({{1, 0}, {1, 0.4}, {1, 1.0}, {1, 0.2}}, {true, true, true, true});
    const std::size_t sel[] = {0};
    std::vector<double> scores;
    const auto picks = select_exploratory(c, sel, 1, 33, &scores);
    ASSERT_EQ(picks.size(), 1u);
    EXPECT_EQ(picks[0], 2u);
    EXPECT_NEAR(scores[0], dispersion(c.trajectories[0], c.trajectories[2]), 1e-15);
}

TEST(Explore, MatchesBruteForceOracle) {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const State root{10, 10, rng.uniform(-3, 3), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto c = generate_candidates(root, 8, open_space(), {}, {}, rng);
        const std::size_t first = static_cast<std::size_t>(rng.uniform_int(0, 7));
        const std::size_t sel[] = {first};
        EXPECT_EQ(select_exploratory(c, sel, 2), oracle::explore_brute_force(c, {first}, 2));
    }
}

TEST(Explore, NothingLeft) {
    const auto c = from_endpoints({{1, 0}, {1, 1}, {2, 2}}, {true, false, false});
    const std::size_t sel[] = {0};
    EXPECT_TRUE(select_exploratory(c, sel, 2).empty());
}

TEST(Curate, OpenSpaceGivesFiveFreeDistinctEntries) {
    Rng rng(21);
    const auto r = curate_detailed({10, 10, 0.3, 0.5, 0.5}, open_space(), {{18, 18}, 1}, {}, {}, rng);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->set.size(), 5u);
    EXPECT_EQ(std::set<std::size_t>(r->indices.begin(), r->indices.end()).size(), 5u);
    for (auto i : r->indices) EXPECT_TRUE(r->candidates.collision_free[i]);
}

TEST(Curate, BoxedInGivesNothing) {
    // Walls closer than any feasible motion from a moving start.
    const Workspace w(Box{0, 0, 20, 20},
                      {Box{9, 9, 9.75, 11}, Box{10.25, 9, 11, 11}, Box{9, 9, 11, 9.75}, Box{9, 10.25, 11, 11}},
                      Footprint{0.2, 0.2});
    Rng rng(2);
    CurationSettings cs;
    cs.candidates = 200;
    EXPECT_FALSE(curate({10, 10, 0, 1.5, 1.5}, w, {{18, 18}, 1}, cs, {}, rng));
}

TEST(Curate, ZeroExploratoryIsSingleton) {
    Rng rng(4);
    CurationSettings cs;
    cs.exploratory = 0;
    const auto s = curate({10, 10, 0, 0, 0}, open_space(), {{18, 18}, 1}, cs, {}, rng);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->size(), 1u);
}

TEST(Curate, Deterministic) {
    const Workspace w(Box{0, 0, 20, 20}, {Box{12, 8, 13, 12}}, Footprint{});
    Rng a(77), b(77);
    const auto x = curate_detailed({10, 10, 0, 1, 1}, w, {{18, 10}, 1}, {}, {}, a);
    const auto y = curate_detailed({10, 10, 0, 1, 1}, w, {{18, 10}, 1}, {}, {}, b);
    ASSERT_TRUE(x && y);
    EXPECT_EQ(x->indices, y->indices);
}

TEST(Curate, ExploitOptimalAndGreedyMaxMin) {
    Rng env_rng(31);
    const Point2 clear[] = {{10, 10}};
    const auto w = random_environment(env_rng, Box{0, 0, 20, 20}, 0.2, clear);
    const GoalRegion g{{17, 4}, 1};
    CurationSettings cs;
    cs.candidates = 300;
    Rng rng(5);
    const auto r = curate_detailed({10, 10, 1.0, 0.8, 0.6}, w, g, cs, {}, rng);
    ASSERT_TRUE(r);
    const auto& c = r->candidates;
    const double h0 = heuristic(c.trajectories[r->indices[0]].back(), g, cs.heuristic_speed);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.collision_free[i]) {
            EXPECT_GE(heuristic(c.trajectories[i].back(), g, cs.heuristic_speed), h0);
        }
    }

    for (std::size_t k = 1; k < r->indices.size(); ++k) {
        auto min_to = [&](std::size_t i) {
            double m = INFINITY;
            for (std::size_t j = 0; j < k; ++j)
                m = std::min(m, dispersion(c.trajectories[i], c.trajectories[r->indices[j]]));
            return m;
        };
        const double chosen = min_to(r->indices[k]);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c.collision_free[i]) continue;
            if (std::find(r->indices.begin(), r->indices.begin() + static_cast<long>(k), i) !=
                r->indices.begin() + static_cast<long>(k))
                continue;
            EXPECT_LE(min_to(i), chosen);
        }
    }
}

TEST(Provider, CuratedReplaysFromSeed) {
    std::vector<std::pair<State, std::uint64_t>> seen;
    std::vector<ManeuverSet> sets;
    CurationSettings cs;
    cs.candidates = 100;
    CuratedProvider p({}, cs, [&](const State& s, std::uint64_t seed, const ManeuverSet& set) {
        seen.emplace_back(s, seed);
        sets.push_back(set);
    });
    Rng rng(9);
    const auto w = open_space();
    const GoalRegion g{{15, 15}, 1};
    ASSERT_TRUE(p.informed({10, 10, 0, 0, 0}, w, g, rng));
    ASSERT_EQ(seen.size(), 1u);
    Rng replay(seen[0].second);
    const auto again = curate(seen[0].first, w, g, cs, {}, replay);
    ASSERT_TRUE(again);
    ASSERT_EQ(again->size(), sets[0].size());
    for (std::size_t i = 0; i < again->size(); ++i)
        EXPECT_EQ(again->entries[i].maneuver, sets[0].entries[i].maneuver);
}

TEST(Provider, RandomIsCollisionFiltered) {
    const Workspace w(Box{0, 0, 20, 20}, {Box{10.6, 0, 20, 20}}, Footprint{});
    RandomProvider p({}, {}, 50);
    Rng rng(3);
    const auto s = p.informed({10, 10, 0, 1, 1}, w, {{1, 1}, 1}, rng);
    ASSERT_TRUE(s);
    EXPECT_LT(s->size(), 50u);
    for (const auto& e : s->entries) EXPECT_TRUE(w.trajectory_collision_free(e.trajectory));
}
