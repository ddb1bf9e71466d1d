#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kinoplan/bench.hpp"
#include "kinoplan/config.hpp"
#include "kinoplan/svg.hpp"

using namespace kinoplan;
using namespace kinoplan::bench;

namespace {

RunMetrics solved(double first_cost, double final_cost, std::size_t first_it = 10, std::size_t final_it = 20) {
    RunMetrics r;
    r.solved = true;
    r.first_soln_cost = first_cost;
    r.final_soln_cost = final_cost;
    r.first_soln_iters = first_it;
    r.final_soln_iters = final_it;
    r.wall_time = 0.5;
    return r;
}

// Does the straight segment from a to b cross the box?
bool segment_hits(const Box& o, Point2 a, Point2 b) {
    for (int i = 0; i <= 10000; ++i) {
        const double t = i / 10000.0;
        if (o.contains(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))) return true;
    }
    return false;
}

}  // namespace

TEST(Environments, GreedyLineOfSightIsClear) {
    const auto p = build_environment("greedy");
    EXPECT_FALSE(p.workspace.state_in_collision(p.start));
    EXPECT_FALSE(p.workspace.state_in_collision({p.goal.center.x, p.goal.center.y, 0, 0, 0}));
    for (const auto& o : p.workspace.obstacles())
        EXPECT_FALSE(segment_hits(o, {p.start.x, p.start.y}, p.goal.center));
}

TEST(Environments, ExploreBlocksTheGoalRay) {
    const auto p = build_environment("explore");
    EXPECT_FALSE(p.workspace.state_in_collision(p.start));
    EXPECT_FALSE(p.workspace.state_in_collision({p.goal.center.x, p.goal.center.y, 0, 0, 0}));
    const double dx = p.goal.center.x - p.start.x, dy = p.goal.center.y - p.start.y;
    const double len = std::hypot(dx, dy);
    const Point2 a{p.start.x, p.start.y};
    const Point2 b{p.start.x + 3 * dx / len, p.start.y + 3 * dy / len};
    bool hit = false;
    for (const auto& o : p.workspace.obstacles()) hit = hit || segment_hits(o, a, b);
    EXPECT_TRUE(hit);
}

TEST(Environments, UnknownNameFails) {
    EXPECT_THROW(build_environment("maze"), std::invalid_argument);
    EXPECT_THROW(build_environment("/nonexistent/x.env"), std::runtime_error);
}

TEST(Experiment, OneRowPerSeedAndOrderInsensitive) {
    ExperimentConfig cfg{build_environment("open"), "random", {3, 1, 2}, Settings{}, nullptr, 2};
    cfg.settings.planner.max_iterations = 800;
    const auto rows = run_experiment(cfg);
    ASSERT_EQ(rows.size(), 3u);
    cfg.seeds = {2, 3, 1};
    const auto perm = run_experiment(cfg);
    auto find = [&](const std::vector<RunMetrics>& v, std::uint64_t s) {
        for (const auto& r : v)
            if (r.seed == s) return r;
        throw std::logic_error("missing seed");
    };
    for (std::uint64_t s : {1u, 2u, 3u}) {
        const auto a = find(rows, s), b = find(perm, s);
        EXPECT_EQ(a.solved, b.solved);
        EXPECT_EQ(a.first_soln_iters, b.first_soln_iters);
        EXPECT_EQ(a.final_soln_cost, b.final_soln_cost);
    }
}

TEST(Experiment, MetricsMatchHistory) {
    const auto prob = build_environment("open");
    Settings s;
    s.planner.max_iterations = 3000;
    RandomProvider prov(s.dynamics, s.durations);
    const auto r = plan(prob, prov, s.planner_config(), s.dynamics, planner_seed(4));
    const auto m = metrics_from(r, 4);
    ASSERT_TRUE(m.solved);
    EXPECT_EQ(m.first_soln_iters, r.history.front().iteration);
    EXPECT_EQ(m.final_soln_cost, r.history.back().cost);
    EXPECT_LE(m.final_soln_cost, m.first_soln_cost);
    EXPECT_GE(m.final_soln_iters, m.first_soln_iters);
}

TEST(Experiment, UnsolvedRowHasNoCosts) {
    ExperimentConfig cfg{build_environment("greedy"), "random", {1}, Settings{}, nullptr, 1};
    cfg.settings.planner.max_iterations = 5;
    const auto rows = run_experiment(cfg);
    ASSERT_FALSE(rows[0].solved);
    EXPECT_EQ(rows[0].first_soln_cost, 0.0);
    EXPECT_EQ(rows[0].final_soln_cost, 0.0);
}

TEST(Experiment, FailingRunIsIsolated) {
    Problem bad = build_environment("open");
    bad.start = {0.1, 0.1, 0, 0, 0};  // in collision with the bounds
    ExperimentConfig cfg{bad, "random", {1, 2}, Settings{}, nullptr, 1};
    cfg.settings.planner.max_iterations = 10;
    const auto rows = run_experiment(cfg);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_FALSE(r.solved);
        EXPECT_FALSE(r.error.empty());
    }
}

TEST(Experiment, LearnedProviderNeedsModel) {
    ExperimentConfig cfg{build_environment("open"), "fc-all", {1}, Settings{}, nullptr, 1};
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(Aggregate, MeansOverSolvedRuns) {
    const auto s = aggregate({solved(1, 1), solved(2, 2), solved(3, 3)});
    EXPECT_EQ(s.num_solns, 3u);
    EXPECT_EQ(*s.final_soln_cost, 2.0);
    RunMetrics miss;
    miss.wall_time = 2.0;
    const auto t = aggregate({solved(1, 1), miss, solved(3, 3)});
    EXPECT_EQ(t.num_solns, 2u);
    EXPECT_EQ(*t.first_soln_cost, 2.0);
    EXPECT_EQ(*t.mean_wall_time, 1.0);
    const auto none = aggregate({miss, miss});
    EXPECT_EQ(none.num_solns, 0u);
    EXPECT_FALSE(none.first_soln_iters);
    EXPECT_FALSE(none.final_soln_cost);
}

TEST(Table, CsvLayout) {
    EXPECT_EQ(emit_table({}, TableFormat::Csv), std::string(kCsvHeader) + "\n");
    const auto csv = emit_table({aggregate({solved(1.5, 1.25)}, "random", "greedy"),
                                 aggregate({RunMetrics{}}, "curated", "explore")},
                                TableFormat::Csv);
    std::istringstream is(csv);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) ++n;
    EXPECT_EQ(n, 3);
    EXPECT_NE(csv.find("random,greedy,1,10,1.5,20,1.25,0.5\n"), std::string::npos);
    EXPECT_NE(csv.find("curated,explore,0,,,,,0\n"), std::string::npos);
}

TEST(Table, CsvRoundTripsByteIdentically) {
    const std::vector<Summary> rows{aggregate({solved(1.0 / 3.0, 0.1), solved(2, 0.2)}, "a", "b"),
                                    aggregate({RunMetrics{}}, "c", "d", false)};
    const auto csv = emit_table(rows, TableFormat::Csv);
    const auto back = parse_csv(csv);
    EXPECT_EQ(back, rows);
    EXPECT_EQ(emit_table(back, TableFormat::Csv), csv);
    EXPECT_THROW(parse_csv("nope\n"), ParseError);
}

TEST(Table, TextHasHeaderAndRows) {
    const auto t = emit_table({aggregate({solved(1, 1)}, "random", "greedy")}, TableFormat::Text);
    EXPECT_NE(t.find("FirstSolnIters"), std::string::npos);
    EXPECT_NE(t.find("random"), std::string::npos);
}

TEST(Bench, RerunIsByteIdentical) {
    std::istringstream cfg(
        "environments = open, greedy\nproviders = random\nseeds = 1..3\niterations = 600\ntiming = off\n");
    const auto s = read_settings(cfg);
    const auto a = emit_table(run_bench(s, kDefaultDataDir, 2), TableFormat::Csv);
    const auto b = emit_table(run_bench(s, kDefaultDataDir, 1), TableFormat::Csv);
    EXPECT_EQ(a, b);
    EXPECT_EQ(parse_csv(a).size(), 2u);
}

TEST(Config, ParsesKeysAndRejectsUnknown) {
    std::istringstream is(
        "# comment\nv_max = 3\nseeds = 1..3, 7\nproviders = random, curated\nheuristic = distance\n"
        "candidates = 50\nexploratory = 2\n");
    const auto s = read_settings(is);
    EXPECT_EQ(s.dynamics.v_max, 3.0);
    EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2, 3, 7}));
    EXPECT_EQ(s.providers, (std::vector<std::string>{"random", "curated"}));
    EXPECT_EQ(s.heuristic_speed(), 1.0);
    EXPECT_EQ(s.curation().candidates, 50u);
    std::istringstream bad("\nbogus = 1\n");
    try {
        read_settings(bad, "x.cfg");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    std::istringstream misaligned("duration_min = 0.52\n");
    EXPECT_NO_THROW(read_settings(misaligned));
    std::istringstream off_grid("duration_min = 0.513\n");
    EXPECT_THROW(read_settings(off_grid), ParseError);
}

TEST(Svg, EmptyEnvironmentHasBoundsAndGoal) {
    const auto p = build_environment("open");
    const auto svg = render_svg(p, {});
    EXPECT_EQ(svg.find("<rect"), svg.rfind("<rect"));
    EXPECT_NE(svg.find("<circle"), std::string::npos);
    EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(Svg, OnePolylinePerTrajectory) {
    const auto p = build_environment("greedy");
    std::vector<TaggedTrajectory> ts;
    for (int k = 0; k < 4; ++k)
        ts.push_back({k == 0 ? "exploit" : "explore", propagate(p.start, {{0.1 * k, 0.2}, 1.0}, {})});
    const auto svg = render_svg(p, ts);
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    EXPECT_EQ(count, 4u);
    EXPECT_EQ(svg, render_svg(p, ts));
    EXPECT_NE(svg.find("#1a9e2f"), std::string::npos);
}
