#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinoplan/random.hpp"
#include "kinoplan/text.hpp"
#include "kinoplan/world.hpp"

namespace kinoplan {

// A planning query: workspace, start state and goal disc.
struct Problem {
    Workspace workspace;
    State start;
    GoalRegion goal;
};

struct EnvironmentGenOptions {
    double side_lo = 0.5;
    double side_hi = 2.0;
    double clear_radius = 1.0;
    std::size_t coverage_samples = 100000;
    std::size_t max_attempts = 100000;
    Footprint footprint;
};

// Fraction of `bounds` covered by the union of `obstacles`, estimated from
// `samples` uniform points.
inline double estimate_coverage(const Box& bounds, std::span<const Box> obstacles,
                                std::size_t samples, Rng& rng) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = rng.uniform(bounds.x_min, bounds.x_max);
        const double y = rng.uniform(bounds.y_min, bounds.y_max);
        for (const auto& o : obstacles) {
            if (o.contains(x, y)) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(samples);
}

// Places random boxes inside `bounds` until their union covers at least
// `coverage` of the area. Boxes never come within opts.clear_radius of any
// point in `keep_clear`.
inline Workspace random_environment(Rng& rng, const Box& bounds, double coverage,
                                    std::span<const Point2> keep_clear,
                                    const EnvironmentGenOptions& opts = {}) {
    if (!(coverage > 0.0 && coverage < 1.0))
        throw std::invalid_argument("coverage fraction must lie in (0, 1)");
    if (bounds.width() < opts.side_hi || bounds.height() < opts.side_hi)
        throw std::invalid_argument("bounds too small for obstacle sizes");

    // Fixed Monte-Carlo points; coverage is updated incrementally per box.
    std::vector<Point2> probes(opts.coverage_samples);
    for (auto& p : probes) {
        p.x = rng.uniform(bounds.x_min, bounds.x_max);
        p.y = rng.uniform(bounds.y_min, bounds.y_max);
    }
    std::vector<char> covered(probes.size(), 0);
    std::size_t n_covered = 0;
    const auto target = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(probes.size())));

    std::vector<Box> obstacles;
    std::size_t attempts = 0;
    while (n_covered < target) {
        if (++attempts > opts.max_attempts)
            throw std::runtime_error("random_environment: coverage " + std::to_string(coverage) +
                                     " not reached after " + std::to_string(opts.max_attempts) +
                                     " placement attempts");
        const double w = rng.uniform(opts.side_lo, opts.side_hi);
        const double h = rng.uniform(opts.side_lo, opts.side_hi);
        const double x0 = rng.uniform(bounds.x_min, bounds.x_max - w);
        const double y0 = rng.uniform(bounds.y_min, bounds.y_max - h);
        const Box b{x0, y0, x0 + w, y0 + h};
        bool blocked = false;
        for (const auto& c : keep_clear)
            if (distance_to_box(b, c.x, c.y) < opts.clear_radius) blocked = true;
        if (blocked) continue;
        obstacles.push_back(b);
        for (std::size_t i = 0; i < probes.size(); ++i) {
            if (!covered[i] && b.contains(probes[i].x, probes[i].y)) {
                covered[i] = 1;
                ++n_covered;
            }
        }
    }
    return Workspace(bounds, std::move(obstacles), opts.footprint);
}

// Random training query on a 20 m square: start and goal at least 8 m apart,
// obstacles covering `coverage` of the area.
inline Problem random_problem(Rng& rng, double coverage = 1.0 / 3.0,
                              const EnvironmentGenOptions& opts = {}) {
    const Box bounds{0.0, 0.0, 20.0, 20.0};
    Problem p;
    p.start.x = rng.uniform(2.0, 18.0);
    p.start.y = rng.uniform(2.0, 18.0);
    p.start.theta = normalize_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
    do {
        p.goal.center = {rng.uniform(2.0, 18.0), rng.uniform(2.0, 18.0)};
    } while (std::hypot(p.goal.center.x - p.start.x, p.goal.center.y - p.start.y) < 8.0);
    p.goal.radius = 1.0;
    const Point2 clear[] = {{p.start.x, p.start.y}, p.goal.center};
    p.workspace = random_environment(rng, bounds, coverage, clear, opts);
    return p;
}

// Environment file: one record per line, '#' starts a comment.
//   bounds    x_min y_min x_max y_max
//   footprint length width            (optional, default 1 x 0.6)
//   start     x y theta v_left v_right
//   goal      cx cy radius
//   obstacle  x_min y_min x_max y_max (any number)
inline void write_problem(std::ostream& os, const Problem& p) {
    const auto& w = p.workspace;
    const auto f = [](double v) { return format_number(v); };
    os << "# kinoplan environment\n";
    os << "bounds " << f(w.bounds().x_min) << ' ' << f(w.bounds().y_min) << ' ' << f(w.bounds().x_max)
       << ' ' << f(w.bounds().y_max) << '\n';
    os << "footprint " << f(w.footprint().length) << ' ' << f(w.footprint().width) << '\n';
    os << "start " << f(p.start.x) << ' ' << f(p.start.y) << ' ' << f(p.start.theta) << ' '
       << f(p.start.v_left) << ' ' << f(p.start.v_right) << '\n';
    os << "goal " << f(p.goal.center.x) << ' ' << f(p.goal.center.y) << ' ' << f(p.goal.radius) << '\n';
    for (const auto& o : w.obstacles())
        os << "obstacle " << f(o.x_min) << ' ' << f(o.y_min) << ' ' << f(o.x_max) << ' ' << f(o.y_max)
           << '\n';
}

inline Problem read_problem(std::istream& is, const std::string& source = "<stream>") {
    std::string line;
    int lineno = 0;
    bool have_bounds = false, have_start = false, have_goal = false, have_footprint = false;
    Box bounds;
    Footprint footprint;
    State start;
    GoalRegion goal;
    std::vector<Box> obstacles;
    int last_line = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto t = split_ws(line);
        if (t.empty()) continue;
        last_line = lineno;
        auto nums = [&](std::size_t n) {
            if (t.size() != n + 1)
                throw ParseError(source, lineno, "'" + t[0] + "' expects " + std::to_string(n) + " values");
            std::vector<double> v;
            for (std::size_t i = 1; i <= n; ++i) v.push_back(parse_number(t[i], source, lineno));
            return v;
        };
        auto once = [&](bool& seen) {
            if (seen) throw ParseError(source, lineno, "duplicate '" + t[0] + "'");
            seen = true;
        };
        if (t[0] == "bounds") {
            once(have_bounds);
            const auto v = nums(4);
            bounds = {v[0], v[1], v[2], v[3]};
        } else if (t[0] == "footprint") {
            once(have_footprint);
            const auto v = nums(2);
            footprint = {v[0], v[1]};
        } else if (t[0] == "start") {
            once(have_start);
            const auto v = nums(5);
            start = {v[0], v[1], v[2], v[3], v[4]};
        } else if (t[0] == "goal") {
            once(have_goal);
            const auto v = nums(3);
            goal = {{v[0], v[1]}, v[2]};
            if (!(goal.radius > 0)) throw ParseError(source, lineno, "goal radius must be positive");
        } else if (t[0] == "obstacle") {
            const auto v = nums(4);
            if (!(v[2] > v[0]) || !(v[3] > v[1]))
                throw ParseError(source, lineno, "obstacle must have positive area");
            obstacles.push_back({v[0], v[1], v[2], v[3]});
        } else {
            throw ParseError(source, lineno, "unknown record '" + t[0] + "'");
        }
    }
    if (!have_bounds) throw ParseError(source, last_line, "missing 'bounds'");
    if (!have_start) throw ParseError(source, last_line, "missing 'start'");
    if (!have_goal) throw ParseError(source, last_line, "missing 'goal'");
    if (!bounds.contains(goal.center.x, goal.center.y))
        throw ParseError(source, last_line, "goal centre outside bounds");
    try {
        return Problem{Workspace(bounds, std::move(obstacles), footprint), start, goal};
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, last_line, e.what());
    }
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open environment file '" + path + "'");
    return read_problem(in, path);
}

inline void save_problem(const std::string& path, const Problem& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write environment file '" + path + "'");
    write_problem(out, p);
}

}  // namespace kinoplan
