#pragma once

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinoplan/state.hpp"
#include "kinoplan/text.hpp"

namespace kinoplan {

struct Sample {
    double t = 0.0;
    State state;
};

// Time-stamped state sequence produced by holding one maneuver. Samples are
// spaced by the integration step and start at t = 0.
struct Trajectory {
    std::vector<Sample> samples;
    Maneuver maneuver;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    const State& front() const { return samples.front().state; }
    const State& back() const { return samples.back().state; }
};

struct Plan {
    std::vector<Maneuver> maneuvers;

    double duration() const {
        return std::accumulate(maneuvers.begin(), maneuvers.end(), 0.0,
                               [](double acc, const Maneuver& m) { return acc + m.duration; });
    }
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

// Duration cost of a trajectory, in seconds.
inline double trajectory_cost(const Trajectory& t) {
    if (t.empty()) throw std::logic_error("trajectory_cost: empty trajectory");
    return t.samples.back().t;
}

// Appends `b` after `a`; b's first sample is dropped when it repeats a's last.
inline Trajectory concatenate(const Trajectory& a, const Trajectory& b) {
    Trajectory out = a;
    if (b.empty()) return out;
    const double offset = a.empty() ? 0.0 : a.samples.back().t;
    std::size_t first = 0;
    if (!a.empty() && b.samples.front().state == a.back()) first = 1;
    for (std::size_t i = first; i < b.size(); ++i)
        out.samples.push_back({offset + b.samples[i].t, b.samples[i].state});
    return out;
}

// Workspace projections at K parameter values equally spaced in normalized
// time, linearly interpolated between stored samples.
inline std::vector<Point2> resample(const Trajectory& t, std::size_t k) {
    if (k < 2) throw std::invalid_argument("resample: K must be at least 2");
    if (t.empty()) throw std::invalid_argument("resample: empty trajectory");
    std::vector<Point2> out(k);
    const std::size_t n = t.size();
    const auto& s = t.samples;
    out.front() = {s.front().state.x, s.front().state.y};
    out.back() = {s.back().state.x, s.back().state.y};
    for (std::size_t i = 1; i + 1 < k; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(k - 1);
        const double pos = u * static_cast<double>(n - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo >= n - 1) lo = n - 1;
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double f = pos - static_cast<double>(lo);
        const State& a = s[lo].state;
        const State& b = s[hi].state;
        out[i] = {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
    }
    return out;
}

inline constexpr std::size_t kDefaultDispersionPoints = 33;

// Approximate area between two resampled polylines: trapezoidal integral of
// the pointwise distance against the mean arc-length increment.
inline double dispersion(std::span<const Point2> p, std::span<const Point2> q) {
    if (p.size() != q.size() || p.size() < 2)
        throw std::invalid_argument("dispersion: point lists must match and hold >= 2 points");
    auto dist = [](const Point2& a, const Point2& b) {
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        return std::sqrt(dx * dx + dy * dy);
    };
    double area = 0.0;
    double prev = dist(p[0], q[0]);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double next = dist(p[i + 1], q[i + 1]);
        const double ds = 0.5 * (dist(p[i], p[i + 1]) + dist(q[i], q[i + 1]));
        area += 0.5 * (prev + next) * ds;
        prev = next;
    }
    return area;
}

inline double dispersion(const Trajectory& a, const Trajectory& b,
                         std::size_t k = kDefaultDispersionPoints) {
    const auto p = resample(a, k);
    const auto q = resample(b, k);
    return dispersion(p, q);
}

// Trajectory dump: one "t x y theta v_left v_right" line per sample.
// Trajectories in one stream are separated by "# trajectory <role>" headers.
inline void write_trajectory(std::ostream& os, const Trajectory& t, const std::string& role = "") {
    os << "# trajectory";
    if (!role.empty()) os << ' ' << role;
    os << '\n';
    for (const auto& s : t.samples) {
        os << format_number(s.t) << ' ' << format_number(s.state.x) << ' '
           << format_number(s.state.y) << ' ' << format_number(s.state.theta) << ' '
           << format_number(s.state.v_left) << ' ' << format_number(s.state.v_right) << '\n';
    }
}

struct TaggedTrajectory {
    std::string role;
    Trajectory trajectory;
};

inline std::vector<TaggedTrajectory> read_trajectories(std::istream& is,
                                                       const std::string& source = "<stream>") {
    std::vector<TaggedTrajectory> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields[0] == "#") {
            if (fields.size() >= 2 && fields[1] == "trajectory")
                out.push_back({fields.size() >= 3 ? fields[2] : "", {}});
            continue;
        }
        if (fields.size() != 6)
            throw ParseError(source, lineno, "expected 6 numbers per trajectory sample");
        if (out.empty()) out.push_back({"", {}});
        Sample s;
        s.t = parse_number(fields[0], source, lineno);
        s.state = {parse_number(fields[1], source, lineno), parse_number(fields[2], source, lineno),
                   parse_number(fields[3], source, lineno), parse_number(fields[4], source, lineno),
                   parse_number(fields[5], source, lineno)};
        out.back().trajectory.samples.push_back(s);
    }
    return out;
}

}  // namespace kinoplan
