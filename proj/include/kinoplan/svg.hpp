#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "kinoplan/environment.hpp"
#include "kinoplan/trajectory.hpp"

namespace kinoplan {

struct SvgStyle {
    double pixels_per_meter = 20.0;
    double margin = 10.0;
};

namespace detail {
inline std::string fmt3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline const char* trajectory_style(const std::string& role) {
    if (role == "exploit") return R"(stroke="#1a9e2f" stroke-width="3")";
    if (role == "explore") return R"(stroke="#d62728" stroke-width="2")";
    if (role == "solution") return R"(stroke="#1f4fd6" stroke-width="2.5")";
    if (role == "edge") return R"(stroke="#9a9a9a" stroke-width="0.6")";
    return R"(stroke="#000000" stroke-width="1.5")";
}
}  // namespace detail

// Obstacles as dark rectangles, the goal as a green circle, the start
// footprint in grey, and one polyline per trajectory coloured by role.
inline std::string render_svg(const Problem& p, const std::vector<TaggedTrajectory>& trajectories,
                              const SvgStyle& style = {}) {
    const auto& b = p.workspace.bounds();
    const double s = style.pixels_per_meter;
    const double m = style.margin;
    auto px = [&](double x) { return detail::fmt3(m + (x - b.x_min) * s); };
    auto py = [&](double y) { return detail::fmt3(m + (b.y_max - y) * s); };
    const double w = b.width() * s + 2 * m;
    const double h = b.height() * s + 2 * m;

    std::ostringstream os;
    os << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n';
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << detail::fmt3(w) << R"(" height=")"
       << detail::fmt3(h) << R"(" viewBox="0 0 )" << detail::fmt3(w) << ' ' << detail::fmt3(h) << R"(">)" << '\n';
    os << R"(  <rect x=")" << px(b.x_min) << R"(" y=")" << py(b.y_max) << R"(" width=")" << detail::fmt3(b.width() * s)
       << R"(" height=")" << detail::fmt3(b.height() * s) << R"(" fill="#ffffff" stroke="#000000" stroke-width="1"/>)"
       << '\n';
    for (const auto& o : p.workspace.obstacles())
        os << R"(  <rect x=")" << px(o.x_min) << R"(" y=")" << py(o.y_max) << R"(" width=")"
           << detail::fmt3(o.width() * s) << R"(" height=")" << detail::fmt3(o.height() * s)
           << R"(" fill="#262626"/>)" << '\n';
    os << R"(  <circle cx=")" << px(p.goal.center.x) << R"(" cy=")" << py(p.goal.center.y) << R"(" r=")"
       << detail::fmt3(p.goal.radius * s) << R"(" fill="#2ca02c" fill-opacity="0.5" stroke="#2ca02c"/>)" << '\n';
    const auto corners = footprint_corners(p.workspace.footprint(), p.start.x, p.start.y, p.start.theta);
    os << R"(  <polygon points=")";
    for (std::size_t i = 0; i < corners.size(); ++i)
        os << (i ? " " : "") << px(corners[i].x) << ',' << py(corners[i].y);
    os << R"(" fill="#8c8c8c" stroke="#404040"/>)" << '\n';
    for (const auto& t : trajectories) {
        os << R"(  <polyline fill="none" )" << detail::trajectory_style(t.role) << R"( points=")";
        bool first = true;
        for (const auto& smp : t.trajectory.samples) {
            os << (first ? "" : " ") << px(smp.state.x) << ',' << py(smp.state.y);
            first = false;
        }
        os << R"("/>)" << '\n';
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace kinoplan
