#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kinoplan/state.hpp"
#include "kinoplan/trajectory.hpp"

namespace kinoplan {

// Axis-aligned rectangle.
struct Box {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    friend bool operator==(const Box&, const Box&) = default;
};

// Robot rectangle centred on (x, y) with its length along the heading.
struct Footprint {
    double length = 1.0;
    double width = 0.6;

    friend bool operator==(const Footprint&, const Footprint&) = default;
};

struct GoalRegion {
    Point2 center;
    double radius = 1.0;

    friend bool operator==(const GoalRegion&, const GoalRegion&) = default;
};

inline bool intersects(const Box& a, const Box& b) {
    return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max && b.y_min <= a.y_max;
}

// Distance from a point to a box (0 inside).
inline double distance_to_box(const Box& b, double x, double y) {
    const double dx = std::max({b.x_min - x, 0.0, x - b.x_max});
    const double dy = std::max({b.y_min - y, 0.0, y - b.y_max});
    return std::sqrt(dx * dx + dy * dy);
}

inline std::array<Point2, 4> footprint_corners(const Footprint& f, double x, double y, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double hl = 0.5 * f.length;
    const double hw = 0.5 * f.width;
    const Point2 ax{c * hl, s * hl};
    const Point2 ay{-s * hw, c * hw};
    return {Point2{x + ax.x + ay.x, y + ax.y + ay.y}, Point2{x - ax.x + ay.x, y - ax.y + ay.y},
            Point2{x - ax.x - ay.x, y - ax.y - ay.y}, Point2{x + ax.x - ay.x, y + ax.y - ay.y}};
}

// Separating-axis test between an oriented rectangle (given by its corners,
// heading theta) and an axis-aligned box. Touching counts as intersecting.
inline bool oriented_rect_intersects_box(const std::array<Point2, 4>& corners, double theta,
                                         const Box& box) {
    double x_lo = corners[0].x, x_hi = corners[0].x, y_lo = corners[0].y, y_hi = corners[0].y;
    for (const auto& p : corners) {
        x_lo = std::min(x_lo, p.x);
        x_hi = std::max(x_hi, p.x);
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }
    if (x_hi < box.x_min || box.x_max < x_lo || y_hi < box.y_min || box.y_max < y_lo) return false;

    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::array<Point2, 2> axes{Point2{c, s}, Point2{-s, c}};
    const std::array<Point2, 4> box_corners{Point2{box.x_min, box.y_min}, Point2{box.x_max, box.y_min},
                                            Point2{box.x_max, box.y_max}, Point2{box.x_min, box.y_max}};
    for (const auto& a : axes) {
        double r_lo = corners[0].x * a.x + corners[0].y * a.y, r_hi = r_lo;
        for (int i = 1; i < 4; ++i) {
            const double d = corners[i].x * a.x + corners[i].y * a.y;
            r_lo = std::min(r_lo, d);
            r_hi = std::max(r_hi, d);
        }
        double b_lo = box_corners[0].x * a.x + box_corners[0].y * a.y, b_hi = b_lo;
        for (int i = 1; i < 4; ++i) {
            const double d = box_corners[i].x * a.x + box_corners[i].y * a.y;
            b_lo = std::min(b_lo, d);
            b_hi = std::max(b_hi, d);
        }
        if (r_hi < b_lo || b_hi < r_lo) return false;
    }
    return true;
}

// Bounded planar workspace with box obstacles. Immutable after construction;
// obstacles are bucketed into a uniform grid for collision queries.
class Workspace {
public:
    Workspace() : Workspace(Box{0, 0, 20, 20}, {}, Footprint{}) {}

    Workspace(Box bounds, std::vector<Box> obstacles, Footprint footprint)
        : bounds_(bounds), obstacles_(std::move(obstacles)), footprint_(footprint) {
        if (!(bounds_.width() > 0) || !(bounds_.height() > 0))
            throw std::invalid_argument("workspace bounds must have positive area");
        if (!(footprint_.length > 0) || !(footprint_.width > 0))
            throw std::invalid_argument("footprint dimensions must be positive");
        for (const auto& o : obstacles_) {
            const Box clipped{std::max(o.x_min, bounds_.x_min), std::max(o.y_min, bounds_.y_min),
                              std::min(o.x_max, bounds_.x_max), std::min(o.y_max, bounds_.y_max)};
            if (!(clipped.width() > 0) || !(clipped.height() > 0))
                throw std::invalid_argument("obstacle has no positive-area overlap with the bounds");
        }
        build_index();
    }

    const Box& bounds() const { return bounds_; }
    const std::vector<Box>& obstacles() const { return obstacles_; }
    const Footprint& footprint() const { return footprint_; }

    // Footprint at (s.x, s.y, s.theta) leaves the bounds or touches an obstacle.
    bool state_in_collision(const State& s) const {
        const auto corners = footprint_corners(footprint_, s.x, s.y, s.theta);
        double x_lo = corners[0].x, x_hi = x_lo, y_lo = corners[0].y, y_hi = y_lo;
        for (const auto& p : corners) {
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo = std::min(y_lo, p.y);
            y_hi = std::max(y_hi, p.y);
        }
        if (x_lo < bounds_.x_min || x_hi > bounds_.x_max || y_lo < bounds_.y_min ||
            y_hi > bounds_.y_max)
            return true;
        if (obstacles_.empty()) return false;
        const int c0 = cell_x(x_lo), c1 = cell_x(x_hi), r0 = cell_y(y_lo), r1 = cell_y(y_hi);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                const auto cell = static_cast<std::size_t>(r * cols_ + c);
                for (auto k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
                    if (oriented_rect_intersects_box(corners, s.theta, obstacles_[cell_items_[k]]))
                        return true;
                }
            }
        }
        return false;
    }

    // Point test used for local occupancy grids.
    bool point_blocked(double x, double y) const {
        if (!bounds_.contains(x, y)) return true;
        for (const auto& o : obstacles_)
            if (o.contains(x, y)) return true;
        return false;
    }

    bool trajectory_collision_free(const Trajectory& t) const {
        for (const auto& s : t.samples)
            if (state_in_collision(s.state)) return false;
        return true;
    }

private:
    int cell_x(double x) const {
        return std::clamp(static_cast<int>((x - bounds_.x_min) / cell_size_), 0, cols_ - 1);
    }
    int cell_y(double y) const {
        return std::clamp(static_cast<int>((y - bounds_.y_min) / cell_size_), 0, rows_ - 1);
    }

    void build_index() {
        cell_size_ = std::max({1.0, bounds_.width() / 128.0, bounds_.height() / 128.0});
        cols_ = std::max(1, static_cast<int>(std::ceil(bounds_.width() / cell_size_)));
        rows_ = std::max(1, static_cast<int>(std::ceil(bounds_.height() / cell_size_)));
        const std::size_t n_cells = static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
        std::vector<std::vector<std::uint32_t>> buckets(n_cells);
        for (std::uint32_t i = 0; i < obstacles_.size(); ++i) {
            const auto& o = obstacles_[i];
            for (int r = cell_y(o.y_min); r <= cell_y(o.y_max); ++r)
                for (int c = cell_x(o.x_min); c <= cell_x(o.x_max); ++c)
                    buckets[static_cast<std::size_t>(r * cols_ + c)].push_back(i);
        }
        cell_start_.assign(n_cells + 1, 0);
        cell_items_.clear();
        for (std::size_t c = 0; c < n_cells; ++c) {
            cell_start_[c] = static_cast<std::uint32_t>(cell_items_.size());
            cell_items_.insert(cell_items_.end(), buckets[c].begin(), buckets[c].end());
        }
        cell_start_[n_cells] = static_cast<std::uint32_t>(cell_items_.size());
    }

    Box bounds_;
    std::vector<Box> obstacles_;
    Footprint footprint_;
    double cell_size_ = 1.0;
    int cols_ = 1;
    int rows_ = 1;
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> cell_items_;
};

inline bool state_in_collision(const Workspace& w, const State& s) { return w.state_in_collision(s); }

inline bool trajectory_collision_free(const Workspace& w, const Trajectory& t) {
    return w.trajectory_collision_free(t);
}

// Workspace distance to the goal disc divided by `speed`. With speed = v_max
// this never overestimates the remaining duration.
inline double heuristic(double x, double y, const GoalRegion& g, double speed) {
    const double d = std::hypot(x - g.center.x, y - g.center.y) - g.radius;
    return d > 0.0 ? d / speed : 0.0;
}

inline double heuristic(const State& s, const GoalRegion& g, double speed) {
    return heuristic(s.x, s.y, g, speed);
}

inline bool in_goal(const State& s, const GoalRegion& g) {
    return std::hypot(s.x - g.center.x, s.y - g.center.y) <= g.radius;
}

struct LocalMapConfig {
    int grid = 32;        // cells per side
    double window = 10.0; // side length, m

    void validate() const {
        if (grid < 2 || !(window > 0)) throw std::invalid_argument("invalid local map config");
    }
};

// Row-major G x G grids; row 0 is the lowest y, column 0 the lowest x.
struct LocalMaps {
    int grid = 0;
    std::vector<double> occupancy;  // 1 = obstacle or out of bounds
    std::vector<double> heuristic;  // min-max normalized to [0, 1]

    double o(int row, int col) const { return occupancy[static_cast<std::size_t>(row * grid + col)]; }
    double h(int row, int col) const { return heuristic[static_cast<std::size_t>(row * grid + col)]; }
};

inline Point2 local_cell_center(const State& s, const LocalMapConfig& cfg, int row, int col) {
    const double cell = cfg.window / cfg.grid;
    return {s.x - 0.5 * cfg.window + (col + 0.5) * cell, s.y - 0.5 * cfg.window + (row + 0.5) * cell};
}

// World-aligned occupancy and heuristic grids centred on the state's position.
inline LocalMaps rasterize_local(const Workspace& w, const GoalRegion& g, const State& s,
                                 const LocalMapConfig& cfg, double heuristic_speed) {
    cfg.validate();
    const int n = cfg.grid;
    LocalMaps maps;
    maps.grid = n;
    maps.occupancy.resize(static_cast<std::size_t>(n * n));
    maps.heuristic.resize(static_cast<std::size_t>(n * n));
    double lo = INFINITY, hi = -INFINITY;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const auto p = local_cell_center(s, cfg, r, c);
            const auto idx = static_cast<std::size_t>(r * n + c);
            maps.occupancy[idx] = w.point_blocked(p.x, p.y) ? 1.0 : 0.0;
            const double hv = heuristic(p.x, p.y, g, heuristic_speed);
            maps.heuristic[idx] = hv;
            lo = std::min(lo, hv);
            hi = std::max(hi, hv);
        }
    }
    const double span = hi - lo;
    for (auto& v : maps.heuristic) v = span > 0 ? (v - lo) / span : 0.0;
    return maps;
}

}  // namespace kinoplan
