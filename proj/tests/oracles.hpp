#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the code path it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kinoplan/curation.hpp"
#include "kinoplan/learn/network.hpp"
#include "kinoplan/state.hpp"
#include "kinoplan/world.hpp"

namespace oracle {

using namespace kinoplan;

// Forward Euler on the skid-steer equations, no saturation.
inline State euler(State s, const Control& u, double W, double duration, double h) {
    const long n = std::lround(duration / h);
    for (long i = 0; i < n; ++i) {
        const double v = 0.5 * (s.v_left + s.v_right);
        const State d{v * std::cos(s.theta), v * std::sin(s.theta), (s.v_right - s.v_left) / W, u.a_left, u.a_right};
        s = {s.x + h * d.x, s.y + h * d.y, s.theta + h * d.theta, s.v_left + h * d.v_left, s.v_right + h * d.v_right};
    }
    return s;
}

// Footprint collision by dense sampling of the footprint boundary (step
// `res`), plus obstacle corners falling inside the footprint.
inline bool sampled_collision(const Workspace& w, const State& s, double res = 1e-3) {
    const auto& f = w.footprint();
    const double c = std::cos(s.theta), sn = std::sin(s.theta);
    auto world = [&](double lx, double ly) {
        return std::array<double, 2>{s.x + c * lx - sn * ly, s.y + sn * lx + c * ly};
    };
    const double hl = f.length / 2, hw = f.width / 2;
    std::vector<std::array<double, 2>> pts;
    for (double t = -hl; t <= hl + 1e-12; t += res) {
        pts.push_back(world(t, -hw));
        pts.push_back(world(t, hw));
    }
    for (double t = -hw; t <= hw + 1e-12; t += res) {
        pts.push_back(world(-hl, t));
        pts.push_back(world(hl, t));
    }
    const auto& b = w.bounds();
    for (const auto& p : pts) {
        if (p[0] < b.x_min || p[0] > b.x_max || p[1] < b.y_min || p[1] > b.y_max) return true;
        for (const auto& o : w.obstacles())
            if (o.contains(p[0], p[1])) return true;
    }
    for (const auto& o : w.obstacles()) {
        for (auto [ox, oy] : {std::array<double, 2>{o.x_min, o.y_min}, {o.x_max, o.y_min}, {o.x_max, o.y_max},
                              {o.x_min, o.y_max}}) {
            const double dx = ox - s.x, dy = oy - s.y;
            const double lx = c * dx + sn * dy, ly = -sn * dx + c * dy;
            if (std::abs(lx) <= hl && std::abs(ly) <= hw) return true;
        }
    }
    return false;
}

// Smallest absolute separating-axis gap between the footprint and any
// obstacle or bound edge; disagreements with sampling are legitimate only
// for near-contact cases.
inline double contact_margin(const Workspace& w, const State& s) {
    const auto corners = footprint_corners(w.footprint(), s.x, s.y, s.theta);
    const double c = std::cos(s.theta), sn = std::sin(s.theta);
    double margin = std::numeric_limits<double>::infinity();
    const auto& b = w.bounds();
    for (const auto& p : corners)
        margin = std::min({margin, std::abs(p.x - b.x_min), std::abs(b.x_max - p.x), std::abs(p.y - b.y_min),
                           std::abs(b.y_max - p.y)});
    for (const auto& o : w.obstacles()) {
        const std::array<std::array<double, 2>, 4> axes{{{1, 0}, {0, 1}, {c, sn}, {-sn, c}}};
        const std::array<std::array<double, 2>, 4> oc{{{o.x_min, o.y_min}, {o.x_max, o.y_min}, {o.x_max, o.y_max},
                                                       {o.x_min, o.y_max}}};
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : axes) {
            double r0 = 1e300, r1 = -1e300, b0 = 1e300, b1 = -1e300;
            for (const auto& p : corners) {
                const double d = p.x * a[0] + p.y * a[1];
                r0 = std::min(r0, d);
                r1 = std::max(r1, d);
            }
            for (const auto& p : oc) {
                const double d = p[0] * a[0] + p[1] * a[1];
                b0 = std::min(b0, d);
                b1 = std::max(b1, d);
            }
            best = std::max(best, std::max(b0 - r1, r0 - b1));
        }
        margin = std::min(margin, std::abs(best));
    }
    return margin;
}

// Exploitative pick by linear scan.
inline std::optional<std::size_t> exploit_scan(const CandidateSet& c, const GoalRegion& g, double speed) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.collision_free[i]) continue;
        const auto& e = c.trajectories[i].back();
        const double h = std::max(0.0, std::hypot(e.x - g.center.x, e.y - g.center.y) - g.radius) / speed;
        if (!best) {
            best = i;
            continue;
        }
        const auto& eb = c.trajectories[*best].back();
        const double hb = std::max(0.0, std::hypot(eb.x - g.center.x, eb.y - g.center.y) - g.radius) / speed;
        if (h < hb) best = i;
    }
    return best;
}

// Exploratory picks recomputing every min-dispersion from scratch each step.
inline std::vector<std::size_t> explore_brute_force(const CandidateSet& c, std::vector<std::size_t> selected,
                                                    std::size_t n_remaining, std::size_t k = 33) {
    std::vector<std::size_t> picks;
    for (std::size_t step = 0; step < n_remaining; ++step) {
        std::optional<std::size_t> best;
        double best_score = -1.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c.collision_free[i]) continue;
            if (std::find(selected.begin(), selected.end(), i) != selected.end()) continue;
            double score = std::numeric_limits<double>::infinity();
            for (auto s : selected) score = std::min(score, dispersion(c.trajectories[i], c.trajectories[s], k));
            if (!best || score > best_score) {
                best = i;
                best_score = score;
            }
        }
        if (!best) break;
        picks.push_back(*best);
        selected.push_back(*best);
    }
    return picks;
}

// Straight-line evaluation of the maneuver network wiring, reading weights
// directly from the flat parameter vector in its documented order.
inline std::vector<std::array<double, 3>> network_forward(const learn::ModelParams& m,
                                                          const std::vector<double>& features,
                                                          const std::vector<double>& occ,
                                                          const std::vector<double>& heu) {
    const auto& a = m.arch;
    std::size_t off = 0;
    auto mlp = [&](const std::vector<double>& x, int hidden, int out) {
        const int in = static_cast<int>(x.size());
        const double* W1 = &m.theta[off];
        const double* b1 = W1 + hidden * in;
        const double* W2 = b1 + hidden;
        const double* b2 = W2 + out * hidden;
        off += static_cast<std::size_t>(hidden * in + hidden + out * hidden + out);
        std::vector<double> h(static_cast<std::size_t>(hidden));
        for (int j = 0; j < hidden; ++j) {
            double z = b1[j];
            for (int i = 0; i < in; ++i) z += W1[j * in + i] * x[static_cast<std::size_t>(i)];
            h[static_cast<std::size_t>(j)] = std::max(0.0, z);
        }
        std::vector<double> y(static_cast<std::size_t>(out));
        for (int o = 0; o < out; ++o) {
            double z = b2[o];
            for (int j = 0; j < hidden; ++j) z += W2[o * hidden + j] * h[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(o)] = z;
        }
        return y;
    };
    const auto xs = mlp(features, a.x_hidden, a.x_out);
    const auto os = mlp(occ, a.o_hidden, a.o_out);
    const auto hs = mlp(heu, a.h_hidden, a.h_out);
    std::vector<std::array<double, 3>> u;
    for (int k = 0; k <= a.exploratory; ++k) {
        std::vector<double> in(xs);
        in.insert(in.end(), os.begin(), os.end());
        if (k == 0) in.insert(in.end(), hs.begin(), hs.end());
        for (const auto& prev : u) in.insert(in.end(), prev.begin(), prev.end());
        const auto y = mlp(in, a.head_hidden, 3);
        u.push_back({std::tanh(y[0]), std::tanh(y[1]), 1.0 / (1.0 + std::exp(-y[2]))});
    }
    return u;
}

}  // namespace oracle
