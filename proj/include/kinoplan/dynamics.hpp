#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kinoplan/random.hpp"
#include "kinoplan/state.hpp"
#include "kinoplan/trajectory.hpp"

namespace kinoplan {

// Kinematic skid-steer model:
//   xdot = v cos(theta), ydot = v sin(theta), thetadot = (v_r - v_l) / W,
//   v_l' = a_l, v_r' = a_r, with v = (v_l + v_r) / 2.
inline StateDerivative derivative(const State& s, const Control& u, const DynamicsParams& p) {
    const double v = s.speed();
    return {v * std::cos(s.theta), v * std::sin(s.theta),
            (s.v_right - s.v_left) / p.tread_separation, u.a_left, u.a_right};
}

namespace detail {
inline State axpy(const State& s, double h, const StateDerivative& d) {
    return {s.x + h * d.x, s.y + h * d.y, s.theta + h * d.theta, s.v_left + h * d.v_left,
            s.v_right + h * d.v_right};
}
}  // namespace detail

// One classical RK4 step of length p.dt. Tread speeds saturate at +-v_max
// after the step and heading is wrapped into (-pi, pi].
inline State step(const State& s, const Control& u, const DynamicsParams& p) {
    const double h = p.dt;
    const auto k1 = derivative(s, u, p);
    const auto k2 = derivative(detail::axpy(s, 0.5 * h, k1), u, p);
    const auto k3 = derivative(detail::axpy(s, 0.5 * h, k2), u, p);
    const auto k4 = derivative(detail::axpy(s, h, k3), u, p);
    auto comb = [h](double a, double b, double c, double d) {
        return h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
    };
    State out{s.x + comb(k1.x, k2.x, k3.x, k4.x), s.y + comb(k1.y, k2.y, k3.y, k4.y),
              s.theta + comb(k1.theta, k2.theta, k3.theta, k4.theta),
              s.v_left + comb(k1.v_left, k2.v_left, k3.v_left, k4.v_left),
              s.v_right + comb(k1.v_right, k2.v_right, k3.v_right, k4.v_right)};
    out.v_left = std::clamp(out.v_left, -p.v_max, p.v_max);
    out.v_right = std::clamp(out.v_right, -p.v_max, p.v_max);
    out.theta = normalize_angle(out.theta);
    return out;
}

// Holds m.control for m.duration from s0; yields duration/dt + 1 samples.
inline Trajectory propagate(const State& s0, const Maneuver& m, const DynamicsParams& p) {
    const long n = steps_for(m.duration, p.dt);
    Trajectory t;
    t.maneuver = m;
    t.samples.reserve(static_cast<std::size_t>(n) + 1);
    t.samples.push_back({0.0, s0});
    State s = s0;
    for (long i = 1; i <= n; ++i) {
        s = step(s, m.control, p);
        t.samples.push_back({static_cast<double>(i) * p.dt, s});
    }
    return t;
}

// Endpoint of propagate() without materializing the samples.
inline State propagate_endpoint(const State& s0, const Maneuver& m, const DynamicsParams& p) {
    const long n = steps_for(m.duration, p.dt);
    State s = s0;
    for (long i = 0; i < n; ++i) s = step(s, m.control, p);
    return s;
}

// Controls uniform in [-a_max, a_max]^2; duration uniform over the dt
// multiples contained in `range`.
inline Maneuver sample_random_maneuver(Rng& rng, const DynamicsParams& p, const DurationRange& range) {
    if (!(range.lo > 0) || range.hi < range.lo)
        throw std::invalid_argument("sample_random_maneuver: invalid duration range");
    const long lo = steps_for(range.lo, p.dt);
    const long hi = steps_for(range.hi, p.dt);
    Maneuver m;
    m.control.a_left = rng.uniform(-p.a_max, p.a_max);
    m.control.a_right = rng.uniform(-p.a_max, p.a_max);
    const long k = lo == hi ? lo : static_cast<long>(rng.uniform_int(lo, hi));
    m.duration = k == lo ? range.lo : (k == hi ? range.hi : static_cast<double>(k) * p.dt);
    return m;
}

}  // namespace kinoplan
