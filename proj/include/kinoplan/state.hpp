#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kinoplan {

// Skid-steer vehicle state: planar pose plus the two tread velocities.
struct State {
    double x = 0.0;        // m
    double y = 0.0;        // m
    double theta = 0.0;    // rad, (-pi, pi]
    double v_left = 0.0;   // m/s
    double v_right = 0.0;  // m/s

    double speed() const { return 0.5 * (v_left + v_right); }

    friend bool operator==(const State&, const State&) = default;
};

using StateDerivative = State;

// Tread accelerations, m/s^2.
struct Control {
    double a_left = 0.0;
    double a_right = 0.0;

    friend bool operator==(const Control&, const Control&) = default;
};

// A constant control held for `duration` seconds.
struct Maneuver {
    Control control;
    double duration = 0.0;

    friend bool operator==(const Maneuver&, const Maneuver&) = default;
};

struct DurationRange {
    double lo = 0.5;
    double hi = 2.0;
};

struct DynamicsParams {
    double tread_separation = 0.5;  // W, m
    double v_max = 2.0;
    double a_max = 1.0;
    double dt = 0.02;

    void validate() const {
        if (!(tread_separation > 0) || !(v_max > 0) || !(a_max > 0) || !(dt > 0))
            throw std::invalid_argument("dynamics parameters must be strictly positive");
    }
};

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    else if (a > std::numbers::pi) a -= two_pi;
    return a;
}

// Number of integration steps in `duration`; throws if not a dt multiple.
inline long steps_for(double duration, double dt) {
    const double ratio = duration / dt;
    const long n = std::lround(ratio);
    if (n < 0 || std::abs(ratio - static_cast<double>(n)) > 1e-6)
        throw std::invalid_argument("maneuver duration " + std::to_string(duration) +
                                    " is not a multiple of dt " + std::to_string(dt));
    return n;
}

}  // namespace kinoplan
