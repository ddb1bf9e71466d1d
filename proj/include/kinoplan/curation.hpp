#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kinoplan/dynamics.hpp"
#include "kinoplan/trajectory.hpp"
#include "kinoplan/world.hpp"

namespace kinoplan {

// Candidate pool propagated from one root state. The three vectors are
// parallel.
struct CandidateSet {
    std::vector<Maneuver> maneuvers;
    std::vector<Trajectory> trajectories;
    std::vector<bool> collision_free;

    std::size_t size() const { return maneuvers.size(); }
};

struct ManeuverEntry {
    Maneuver maneuver;
    Trajectory trajectory;
};

// Entry 0 is the exploitative maneuver; the rest are exploratory, in the
// order they were selected.
struct ManeuverSet {
    std::vector<ManeuverEntry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

struct CurationSettings {
    std::size_t candidates = 1000;  // M
    std::size_t exploratory = 4;    // N
    DurationRange durations;
    std::size_t dispersion_points = kDefaultDispersionPoints;
    double heuristic_speed = 2.0;
};

inline CandidateSet generate_candidates(const State& root, std::size_t count, const Workspace& w,
                                        const DynamicsParams& p, const DurationRange& durations,
                                        Rng& rng) {
    CandidateSet c;
    c.maneuvers.reserve(count);
    c.trajectories.reserve(count);
    c.collision_free.reserve(count);
    for (std::size_t i = 0; i < count; ++i) c.maneuvers.push_back(sample_random_maneuver(rng, p, durations));
    for (const auto& m : c.maneuvers) {
        c.trajectories.push_back(propagate(root, m, p));
        c.collision_free.push_back(w.trajectory_collision_free(c.trajectories.back()));
    }
    return c;
}

// Collision-free candidate whose endpoint has the smallest heuristic value.
inline std::optional<std::size_t> select_exploitative(const CandidateSet& c, const GoalRegion& g,
                                                      double heuristic_speed) {
    std::optional<std::size_t> best;
    double best_h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.collision_free[i]) continue;
        const double h = heuristic(c.trajectories[i].back(), g, heuristic_speed);
        if (!best || h < best_h) {
            best = i;
            best_h = h;
        }
    }
    return best;
}

// Greedy max-min dispersion. `selected` holds the candidate indices already
// in the set; up to n_remaining new indices are returned. When `scores` is
// given it receives the winning min-dispersion of every pick.
inline std::vector<std::size_t> select_exploratory(const CandidateSet& c,
                                                   std::span<const std::size_t> selected,
                                                   std::size_t n_remaining,
                                                   std::size_t dispersion_points = kDefaultDispersionPoints,
                                                   std::vector<double>* scores = nullptr) {
    const std::size_t m = c.size();
    std::vector<char> taken(m, 0);
    for (auto s : selected) taken[s] = 1;

    std::vector<std::vector<Point2>> pts(m);
    for (std::size_t i = 0; i < m; ++i)
        if (c.collision_free[i] || taken[i]) pts[i] = resample(c.trajectories[i], dispersion_points);

    std::vector<double> min_d(m, std::numeric_limits<double>::infinity());
    auto absorb = [&](std::size_t chosen) {
        for (std::size_t i = 0; i < m; ++i) {
            if (taken[i] || !c.collision_free[i]) continue;
            min_d[i] = std::min(min_d[i], dispersion(pts[i], pts[chosen]));
        }
    };
    for (auto s : selected) absorb(s);

    std::vector<std::size_t> picks;
    while (picks.size() < n_remaining) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < m; ++i) {
            if (taken[i] || !c.collision_free[i]) continue;
            if (!best || min_d[i] > min_d[*best]) best = i;
        }
        if (!best) break;
        picks.push_back(*best);
        if (scores) scores->push_back(min_d[*best]);
        taken[*best] = 1;
        absorb(*best);
    }
    return picks;
}

struct CurationResult {
    ManeuverSet set;
    std::vector<std::size_t> indices;  // candidate index of every entry
    CandidateSet candidates;
};

// Full curation returning the pool and chosen indices alongside the set.
inline std::optional<CurationResult> curate_detailed(const State& root, const Workspace& w,
                                                     const GoalRegion& g, const CurationSettings& cs,
                                                     const DynamicsParams& p, Rng& rng) {
    if (cs.candidates < cs.exploratory + 1)
        throw std::invalid_argument("curate: candidate count must be at least N + 1");
    CurationResult r;
    r.candidates = generate_candidates(root, cs.candidates, w, p, cs.durations, rng);
    const auto exploit = select_exploitative(r.candidates, g, cs.heuristic_speed);
    if (!exploit) return std::nullopt;
    r.indices.push_back(*exploit);
    const auto explore = select_exploratory(r.candidates, r.indices, cs.exploratory, cs.dispersion_points);
    r.indices.insert(r.indices.end(), explore.begin(), explore.end());
    for (auto i : r.indices) r.set.entries.push_back({r.candidates.maneuvers[i], r.candidates.trajectories[i]});
    return r;
}

inline std::optional<ManeuverSet> curate(const State& root, const Workspace& w, const GoalRegion& g,
                                         const CurationSettings& cs, const DynamicsParams& p, Rng& rng) {
    auto r = curate_detailed(root, w, g, cs, p, rng);
    if (!r) return std::nullopt;
    return std::move(r->set);
}

}  // namespace kinoplan
