#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "kinoplan/curation.hpp"
#include "kinoplan/dynamics.hpp"
#include "kinoplan/world.hpp"

namespace kinoplan {

// Source of a node's informed maneuver set. Implementations must be
// reentrant: one provider may serve several planners running in parallel.
// The returned entries are already propagated from `state`; std::nullopt
// marks a state with no usable maneuver.
class ManeuverProvider {
public:
    virtual ~ManeuverProvider() = default;
    virtual std::optional<ManeuverSet> informed(const State& state, const Workspace& w,
                                                const GoalRegion& goal, Rng& rng) const = 0;
    virtual std::string name() const = 0;
};

// Propagates `count` uniformly random maneuvers and keeps the collision-free ones.
class RandomProvider final : public ManeuverProvider {
public:
    RandomProvider(DynamicsParams dynamics, DurationRange durations, std::size_t count = 5)
        : dynamics_(dynamics), durations_(durations), count_(count) {}

    std::optional<ManeuverSet> informed(const State& state, const Workspace& w, const GoalRegion&,
                                        Rng& rng) const override {
        ManeuverSet set;
        for (std::size_t i = 0; i < count_; ++i) {
            const auto m = sample_random_maneuver(rng, dynamics_, durations_);
            auto t = propagate(state, m, dynamics_);
            if (w.trajectory_collision_free(t)) set.entries.push_back({m, std::move(t)});
        }
        return set;
    }

    std::string name() const override { return "random"; }

private:
    DynamicsParams dynamics_;
    DurationRange durations_;
    std::size_t count_;
};

// Online curation from a fresh pool of candidates at every query. Each query
// draws one 64-bit seed from the planner stream and curates with Rng(seed),
// so a curation event can be replayed from (state, seed) alone.
class CuratedProvider final : public ManeuverProvider {
public:
    using Observer = std::function<void(const State&, std::uint64_t seed, const ManeuverSet&)>;

    CuratedProvider(DynamicsParams dynamics, CurationSettings settings, Observer observer = {})
        : dynamics_(dynamics), settings_(settings), observer_(std::move(observer)) {}

    std::optional<ManeuverSet> informed(const State& state, const Workspace& w, const GoalRegion& goal,
                                        Rng& rng) const override {
        const std::uint64_t seed = rng.next();
        Rng local(seed);
        auto set = curate(state, w, goal, settings_, dynamics_, local);
        if (set && observer_) observer_(state, seed, *set);
        return set;
    }

    std::string name() const override { return "curated"; }

    const CurationSettings& settings() const { return settings_; }

private:
    DynamicsParams dynamics_;
    CurationSettings settings_;
    Observer observer_;
};

}  // namespace kinoplan
