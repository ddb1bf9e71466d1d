#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "kinoplan/learn/dataset.hpp"
#include "kinoplan/learn/network.hpp"
#include "kinoplan/provider.hpp"

namespace kinoplan::learn {

enum class LearnedMode { Exploit, All };

// Maneuver sets predicted by the network: row 0 only (Exploit) or all rows.
class LearnedProvider final : public ManeuverProvider {
public:
    LearnedProvider(ModelParams model, Encoding encoding, LearnedMode mode)
        : model_(std::move(model)), encoding_(encoding), mode_(mode) {
        if (model_.arch.grid != encoding_.maps.grid || model_.arch.exploratory != encoding_.exploratory)
            throw std::invalid_argument("learned provider: model dimensions do not match the encoding (grid " +
                                        std::to_string(model_.arch.grid) + " vs " +
                                        std::to_string(encoding_.maps.grid) + ", N " +
                                        std::to_string(model_.arch.exploratory) + " vs " +
                                        std::to_string(encoding_.exploratory) + ")");
    }

    std::vector<Maneuver> predict(const State& state, const Workspace& w, const GoalRegion& goal) const {
        const auto features = state_features(state, encoding_.dynamics);
        const auto maps = rasterize_local(w, goal, state, encoding_.maps, encoding_.heuristic_speed);
        const std::vector<float> occ(maps.occupancy.begin(), maps.occupancy.end());
        const std::vector<float> heu(maps.heuristic.begin(), maps.heuristic.end());
        const auto rows = forward(model_, ModelInput{features, occ, heu});
        const std::size_t n = mode_ == LearnedMode::Exploit ? 1 : rows.size();
        std::vector<Maneuver> out;
        for (std::size_t k = 0; k < n; ++k) out.push_back(denormalize_maneuver(rows[k], encoding_));
        return out;
    }

    std::optional<ManeuverSet> informed(const State& state, const Workspace& w, const GoalRegion& goal,
                                        Rng&) const override {
        ManeuverSet set;
        for (const auto& m : predict(state, w, goal)) {
            auto t = propagate(state, m, encoding_.dynamics);
            if (w.trajectory_collision_free(t)) set.entries.push_back({m, std::move(t)});
        }
        return set;
    }

    std::string name() const override { return mode_ == LearnedMode::Exploit ? "fc-exploit" : "fc-all"; }

private:
    ModelParams model_;
    Encoding encoding_;
    LearnedMode mode_;
};

}  // namespace kinoplan::learn
