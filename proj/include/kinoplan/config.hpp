#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kinoplan/curation.hpp"
#include "kinoplan/learn/dataset.hpp"
#include "kinoplan/planner.hpp"
#include "kinoplan/text.hpp"
#include "kinoplan/world.hpp"

namespace kinoplan {

// All tunables of a run, loadable from a "key = value" configuration file.
struct Settings {
    DynamicsParams dynamics;
    DurationRange durations;
    PlannerConfig planner;
    std::size_t candidates = 1000;  // M
    std::size_t exploratory = 4;    // N
    LocalMapConfig maps;
    bool distance_heuristic = false;  // raw metres instead of metres / v_max
    double coverage = 1.0 / 3.0;

    // Experiment keys (bench).
    std::vector<std::string> environments{"greedy"};
    std::vector<std::string> providers{"random"};
    std::string model_path;
    std::vector<std::uint64_t> seeds{1};
    bool timing = true;

    double heuristic_speed() const { return distance_heuristic ? 1.0 : dynamics.v_max; }

    PlannerConfig planner_config() const {
        PlannerConfig pc = planner;
        pc.durations = durations;
        pc.heuristic_speed = heuristic_speed();
        return pc;
    }

    CurationSettings curation() const {
        CurationSettings cs;
        cs.candidates = candidates;
        cs.exploratory = exploratory;
        cs.durations = durations;
        cs.heuristic_speed = heuristic_speed();
        return cs;
    }

    learn::Encoding encoding() const {
        return {maps, dynamics, durations, heuristic_speed(), static_cast<int>(exploratory)};
    }
};

// "1..30" or "1, 2, 5"
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text, const std::string& source = "<seeds>",
                                                  int line = 0) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split(text, ',')) {
        if (part.empty()) continue;
        const auto dots = part.find("..");
        if (dots != std::string::npos) {
            const auto lo = parse_integer(trim(std::string_view(part).substr(0, dots)), source, line);
            const auto hi = parse_integer(trim(std::string_view(part).substr(dots + 2)), source, line);
            if (lo < 0 || hi < lo) throw ParseError(source, line, "invalid seed range '" + part + "'");
            for (auto s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
        } else {
            const auto s = parse_integer(part, source, line);
            if (s < 0) throw ParseError(source, line, "seeds must be non-negative");
            out.push_back(static_cast<std::uint64_t>(s));
        }
    }
    if (out.empty()) throw ParseError(source, line, "empty seed list");
    return out;
}

inline void apply_setting(Settings& s, const std::string& key, const std::string& value,
                          const std::string& source = "<config>", int line = 0) {
    auto num = [&] { return parse_number(value, source, line); };
    auto count = [&] {
        const auto v = parse_integer(value, source, line);
        if (v < 0) throw ParseError(source, line, "'" + key + "' must be non-negative");
        return static_cast<std::size_t>(v);
    };
    auto flag = [&] {
        if (value == "on" || value == "true" || value == "1") return true;
        if (value == "off" || value == "false" || value == "0") return false;
        throw ParseError(source, line, "'" + key + "' expects on/off");
    };
    auto list = [&] {
        std::vector<std::string> out;
        for (auto& v : split(value, ','))
            if (!v.empty()) out.push_back(v);
        if (out.empty()) throw ParseError(source, line, "'" + key + "' needs at least one value");
        return out;
    };
    if (key == "tread_separation") s.dynamics.tread_separation = num();
    else if (key == "v_max") s.dynamics.v_max = num();
    else if (key == "a_max") s.dynamics.a_max = num();
    else if (key == "dt") s.dynamics.dt = num();
    else if (key == "duration_min") s.durations.lo = num();
    else if (key == "duration_max") s.durations.hi = num();
    else if (key == "greedy_selection_prob") s.planner.greedy_selection_prob = num();
    else if (key == "witness_radius") s.planner.witness_radius = num();
    else if (key == "random_blossom_count") s.planner.random_blossom_count = count();
    else if (key == "iterations") s.planner.max_iterations = count();
    else if (key == "stop_at_first_solution") s.planner.stop_at_first_solution = flag();
    else if (key == "heuristic") {
        if (value == "admissible") s.distance_heuristic = false;
        else if (value == "distance") s.distance_heuristic = true;
        else throw ParseError(source, line, "heuristic must be 'admissible' or 'distance'");
    } else if (key == "candidates") s.candidates = count();
    else if (key == "exploratory") s.exploratory = count();
    else if (key == "local_grid") s.maps.grid = static_cast<int>(count());
    else if (key == "local_window") s.maps.window = num();
    else if (key == "coverage") s.coverage = num();
    else if (key == "environments" || key == "environment") s.environments = list();
    else if (key == "providers" || key == "provider") s.providers = list();
    else if (key == "model") s.model_path = value;
    else if (key == "seeds") s.seeds = parse_seed_list(value, source, line);
    else if (key == "timing") s.timing = flag();
    else throw ParseError(source, line, "unknown key '" + key + "'");
}

inline void validate(const Settings& s, const std::string& source = "<config>") {
    try {
        s.dynamics.validate();
        s.planner_config().validate();
        s.maps.validate();
        steps_for(s.durations.lo, s.dynamics.dt);
        steps_for(s.durations.hi, s.dynamics.dt);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, 0, e.what());
    }
    if (!(s.durations.lo > 0) || s.durations.hi < s.durations.lo)
        throw ParseError(source, 0, "invalid duration range");
    if (s.candidates < s.exploratory + 1) throw ParseError(source, 0, "candidates must be at least exploratory + 1");
}

inline Settings read_settings(std::istream& is, const std::string& source = "<config>", Settings base = {}) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, lineno, "expected 'key = value'");
        const std::string key(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        if (key.empty()) throw ParseError(source, lineno, "missing key");
        apply_setting(base, key, value, source, lineno);
    }
    validate(base, source);
    return base;
}

inline Settings load_settings(const std::string& path, Settings base = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return read_settings(in, path, std::move(base));
}

}  // namespace kinoplan
