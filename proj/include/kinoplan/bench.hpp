#pragma once

#include <algorithm>
#include <cstdio>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kinoplan/config.hpp"
#include "kinoplan/environment.hpp"
#include "kinoplan/learn/learned_provider.hpp"
#include "kinoplan/learn/model_io.hpp"
#include "kinoplan/parallel.hpp"
#include "kinoplan/planner.hpp"
#include "kinoplan/provider.hpp"
#include "kinoplan/text.hpp"

namespace kinoplan::bench {

#ifdef KINOPLAN_DATA_DIR
inline constexpr const char* kDefaultDataDir = KINOPLAN_DATA_DIR;
#else
inline constexpr const char* kDefaultDataDir = "data";
#endif

// "greedy", "explore" and "open" resolve to the environment files shipped in
// data/envs; anything else is read as a path.
inline Problem build_environment(const std::string& name, const std::string& data_dir = kDefaultDataDir) {
    if (name == "greedy" || name == "explore" || name == "open")
        return load_problem(data_dir + "/envs/" + name + ".env");
    if (name.find('/') == std::string::npos && name.find('.') == std::string::npos)
        throw std::invalid_argument("unknown environment '" + name + "'");
    return load_problem(name);
}

inline const std::vector<std::string>& provider_names() {
    static const std::vector<std::string> names{"random", "curated", "fc-exploit", "fc-all"};
    return names;
}

inline std::unique_ptr<ManeuverProvider> make_provider(const std::string& name, const Settings& s,
                                                       const learn::ModelParams* model = nullptr) {
    if (name == "random")
        return std::make_unique<RandomProvider>(s.dynamics, s.durations, s.exploratory + 1);
    if (name == "curated") return std::make_unique<CuratedProvider>(s.dynamics, s.curation());
    if (name == "fc-exploit" || name == "fc-all") {
        if (!model) throw std::invalid_argument("provider '" + name + "' needs a model file");
        return std::make_unique<learn::LearnedProvider>(
            *model, s.encoding(), name == "fc-all" ? learn::LearnedMode::All : learn::LearnedMode::Exploit);
    }
    throw std::invalid_argument("unknown provider '" + name + "'");
}

struct RunMetrics {
    std::uint64_t seed = 0;
    bool solved = false;
    std::size_t first_soln_iters = 0;
    double first_soln_cost = 0.0;
    std::size_t final_soln_iters = 0;
    double final_soln_cost = 0.0;
    double wall_time = 0.0;
    std::string error;  // non-empty when the run failed
};

inline RunMetrics metrics_from(const PlanResult& r, std::uint64_t seed) {
    RunMetrics m;
    m.seed = seed;
    m.wall_time = r.stats.wall_time;
    if (!r.history.empty()) {
        m.solved = true;
        m.first_soln_iters = r.history.front().iteration;
        m.first_soln_cost = r.history.front().cost;
        m.final_soln_iters = r.history.back().iteration;
        m.final_soln_cost = r.history.back().cost;
    }
    return m;
}

inline std::uint64_t planner_seed(std::uint64_t seed) { return mix_seed(seed, 0x504c414eULL); }

struct ExperimentConfig {
    Problem problem;
    std::string provider;
    std::vector<std::uint64_t> seeds{1};
    Settings settings;  // planner.max_iterations is the iteration budget
    const learn::ModelParams* model = nullptr;
    unsigned jobs = 1;
};

// One independent planner run per seed; a failing run is reported in its
// row without affecting the others.
inline std::vector<RunMetrics> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
    if (cfg.settings.planner.max_iterations < 1) throw std::invalid_argument("run_experiment: zero iterations");
    const auto provider = make_provider(cfg.provider, cfg.settings, cfg.model);
    const PlannerConfig pc = cfg.settings.planner_config();
    std::vector<RunMetrics> rows(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t i) {
        try {
            rows[i] = metrics_from(plan(cfg.problem, *provider, pc, cfg.settings.dynamics, planner_seed(cfg.seeds[i])),
                                   cfg.seeds[i]);
        } catch (const std::exception& e) {
            rows[i] = RunMetrics{};
            rows[i].seed = cfg.seeds[i];
            rows[i].error = e.what();
        }
    });
    return rows;
}

struct Summary {
    std::string algorithm;
    std::string environment;
    std::size_t num_solns = 0;
    std::optional<double> first_soln_iters;
    std::optional<double> first_soln_cost;
    std::optional<double> final_soln_iters;
    std::optional<double> final_soln_cost;
    std::optional<double> mean_wall_time;

    friend bool operator==(const Summary&, const Summary&) = default;
};

// Means over solved runs only; statistics are absent when nothing solved.
// Wall time averages over every run.
inline Summary aggregate(const std::vector<RunMetrics>& rows, const std::string& algorithm = "",
                         const std::string& environment = "", bool with_timing = true) {
    Summary s;
    s.algorithm = algorithm;
    s.environment = environment;
    double fi = 0, fc = 0, li = 0, lc = 0, wt = 0;
    for (const auto& r : rows) {
        wt += r.wall_time;
        if (!r.solved) continue;
        ++s.num_solns;
        fi += static_cast<double>(r.first_soln_iters);
        fc += r.first_soln_cost;
        li += static_cast<double>(r.final_soln_iters);
        lc += r.final_soln_cost;
    }
    if (s.num_solns > 0) {
        const double n = static_cast<double>(s.num_solns);
        s.first_soln_iters = fi / n;
        s.first_soln_cost = fc / n;
        s.final_soln_iters = li / n;
        s.final_soln_cost = lc / n;
    }
    if (with_timing && !rows.empty()) s.mean_wall_time = wt / static_cast<double>(rows.size());
    return s;
}

inline constexpr const char* kCsvHeader =
    "algorithm,environment,NumSolns,FirstSolnIters,FirstSolnCost,FinalSolnIters,FinalSolnCost,MeanWallTime";

enum class TableFormat { Text, Csv };

inline std::string emit_table(const std::vector<Summary>& rows, TableFormat format) {
    std::ostringstream os;
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    if (format == TableFormat::Csv) {
        os << kCsvHeader << '\n';
        for (const auto& r : rows)
            os << r.algorithm << ',' << r.environment << ',' << r.num_solns << ',' << opt(r.first_soln_iters) << ','
               << opt(r.first_soln_cost) << ',' << opt(r.final_soln_iters) << ',' << opt(r.final_soln_cost) << ','
               << opt(r.mean_wall_time) << '\n';
        return os.str();
    }
    auto fixed = [](const std::optional<double>& v, int prec) {
        if (!v) return std::string("-");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", prec, *v);
        return std::string(buf);
    };
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-10s %8s %14s %13s %14s %13s %12s\n", "Algorithm", "Env", "NumSolns",
                  "FirstSolnIters", "FirstSolnCost", "FinalSolnIters", "FinalSolnCost", "MeanWallTime");
    os << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-14s %-10s %8zu %14s %13s %14s %13s %12s\n", r.algorithm.c_str(),
                      r.environment.c_str(), r.num_solns, fixed(r.first_soln_iters, 2).c_str(),
                      fixed(r.first_soln_cost, 2).c_str(), fixed(r.final_soln_iters, 2).c_str(),
                      fixed(r.final_soln_cost, 2).c_str(), fixed(r.mean_wall_time, 3).c_str());
        os << line;
    }
    return os.str();
}

inline std::vector<Summary> parse_csv(const std::string& text, const std::string& source = "<csv>") {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::vector<Summary> out;
    if (!std::getline(is, line) || line != kCsvHeader) throw ParseError(source, 1, "missing or unexpected CSV header");
    ++lineno;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            f.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (f.size() != 8) throw ParseError(source, lineno, "expected 8 CSV fields");
        auto opt = [&](const std::string& v) -> std::optional<double> {
            if (v.empty()) return std::nullopt;
            return parse_number(v, source, lineno);
        };
        Summary s;
        s.algorithm = f[0];
        s.environment = f[1];
        s.num_solns = static_cast<std::size_t>(parse_integer(f[2], source, lineno));
        s.first_soln_iters = opt(f[3]);
        s.first_soln_cost = opt(f[4]);
        s.final_soln_iters = opt(f[5]);
        s.final_soln_cost = opt(f[6]);
        s.mean_wall_time = opt(f[7]);
        out.push_back(s);
    }
    return out;
}

// Cross product of the configured environments and providers. Every provider
// sees the same environments, seeds and iteration budget. Failed runs count
// as unsolved and are described in `errors`.
inline std::vector<Summary> run_bench(const Settings& s, const std::string& data_dir = kDefaultDataDir,
                                      unsigned jobs = 1, std::vector<std::string>* errors = nullptr) {
    std::optional<learn::ModelParams> model;
    const bool needs_model = std::any_of(s.providers.begin(), s.providers.end(),
                                         [](const std::string& p) { return p == "fc-exploit" || p == "fc-all"; });
    if (needs_model) {
        if (s.model_path.empty()) throw std::invalid_argument("learned providers need 'model = <path>'");
        model = learn::load_model(s.model_path);
    }
    std::vector<Summary> out;
    for (const auto& env : s.environments) {
        const Problem problem = build_environment(env, data_dir);
        for (const auto& prov : s.providers) {
            ExperimentConfig cfg{problem, prov, s.seeds, s, model ? &*model : nullptr, jobs};
            const auto rows = run_experiment(cfg);
            for (const auto& r : rows)
                if (!r.error.empty() && errors)
                    errors->push_back(env + "/" + prov + " seed " + std::to_string(r.seed) + ": " + r.error);
            out.push_back(aggregate(rows, prov, env, s.timing));
        }
    }
    return out;
}

}  // namespace kinoplan::bench
