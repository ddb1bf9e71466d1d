#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "kinoplan/curation.hpp"
#include "kinoplan/environment.hpp"
#include "kinoplan/learn/binary_io.hpp"
#include "kinoplan/learn/network.hpp"
#include "kinoplan/parallel.hpp"
#include "kinoplan/planner.hpp"
#include "kinoplan/provider.hpp"

namespace kinoplan::learn {

// How planner quantities map to normalized network inputs and targets.
struct Encoding {
    LocalMapConfig maps;
    DynamicsParams dynamics;
    DurationRange durations;
    double heuristic_speed = 2.0;
    int exploratory = 4;  // N

    int rows() const { return exploratory + 1; }
};

inline std::array<float, kStateFeatures> state_features(const State& s, const DynamicsParams& p) {
    return {static_cast<float>(std::cos(s.theta)), static_cast<float>(std::sin(s.theta)),
            static_cast<float>(s.v_left / p.v_max), static_cast<float>(s.v_right / p.v_max)};
}

inline Row normalize_maneuver(const Maneuver& m, const Encoding& e) {
    const double span = e.durations.hi - e.durations.lo;
    return {m.control.a_left / e.dynamics.a_max, m.control.a_right / e.dynamics.a_max,
            span > 0 ? (m.duration - e.durations.lo) / span : 0.0};
}

// Inverse of normalize_maneuver; the duration snaps to the nearest dt
// multiple inside the duration range.
inline Maneuver denormalize_maneuver(const Row& r, const Encoding& e) {
    Maneuver m;
    m.control.a_left = std::clamp(r[0], -1.0, 1.0) * e.dynamics.a_max;
    m.control.a_right = std::clamp(r[1], -1.0, 1.0) * e.dynamics.a_max;
    const double raw = e.durations.lo + std::clamp(r[2], 0.0, 1.0) * (e.durations.hi - e.durations.lo);
    const long lo = steps_for(e.durations.lo, e.dynamics.dt);
    const long hi = steps_for(e.durations.hi, e.dynamics.dt);
    const long k = std::clamp(std::lround(raw / e.dynamics.dt), lo, hi);
    m.duration = k == lo ? e.durations.lo : (k == hi ? e.durations.hi : static_cast<double>(k) * e.dynamics.dt);
    return m;
}

struct DatasetRecord {
    std::uint32_t env_id = 0;
    std::uint64_t curation_seed = 0;
    State root;
    std::array<float, kStateFeatures> features{};
    std::vector<float> occupancy;
    std::vector<float> heuristic;
    std::vector<float> targets;  // rows() x 3, zero beyond valid_count
    std::uint32_t valid_count = 0;

    Example example() const {
        return {{features, occupancy, heuristic}, targets, static_cast<int>(valid_count)};
    }

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

inline DatasetRecord encode_record(const State& s, const Workspace& w, const GoalRegion& goal,
                                   const ManeuverSet& curated, const Encoding& e) {
    if (curated.empty()) throw std::invalid_argument("encode_record: empty maneuver set");
    if (curated.size() > static_cast<std::size_t>(e.rows()))
        throw std::invalid_argument("encode_record: maneuver set larger than N + 1");
    DatasetRecord r;
    r.root = s;
    r.features = state_features(s, e.dynamics);
    const auto maps = rasterize_local(w, goal, s, e.maps, e.heuristic_speed);
    r.occupancy.assign(maps.occupancy.begin(), maps.occupancy.end());
    r.heuristic.assign(maps.heuristic.begin(), maps.heuristic.end());
    r.targets.assign(static_cast<std::size_t>(e.rows() * kManeuverDims), 0.0f);
    for (std::size_t k = 0; k < curated.size(); ++k) {
        const auto row = normalize_maneuver(curated.entries[k].maneuver, e);
        for (int d = 0; d < kManeuverDims; ++d)
            r.targets[k * kManeuverDims + static_cast<std::size_t>(d)] = static_cast<float>(row[static_cast<std::size_t>(d)]);
    }
    r.valid_count = static_cast<std::uint32_t>(curated.size());
    return r;
}

// Everything needed to regenerate a dataset's environments and curation events.
struct DatasetHeader {
    Encoding encoding;
    std::uint64_t seed = 0;
    std::uint32_t candidates = 1000;  // M
    double coverage = 1.0 / 3.0;

    friend bool operator==(const DatasetHeader& a, const DatasetHeader& b) {
        const auto& x = a.encoding;
        const auto& y = b.encoding;
        return x.maps.grid == y.maps.grid && x.maps.window == y.maps.window && x.exploratory == y.exploratory &&
               x.dynamics.tread_separation == y.dynamics.tread_separation && x.dynamics.v_max == y.dynamics.v_max &&
               x.dynamics.a_max == y.dynamics.a_max && x.dynamics.dt == y.dynamics.dt &&
               x.durations.lo == y.durations.lo && x.durations.hi == y.durations.hi &&
               x.heuristic_speed == y.heuristic_speed && a.seed == b.seed && a.candidates == b.candidates &&
               a.coverage == b.coverage;
    }
};

struct Dataset {
    DatasetHeader header;
    std::vector<DatasetRecord> records;

    std::vector<Example> examples() const {
        std::vector<Example> out;
        out.reserve(records.size());
        for (const auto& r : records) out.push_back(r.example());
        return out;
    }
};

inline constexpr std::uint32_t kDatasetVersion = 1;

// Dataset file layout (little-endian):
//   header: "KPDS", u32 version, u32 grid, u32 N, u32 record count,
//           f64 window, tread_separation, v_max, a_max, dt, duration_lo,
//           duration_hi, heuristic_speed, coverage, u64 seed, u32 candidates
//   record: u32 env_id, u64 curation_seed, f64 x5 root state,
//           f32 x4 features, f32 x G^2 occupancy, f32 x G^2 heuristic,
//           f32 x (N+1)*3 targets, u32 valid_count
inline void write_dataset(std::ostream& os, const Dataset& d) {
    const auto& h = d.header;
    const auto& e = h.encoding;
    io::put_magic(os, "KPDS");
    io::put_u32(os, kDatasetVersion);
    io::put_u32(os, static_cast<std::uint32_t>(e.maps.grid));
    io::put_u32(os, static_cast<std::uint32_t>(e.exploratory));
    io::put_u32(os, static_cast<std::uint32_t>(d.records.size()));
    for (double v : {e.maps.window, e.dynamics.tread_separation, e.dynamics.v_max, e.dynamics.a_max, e.dynamics.dt,
                     e.durations.lo, e.durations.hi, e.heuristic_speed, h.coverage})
        io::put_f64(os, v);
    io::put_u64(os, h.seed);
    io::put_u32(os, h.candidates);
    const std::size_t cells = static_cast<std::size_t>(e.maps.grid * e.maps.grid);
    const std::size_t targets = static_cast<std::size_t>(e.rows() * kManeuverDims);
    for (const auto& r : d.records) {
        if (r.occupancy.size() != cells || r.heuristic.size() != cells || r.targets.size() != targets)
            throw std::invalid_argument("write_dataset: record dimensions do not match the header");
        io::put_u32(os, r.env_id);
        io::put_u64(os, r.curation_seed);
        for (double v : {r.root.x, r.root.y, r.root.theta, r.root.v_left, r.root.v_right}) io::put_f64(os, v);
        for (float v : r.features) io::put_f32(os, v);
        for (float v : r.occupancy) io::put_f32(os, v);
        for (float v : r.heuristic) io::put_f32(os, v);
        for (float v : r.targets) io::put_f32(os, v);
        io::put_u32(os, r.valid_count);
    }
}

inline Dataset read_dataset(std::istream& is, const std::string& source = "<dataset>") {
    io::Reader rd(is, source);
    rd.expect_magic("KPDS");
    if (const auto v = rd.u32(); v != kDatasetVersion) rd.fail("unsupported dataset version " + std::to_string(v));
    Dataset d;
    auto& h = d.header;
    auto& e = h.encoding;
    const auto grid = rd.u32();
    const auto n = rd.u32();
    const auto count = rd.u32();
    if (grid < 2 || grid > 4096 || n > 1024) rd.fail("implausible grid size or maneuver count");
    e.maps.grid = static_cast<int>(grid);
    e.exploratory = static_cast<int>(n);
    for (double* f : {&e.maps.window, &e.dynamics.tread_separation, &e.dynamics.v_max, &e.dynamics.a_max,
                      &e.dynamics.dt, &e.durations.lo, &e.durations.hi, &e.heuristic_speed, &h.coverage})
        *f = rd.f64();
    h.seed = rd.u64();
    h.candidates = rd.u32();
    const std::size_t cells = static_cast<std::size_t>(grid) * grid;
    const std::size_t targets = static_cast<std::size_t>(n + 1) * kManeuverDims;
    d.records.resize(count);
    for (auto& r : d.records) {
        r.env_id = rd.u32();
        r.curation_seed = rd.u64();
        for (double* f : {&r.root.x, &r.root.y, &r.root.theta, &r.root.v_left, &r.root.v_right}) *f = rd.f64();
        for (auto& v : r.features) v = rd.f32();
        r.occupancy.resize(cells);
        for (auto& v : r.occupancy) v = rd.f32();
        r.heuristic.resize(cells);
        for (auto& v : r.heuristic) v = rd.f32();
        r.targets.resize(targets);
        for (auto& v : r.targets) v = rd.f32();
        r.valid_count = rd.u32();
        if (r.valid_count < 1 || r.valid_count > n + 1) rd.fail("record valid_count out of range");
    }
    rd.expect_end();
    return d;
}

inline void save_dataset(const std::string& path, const Dataset& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset file '" + path + "'");
    write_dataset(out, d);
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
    return read_dataset(in, path);
}

struct DatasetGenOptions {
    DatasetHeader header;
    std::size_t records = 1000;
    std::size_t iterations_per_env = 200;
    PlannerConfig planner;
    unsigned jobs = 1;
};

// Training query for environment `env_id` of a dataset.
inline Problem dataset_problem(const DatasetHeader& h, std::uint32_t env_id) {
    Rng rng(mix_seed(h.seed, env_id));
    return random_problem(rng, h.coverage);
}

inline CurationSettings dataset_curation(const DatasetHeader& h) {
    CurationSettings cs;
    cs.candidates = h.candidates;
    cs.exploratory = static_cast<std::size_t>(h.encoding.exploratory);
    cs.durations = h.encoding.durations;
    cs.heuristic_speed = h.encoding.heuristic_speed;
    return cs;
}

// Runs the curated-provider planner on fresh random environments and keeps
// one record per curation event until `records` are collected, then
// shuffles them with the dataset seed.
inline Dataset generate_dataset(const DatasetGenOptions& opt) {
    Dataset d;
    d.header = opt.header;
    const auto& h = opt.header;
    const CurationSettings cs = dataset_curation(h);
    PlannerConfig pc = opt.planner;
    pc.max_iterations = opt.iterations_per_env;
    pc.durations = h.encoding.durations;
    pc.heuristic_speed = h.encoding.heuristic_speed;

    auto run_env = [&](std::uint32_t env_id) {
        const Problem problem = dataset_problem(h, env_id);
        std::vector<DatasetRecord> out;
        std::mutex m;
        CuratedProvider provider(h.encoding.dynamics, cs,
                                 [&](const State& s, std::uint64_t seed, const ManeuverSet& set) {
                                     auto r = encode_record(s, problem.workspace, problem.goal, set, h.encoding);
                                     r.env_id = env_id;
                                     r.curation_seed = seed;
                                     std::lock_guard lock(m);
                                     out.push_back(std::move(r));
                                 });
        Planner planner(problem, provider, pc, h.encoding.dynamics, mix_seed(h.seed, 0x100000000ULL + env_id));
        planner.run();
        return out;
    };

    const unsigned jobs = std::max(1u, opt.jobs);
    std::uint32_t next_env = 0;
    while (d.records.size() < opt.records) {
        std::vector<std::vector<DatasetRecord>> batch(jobs);
        parallel_for(jobs, jobs, [&](std::size_t i) { batch[i] = run_env(next_env + static_cast<std::uint32_t>(i)); });
        next_env += jobs;
        for (auto& b : batch)
            for (auto& r : b)
                if (d.records.size() < opt.records) d.records.push_back(std::move(r));
        if (next_env > 1000000) throw std::runtime_error("generate_dataset: too few curation events per environment");
    }
    Rng shuffle(mix_seed(h.seed, 0x5348554646ULL));
    for (std::size_t i = d.records.size(); i > 1; --i)
        std::swap(d.records[i - 1],
                  d.records[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    return d;
}

// Re-runs the curation behind `r` from its stored environment id, root state
// and seed, returning the freshly encoded record.
inline DatasetRecord recurate_record(const DatasetHeader& h, const DatasetRecord& r) {
    const Problem problem = dataset_problem(h, r.env_id);
    Rng rng(r.curation_seed);
    const auto set = curate(r.root, problem.workspace, problem.goal, dataset_curation(h), h.encoding.dynamics, rng);
    if (!set) throw std::runtime_error("recurate_record: curation produced no maneuvers");
    auto fresh = encode_record(r.root, problem.workspace, problem.goal, *set, h.encoding);
    fresh.env_id = r.env_id;
    fresh.curation_seed = r.curation_seed;
    return fresh;
}

}  // namespace kinoplan::learn
