// kinoplan: environment and dataset generation, training, planning,
// benchmarking and SVG rendering from one binary.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kinoplan/bench.hpp"
#include "kinoplan/config.hpp"
#include "kinoplan/environment.hpp"
#include "kinoplan/learn/dataset.hpp"
#include "kinoplan/learn/model_io.hpp"
#include "kinoplan/learn/train.hpp"
#include "kinoplan/parallel.hpp"
#include "kinoplan/planner.hpp"
#include "kinoplan/svg.hpp"

namespace {

using namespace kinoplan;

constexpr std::uint64_t kDefaultSeed = 1;

struct Global {
    std::uint64_t seed = kDefaultSeed;
    std::string config;
    std::string out;
    unsigned jobs = 0;
    bool no_timing = false;
    std::string data_dir = bench::kDefaultDataDir;
};

// Writes to the file named by `path`, or stdout when it is empty. The file
// is only created once the content is complete.
void emit(const std::string& path, const std::string& content, bool binary = false) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Settings load(const Global& g) {
    Settings s = g.config.empty() ? Settings{} : load_settings(g.config);
    if (g.no_timing) s.timing = false;
    return s;
}

unsigned jobs(const Global& g) { return g.jobs ? g.jobs : default_jobs(); }

struct GenEnvArgs {
    std::optional<double> coverage;
};

void run_gen_env(const Global& g, const GenEnvArgs& a) {
    const Settings s = load(g);
    Rng rng(g.seed);
    const Problem p = random_problem(rng, a.coverage.value_or(s.coverage));
    std::ostringstream os;
    write_problem(os, p);
    emit(g.out, os.str());
}

struct GenDatasetArgs {
    std::size_t records = 0;
    std::size_t iterations = 200;
};

void run_gen_dataset(const Global& g, const GenDatasetArgs& a) {
    const Settings s = load(g);
    learn::DatasetGenOptions opt;
    opt.header.encoding = s.encoding();
    opt.header.seed = g.seed;
    opt.header.candidates = static_cast<std::uint32_t>(s.candidates);
    opt.header.coverage = s.coverage;
    opt.records = a.records;
    opt.iterations_per_env = a.iterations;
    opt.planner = s.planner_config();
    opt.jobs = jobs(g);
    const auto d = learn::generate_dataset(opt);
    std::ostringstream os;
    learn::write_dataset(os, d);
    emit(g.out, os.str(), true);
    std::cerr << "wrote " << d.records.size() << " records\n";
}

struct TrainArgs {
    std::string data;
    learn::TrainConfig cfg;
};

void run_train(const Global& g, TrainArgs a) {
    const auto d = learn::load_dataset(a.data);
    learn::Architecture arch;
    arch.grid = d.header.encoding.maps.grid;
    arch.exploratory = d.header.encoding.exploratory;
    a.cfg.seed = g.seed;
    const auto ex = d.examples();
    const auto r = learn::train(ex, arch, a.cfg, [](std::size_t epoch, double l) {
        std::cout << "epoch " << epoch + 1 << " loss " << format_number(l) << '\n';
    });
    std::cout << "final loss " << format_number(r.final_loss) << '\n';
    std::ostringstream os;
    learn::write_model(os, r.model);
    emit(g.out, os.str(), true);
}

struct PlanArgs {
    std::string env;
    std::string provider = "random";
    std::string model;
    std::optional<std::size_t> iterations;
    std::string tree;
    std::string maneuvers;
};

void run_plan(const Global& g, const PlanArgs& a) {
    Settings s = load(g);
    if (a.iterations) s.planner.max_iterations = *a.iterations;
    if (!a.model.empty()) s.model_path = a.model;
    const Problem problem = bench::build_environment(a.env, g.data_dir);
    std::optional<learn::ModelParams> model;
    if (a.provider == "fc-exploit" || a.provider == "fc-all") {
        if (s.model_path.empty()) throw std::invalid_argument("provider '" + a.provider + "' needs --model");
        model = learn::load_model(s.model_path);
    }
    const auto provider = bench::make_provider(a.provider, s, model ? &*model : nullptr);

    if (!a.maneuvers.empty()) {
        Rng rng(mix_seed(g.seed, 0x4d414e56ULL));
        const auto set = provider->informed(problem.start, problem.workspace, problem.goal, rng);
        std::ostringstream os;
        if (set)
            for (std::size_t k = 0; k < set->size(); ++k)
                write_trajectory(os, set->entries[k].trajectory,
                                 a.provider == "random" ? "random" : (k == 0 ? "exploit" : "explore"));
        emit(a.maneuvers, os.str());
    }

    Planner planner(problem, *provider, s.planner_config(), s.dynamics, bench::planner_seed(g.seed));
    const auto r = planner.run();
    std::ostringstream log;
    write_run_log(log, r.history, s.timing);
    emit(g.out, log.str());
    if (!a.tree.empty()) {
        std::ostringstream os;
        write_tree(os, planner);
        emit(a.tree, os.str());
    }
    std::cerr << "iterations " << r.stats.iterations << ", nodes " << r.stats.nodes << ", ";
    if (r.best)
        std::cerr << "best cost " << format_number(r.best->cost) << " (first at iteration "
                  << r.history.front().iteration << ")\n";
    else
        std::cerr << "no solution\n";
}

struct BenchArgs {
    std::string format = "csv";
};

int run_bench(const Global& g, const BenchArgs& a) {
    if (g.config.empty()) throw std::invalid_argument("bench needs --config");
    const Settings s = load(g);
    std::vector<std::string> errors;
    const auto rows = bench::run_bench(s, g.data_dir, jobs(g), &errors);
    emit(g.out, bench::emit_table(rows, a.format == "csv" ? bench::TableFormat::Csv : bench::TableFormat::Text));
    for (const auto& e : errors) std::cerr << "run failed: " << e << '\n';
    return errors.empty() ? 0 : 2;
}

struct RenderArgs {
    std::string env;
    std::vector<std::string> trajectories;
};

void run_render(const Global& g, const RenderArgs& a) {
    const Problem p = bench::build_environment(a.env, g.data_dir);
    std::vector<TaggedTrajectory> ts;
    for (const auto& path : a.trajectories) {
        std::istringstream is(slurp(path));
        for (auto& t : read_trajectories(is, path)) ts.push_back(std::move(t));
    }
    emit(g.out, render_svg(p, ts));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinodynamic tree search with curated and learned maneuver sets.", "kinoplan"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Global g;
    app.add_option("--seed", g.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--config", g.config, "Settings file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output file (stdout when omitted, except for binary outputs)");
    app.add_option("--jobs", g.jobs, "Worker threads for bench and gen-dataset (0 = all cores)")
        ->capture_default_str();
    app.add_flag("--no-timing", g.no_timing, "Write zero wall times so outputs are byte-reproducible");
    app.add_option("--data-dir", g.data_dir, "Directory holding envs/*.env (default: the data/ directory of the source tree)");

    GenEnvArgs gen_env;
    auto* c_env = app.add_subcommand("gen-env", "Generate a random environment file");
    c_env->add_option("--coverage", gen_env.coverage, "Obstacle coverage fraction in (0, 1); default 1/3");

    GenDatasetArgs gen_ds;
    auto* c_ds = app.add_subcommand("gen-dataset", "Record curated maneuver sets from planner runs");
    c_ds->add_option("--records", gen_ds.records, "Number of records")->required()->check(CLI::PositiveNumber);
    c_ds->add_option("--iters-per-env", gen_ds.iterations, "Planner iterations per environment")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train the maneuver network on a dataset");
    c_train->add_option("--data", tr.data, "Dataset file")->required()->check(CLI::ExistingFile);
    c_train->add_option("--epochs", tr.cfg.epochs, "Training epochs")->capture_default_str();
    c_train->add_option("--lr", tr.cfg.learning_rate, "Learning rate")->capture_default_str();
    c_train->add_option("--batch", tr.cfg.batch_size, "Batch size")->capture_default_str();

    PlanArgs pl;
    auto* c_plan = app.add_subcommand("plan", "Run the planner once and write its run log");
    c_plan->add_option("--env", pl.env, "greedy, explore, open, or an environment file")->required();
    c_plan->add_option("--provider", pl.provider, "random, curated, fc-exploit or fc-all")
        ->capture_default_str()
        ->check(CLI::IsMember(bench::provider_names()));
    c_plan->add_option("--model", pl.model, "Model file for the learned providers");
    c_plan->add_option("--iters", pl.iterations, "Iteration budget (overrides the config)");
    c_plan->add_option("--tree", pl.tree, "Write every tree edge and the solution as trajectory dumps");
    c_plan->add_option("--maneuvers", pl.maneuvers, "Write the informed maneuver set at the start state");

    BenchArgs be;
    auto* c_bench = app.add_subcommand("bench", "Run every configured provider on every configured environment");
    c_bench->add_option("--format", be.format, "csv or text")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "text"}));

    RenderArgs rd;
    auto* c_render = app.add_subcommand("render", "Draw an environment and trajectory dumps as SVG");
    c_render->add_option("--env", rd.env, "greedy, explore, open, or an environment file")->required();
    c_render->add_option("--traj", rd.trajectories, "Trajectory dump files")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "kinoplan: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
        return 1;
    }

    const bool needs_out = c_ds->parsed() || c_train->parsed();
    if (needs_out && g.out.empty()) {
        std::cerr << "kinoplan: --out is required for binary outputs\n";
        return 1;
    }
    if (c_bench->parsed() && g.config.empty()) {
        std::cerr << "kinoplan: bench requires --config\n\n" << c_bench->help();
        return 1;
    }
    if (c_render->parsed() && g.out.empty()) {
        std::cerr << "kinoplan: render requires --out\n\n" << c_render->help();
        return 1;
    }

    std::cerr << "seed " << g.seed << '\n';
    try {
        if (c_env->parsed()) run_gen_env(g, gen_env);
        else if (c_ds->parsed()) run_gen_dataset(g, gen_ds);
        else if (c_train->parsed()) run_train(g, tr);
        else if (c_plan->parsed()) run_plan(g, pl);
        else if (c_bench->parsed()) return run_bench(g, be);
        else if (c_render->parsed()) run_render(g, rd);
    } catch (const std::exception& e) {
        std::cerr << "kinoplan: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
