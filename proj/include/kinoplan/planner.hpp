#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kinoplan/dynamics.hpp"
#include "kinoplan/environment.hpp"
#include "kinoplan/provider.hpp"
#include "kinoplan/random.hpp"
#include "kinoplan/trajectory.hpp"
#include "kinoplan/world.hpp"

namespace kinoplan {

struct PlannerConfig {
    std::size_t max_iterations = 50000;
    double greedy_selection_prob = 0.5;
    double witness_radius = 0.2;  // 0 disables sparsification
    std::size_t random_blossom_count = 1;
    DurationRange durations;
    double heuristic_speed = 2.0;  // v_max for the admissible heuristic, 1 for raw distance
    bool stop_at_first_solution = false;

    void validate() const {
        if (!(greedy_selection_prob >= 0.0 && greedy_selection_prob <= 1.0))
            throw std::invalid_argument("greedy_selection_prob must lie in [0, 1]");
        if (!(witness_radius >= 0.0)) throw std::invalid_argument("witness_radius must be >= 0");
        if (!(heuristic_speed > 0.0)) throw std::invalid_argument("heuristic_speed must be > 0");
    }
};

enum class PruneReason : std::uint8_t { None, Bound, Witness };

inline constexpr std::int32_t kNoParent = -1;

struct TreeNode {
    State state;
    std::int32_t parent = kNoParent;
    std::optional<Maneuver> incoming;
    double g = 0.0;  // duration from the root
    double h = 0.0;
    std::optional<ManeuverSet> pending_informed;
    bool informed_generated = false;
    bool reaches_goal = false;
    PruneReason prune = PruneReason::None;
    std::vector<std::int32_t> children;

    bool pruned() const { return prune != PruneReason::None; }
    double f() const { return g + h; }
};

// Branch-and-bound test; ties are pruned.
inline bool should_prune(double g, double h, double best_cost) { return g + h >= best_cost; }

inline bool should_prune(const TreeNode& n, double best_cost, const GoalRegion& goal, double heuristic_speed) {
    return should_prune(n.g, heuristic(n.state, goal, heuristic_speed), best_cost);
}

// Search tree with the index structures needed for selection: the active
// (selectable) nodes ordered by f = g + h and as a flat list for uniform draws.
class SearchTree {
public:
    std::int32_t add(TreeNode node) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        if (node.parent != kNoParent) nodes_[static_cast<std::size_t>(node.parent)].children.push_back(id);
        const bool active = !node.pruned();
        nodes_.push_back(std::move(node));
        slot_.push_back(-1);
        if (active) activate(id);
        return id;
    }

    void prune(std::int32_t id, PruneReason why) {
        auto& n = at(id);
        if (n.pruned()) return;
        n.prune = why;
        by_f_.erase({n.f(), id});
        const auto s = slot_[static_cast<std::size_t>(id)];
        const auto last = active_.back();
        active_[static_cast<std::size_t>(s)] = last;
        slot_[static_cast<std::size_t>(last)] = s;
        active_.pop_back();
        slot_[static_cast<std::size_t>(id)] = -1;
    }

    TreeNode& at(std::int32_t id) { return nodes_[static_cast<std::size_t>(id)]; }
    const TreeNode& at(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t active_count() const { return active_.size(); }
    const std::vector<std::int32_t>& active() const { return active_; }

    // Lowest f among active nodes; the oldest wins ties.
    std::int32_t best_active() const { return by_f_.begin()->second; }

private:
    void activate(std::int32_t id) {
        slot_[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(active_.size());
        active_.push_back(id);
        by_f_.insert({at(id).f(), id});
    }

    std::vector<TreeNode> nodes_;
    std::vector<std::int32_t> active_;
    std::vector<std::int32_t> slot_;
    std::set<std::pair<double, std::int32_t>> by_f_;
};

// Epsilon-greedy selection over active nodes.
inline std::int32_t select_node(const SearchTree& tree, Rng& rng, const PlannerConfig& cfg) {
    if (tree.active_count() == 0) throw std::logic_error("select_node: no selectable node");
    if (rng.bernoulli(cfg.greedy_selection_prob)) return tree.best_active();
    const auto& a = tree.active();
    return a[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(a.size()) - 1))];
}

// One representative per square workspace cell of side `radius`. A newcomer
// replaces the representative only with a strictly smaller cost-to-come.
class WitnessGrid {
public:
    explicit WitnessGrid(double radius) : radius_(radius) {}

    struct Decision {
        bool accept = true;
        std::optional<std::int32_t> displaced;
    };

    Decision check(const State& s, double g, const SearchTree& tree) const {
        if (radius_ <= 0.0) return {};
        const auto it = cells_.find(key(s));
        if (it == cells_.end()) return {};
        if (g < tree.at(it->second).g) return {true, it->second};
        return {false, std::nullopt};
    }

    void record(const State& s, std::int32_t id) {
        if (radius_ > 0.0) cells_[key(s)] = id;
    }

    double radius() const { return radius_; }

private:
    std::int64_t key(const State& s) const {
        const auto cx = static_cast<std::int64_t>(std::floor(s.x / radius_));
        const auto cy = static_cast<std::int64_t>(std::floor(s.y / radius_));
        return (cx << 32) ^ (cy & 0xffffffff);
    }

    double radius_;
    std::unordered_map<std::int64_t, std::int32_t> cells_;
};

// Accepts `candidate` into the witness structure, pruning a displaced
// representative. Returns false when the candidate is dominated.
inline bool witness_accepts(WitnessGrid& witnesses, SearchTree& tree, std::int32_t candidate) {
    const auto& n = tree.at(candidate);
    const auto d = witnesses.check(n.state, n.g, tree);
    if (!d.accept) return false;
    if (d.displaced) tree.prune(*d.displaced, PruneReason::Witness);
    witnesses.record(n.state, candidate);
    return true;
}

struct SolutionEvent {
    std::size_t iteration = 0;
    double wall_time = 0.0;  // s since the loop started
    double cost = 0.0;
};

struct SolutionRecord {
    Plan plan;
    double cost = 0.0;
    std::size_t found_at_iteration = 0;
    std::int32_t goal_node = kNoParent;
};

struct PlannerStats {
    std::size_t iterations = 0;
    std::size_t nodes = 0;
    std::size_t provider_queries = 0;
    double wall_time = 0.0;
};

struct PlanResult {
    std::optional<SolutionRecord> best;
    std::vector<SolutionEvent> history;
    PlannerStats stats;
};

// Informed tree search. A node's first expansion propagates its informed
// maneuver set (requested from the provider at that moment); later
// expansions propagate random maneuvers. Nodes whose cost-to-come plus
// heuristic cannot beat the incumbent are pruned.
class Planner {
public:
    Planner(const Problem& problem, const ManeuverProvider& provider, PlannerConfig cfg,
            DynamicsParams dynamics, std::uint64_t seed)
        : problem_(problem), provider_(provider), cfg_(cfg), dynamics_(dynamics), rng_(seed),
          witnesses_(cfg.witness_radius) {
        cfg_.validate();
        dynamics_.validate();
        if (problem_.workspace.state_in_collision(problem_.start))
            throw std::invalid_argument("start state is in collision");
        TreeNode root;
        root.state = problem_.start;
        root.h = h(root.state);
        const auto id = tree_.add(std::move(root));
        witnesses_.record(problem_.start, id);
        if (in_goal(problem_.start, problem_.goal)) {
            tree_.at(id).reaches_goal = true;
            improve(id, 0);
        }
    }

    PlanResult run() {
        const auto t0 = std::chrono::steady_clock::now();
        start_time_ = t0;
        std::size_t it = 0;
        while (it < cfg_.max_iterations && tree_.active_count() > 0) {
            if (cfg_.stop_at_first_solution && best_) break;
            ++it;
            const auto node = select_node(tree_, rng_, cfg_);
            expand(node, it);
        }
        PlanResult r;
        r.best = best_;
        r.history = history_;
        r.stats.iterations = it;
        r.stats.nodes = tree_.size();
        r.stats.provider_queries = provider_queries_;
        r.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

    // Propagates the node's informed set on its first expansion and
    // random_blossom_count random maneuvers afterwards. Returns ids of the
    // children added to the tree.
    std::vector<std::int32_t> expand(std::int32_t id, std::size_t iteration = 0) {
        std::vector<Trajectory> edges;
        {
            auto& n = tree_.at(id);
            if (!n.informed_generated) {
                n.informed_generated = true;
                ++provider_queries_;
                n.pending_informed = provider_.informed(n.state, problem_.workspace, problem_.goal, rng_);
                if (!n.pending_informed) n.pending_informed.emplace();
            }
            if (n.pending_informed) {
                for (auto& e : n.pending_informed->entries) edges.push_back(std::move(e.trajectory));
                n.pending_informed.reset();
            } else {
                const State from = n.state;
                for (std::size_t k = 0; k < cfg_.random_blossom_count; ++k) {
                    const auto m = sample_random_maneuver(rng_, dynamics_, cfg_.durations);
                    edges.push_back(propagate(from, m, dynamics_));
                }
            }
        }
        std::vector<std::int32_t> added;
        for (auto& t : edges) {
            if (!problem_.workspace.trajectory_collision_free(t)) continue;
            if (auto child = add_child(id, std::move(t), iteration)) added.push_back(*child);
        }
        return added;
    }

    const SearchTree& tree() const { return tree_; }
    const std::optional<SolutionRecord>& best() const { return best_; }
    const std::vector<SolutionEvent>& history() const { return history_; }
    const Problem& problem() const { return problem_; }
    const DynamicsParams& dynamics() const { return dynamics_; }

    // Maneuvers from the root to `id`.
    std::vector<Maneuver> maneuvers_to(std::int32_t id) const {
        std::vector<Maneuver> out;
        for (auto n = id; tree_.at(n).parent != kNoParent; n = tree_.at(n).parent)
            out.push_back(*tree_.at(n).incoming);
        return {out.rbegin(), out.rend()};
    }

    // Edge trajectory into `id`, regenerated from its parent.
    Trajectory edge(std::int32_t id) const {
        const auto& n = tree_.at(id);
        return propagate(tree_.at(n.parent).state, *n.incoming, dynamics_);
    }

private:
    double h(const State& s) const { return heuristic(s, problem_.goal, cfg_.heuristic_speed); }

    std::optional<std::int32_t> add_child(std::int32_t parent, Trajectory t, std::size_t iteration) {
        // Cut the edge at its first sample inside the goal disc.
        bool goal = false;
        for (std::size_t k = 1; k < t.samples.size(); ++k) {
            if (in_goal(t.samples[k].state, problem_.goal)) {
                t.samples.resize(k + 1);
                t.maneuver.duration = static_cast<double>(k) * dynamics_.dt;
                goal = true;
                break;
            }
        }
        TreeNode child;
        child.state = t.back();
        child.parent = parent;
        child.incoming = t.maneuver;
        child.g = tree_.at(parent).g + t.maneuver.duration;
        child.h = h(child.state);
        child.reaches_goal = goal;

        const double incumbent = best_ ? best_->cost : std::numeric_limits<double>::infinity();
        if (goal) {
            if (!(child.g < incumbent)) return std::nullopt;
            const auto id = tree_.add(std::move(child));
            improve(id, iteration);
            return id;
        }
        if (should_prune(child.g, child.h, incumbent)) {
            child.prune = PruneReason::Bound;
            return tree_.add(std::move(child));
        }
        const auto d = witnesses_.check(child.state, child.g, tree_);
        if (!d.accept) return std::nullopt;
        const State s = child.state;
        const auto id = tree_.add(std::move(child));
        if (d.displaced) tree_.prune(*d.displaced, PruneReason::Witness);
        witnesses_.record(s, id);
        return id;
    }

    void improve(std::int32_t goal_node, std::size_t iteration) {
        SolutionRecord rec;
        rec.cost = tree_.at(goal_node).g;
        rec.found_at_iteration = iteration;
        rec.goal_node = goal_node;
        rec.plan.maneuvers = maneuvers_to(goal_node);
        best_ = rec;
        const double wall =
            iteration == 0 ? 0.0
                           : std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time_).count();
        history_.push_back({iteration, wall, rec.cost});
        // Goal nodes are never expanded further.
        tree_.prune(goal_node, PruneReason::Bound);
        std::vector<std::int32_t> doomed;
        for (auto a : tree_.active())
            if (should_prune(tree_.at(a).g, tree_.at(a).h, rec.cost)) doomed.push_back(a);
        for (auto a : doomed) tree_.prune(a, PruneReason::Bound);
    }

    const Problem& problem_;
    const ManeuverProvider& provider_;
    PlannerConfig cfg_;
    DynamicsParams dynamics_;
    Rng rng_;
    SearchTree tree_;
    WitnessGrid witnesses_;
    std::optional<SolutionRecord> best_;
    std::vector<SolutionEvent> history_;
    std::size_t provider_queries_ = 0;
    std::chrono::steady_clock::time_point start_time_ = std::chrono::steady_clock::now();
};

inline PlanResult plan(const Problem& problem, const ManeuverProvider& provider, const PlannerConfig& cfg,
                       const DynamicsParams& dynamics, std::uint64_t seed) {
    Planner p(problem, provider, cfg, dynamics, seed);
    return p.run();
}

// Run log: one "iteration wall_time cost" line per incumbent improvement.
inline void write_run_log(std::ostream& os, const std::vector<SolutionEvent>& history, bool with_timing = true) {
    os << "# iteration wall_time cost\n";
    for (const auto& e : history)
        os << e.iteration << ' ' << format_number(with_timing ? e.wall_time : 0.0) << ' '
           << format_number(e.cost) << '\n';
}

// Dumps every tree edge (role "edge") followed by the incumbent solution
// edges (role "solution").
inline void write_tree(std::ostream& os, const Planner& p) {
    const auto& tree = p.tree();
    for (std::int32_t id = 1; id < static_cast<std::int32_t>(tree.size()); ++id)
        write_trajectory(os, p.edge(id), "edge");
    if (const auto& best = p.best()) {
        std::vector<std::int32_t> chain;
        for (auto n = best->goal_node; tree.at(n).parent != kNoParent; n = tree.at(n).parent) chain.push_back(n);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) write_trajectory(os, p.edge(*it), "solution");
    }
}

}  // namespace kinoplan
