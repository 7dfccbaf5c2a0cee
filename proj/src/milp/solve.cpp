#include "vpp/milp/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

#include "lp_engine.hpp"

namespace vpp::milp {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

MilpSolution solve_lp(const MilpModel& model, const SolverOptions& options) {
    detail::LpEngine engine;
    engine.load(model, options);
    MilpSolution out;
    out.status = engine.solve();
    if (out.status == SolveStatus::Optimal) {
        engine.extract_values(out.values);
        out.objective = engine.objective_value();
        out.gap = 0.0;
    }
    return out;
}

namespace {

struct BBNode {
    int parent = -1;
    int var = -1;        // model variable branched on
    int value = 0;       // fixed to 0 or 1
    double bound = 0.0;  // parent LP objective, user space
    double frac = 0.0;   // fractional part moved by this branch (for pseudocosts)
};

// Best-bound ordering with newest-node tiebreak: on the flat bound plateaus
// these searches produce, preferring the deeper node keeps the basis warm.
struct NodeOrder {
    bool maximize;
    bool operator()(const std::pair<double, int>& a, const std::pair<double, int>& b) const {
        if (a.first != b.first) return maximize ? a.first < b.first : a.first > b.first;
        return a.second < b.second;
    }
};

// Per-variable average objective degradation per unit of fraction removed.
struct Pseudocost {
    std::vector<double> sum_up, sum_dn;
    std::vector<long> n_up, n_dn;

    explicit Pseudocost(size_t n) : sum_up(n, 0.0), sum_dn(n, 0.0), n_up(n, 0), n_dn(n, 0) {}

    void record(int var, int value, double degradation, double frac) {
        double moved = value == 1 ? 1.0 - frac : frac;
        if (moved < 1e-6) return;
        double rate = degradation / moved;
        if (value == 1) {
            sum_up[static_cast<size_t>(var)] += rate;
            ++n_up[static_cast<size_t>(var)];
        } else {
            sum_dn[static_cast<size_t>(var)] += rate;
            ++n_dn[static_cast<size_t>(var)];
        }
        gsum_ += rate;
        ++gn_;
    }

    double up(int var, double fallback) const {
        long n = n_up[static_cast<size_t>(var)];
        return n > 0 ? sum_up[static_cast<size_t>(var)] / static_cast<double>(n) : fallback;
    }
    double dn(int var, double fallback) const {
        long n = n_dn[static_cast<size_t>(var)];
        return n > 0 ? sum_dn[static_cast<size_t>(var)] / static_cast<double>(n) : fallback;
    }

    // average observed rate across all variables, the usual prior for
    // not-yet-branched candidates
    double fallback() const { return gn_ > 0 ? gsum_ / static_cast<double>(gn_) : 1.0; }

  private:
    double gsum_ = 0.0;
    long gn_ = 0;
};

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const SolverOptions& options) {
    const bool maximize = model.direction() == Direction::Maximize;
    auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };

    std::vector<int> binaries;
    for (int j = 0; j < model.num_variables(); ++j)
        if (model.variables()[static_cast<size_t>(j)].kind == VarKind::Binary)
            binaries.push_back(j);

    detail::LpEngine engine;
    engine.load(model, options);

    MilpSolution out;
    SolveStatus root = engine.solve();
    if (root != SolveStatus::Optimal) {
        out.status = root;
        return out;
    }

    const double root_obj = engine.objective_value();
    std::vector<double> root_margin;
    engine.reduced_cost_margins(root_margin);

    std::vector<BBNode> arena;
    arena.push_back(BBNode{-1, -1, 0, root_obj, 0.0});

    NodeOrder order{maximize};
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, NodeOrder>
        open(order);
    open.emplace(arena[0].bound, 0);

    Pseudocost pc(static_cast<size_t>(model.num_variables()));

    bool have_incumbent = false;
    double incumbent_obj = 0.0;
    std::vector<double> incumbent;
    std::vector<int> path;  // scratch for bound application

    auto slack_for = [&](double ref) {
        return options.gap_tol * std::max(1.0, std::fabs(ref));
    };
    auto worth_exploring = [&](double bound) {
        if (!have_incumbent) return true;
        double slack = slack_for(incumbent_obj);
        return maximize ? bound > incumbent_obj + slack : bound < incumbent_obj - slack;
    };

    // Reduced-cost fixing: once the incumbent is within |d_j| of the root
    // bound, flipping binary j off its root-relaxation bound can no longer
    // reach a better solution, so pin it model-wide.
    std::vector<char> perm_fixed(static_cast<size_t>(model.num_variables()), 0);
    long fixed_total = 0;
    auto apply_reduced_cost_fixing = [&]() {
        for (int j : binaries) {
            if (perm_fixed[static_cast<size_t>(j)]) continue;
            double mg = root_margin[static_cast<size_t>(j)];
            if (mg == 0.0) continue;
            double flipped = maximize ? root_obj - std::fabs(mg) : root_obj + std::fabs(mg);
            if (worth_exploring(flipped)) continue;
            double v = mg > 0.0 ? 0.0 : 1.0;
            engine.tighten_model_bounds(j, v, v);
            perm_fixed[static_cast<size_t>(j)] = 1;
            ++fixed_total;
        }
    };

    long nodes_processed = 0;
    bool hit_node_limit = false;
    double best_open_bound = arena[0].bound;
    int applied_node = -1;  // node whose branching path the engine currently holds

    while (!open.empty()) {
        int node_id = open.top().second;
        open.pop();
        if (!worth_exploring(arena[static_cast<size_t>(node_id)].bound)) continue;

        // Plunge: walk down from the selected node, always following the child
        // nearer the LP value. The engine keeps its basis between these solves,
        // so each step costs a handful of pivots, and leaves yield incumbents.
        while (node_id >= 0) {
            const BBNode node = arena[static_cast<size_t>(node_id)];
            if (!worth_exploring(node.bound)) break;
            if (nodes_processed >= options.node_limit) {
                hit_node_limit = true;
                best_open_bound = node.bound;
                break;
            }
            ++nodes_processed;
            if (options.log_every > 0 && nodes_processed % options.log_every == 0)
                std::fprintf(stderr,
                             "  node %ld: open %zu incumbent %s bound %.6f lp-iters %ld "
                             "fixed %ld\n",
                             nodes_processed, open.size(),
                             have_incumbent ? std::to_string(incumbent_obj).c_str() : "none",
                             node.bound, engine.iterations(), fixed_total);

            if (node.parent == applied_node && node_id != 0) {
                // plunging: this path extends the applied one by a single fix
                engine.set_variable_bounds(node.var, node.value, node.value);
            } else {
                path.clear();
                for (int id = node_id; id > 0; id = arena[static_cast<size_t>(id)].parent)
                    path.push_back(id);
                engine.reset_variable_bounds();
                for (auto it = path.rbegin(); it != path.rend(); ++it) {
                    const BBNode& n = arena[static_cast<size_t>(*it)];
                    engine.set_variable_bounds(n.var, n.value, n.value);
                }
            }
            applied_node = node_id;

            SolveStatus st = engine.solve();
            if (st == SolveStatus::Infeasible) break;
            if (st == SolveStatus::Unbounded) {
                out.status = SolveStatus::Unbounded;
                return out;
            }
            if (st == SolveStatus::IterationLimit) {
                hit_node_limit = true;
                best_open_bound = node.bound;
                break;
            }

            double obj = engine.objective_value();
            if (node_id != 0) {
                double degradation = maximize ? node.bound - obj : obj - node.bound;
                pc.record(node.var, node.value, std::max(degradation, 0.0), node.frac);
            }
            if (!worth_exploring(obj)) break;

            // branch on the binary with the best pseudocost product score
            double prior = pc.fallback();
            int branch_var = -1;
            double branch_value = 0.0;
            double branch_score = -1.0;
            for (int j : binaries) {
                double v = engine.structural_value(j);
                double frac = v - std::floor(v);
                double dist = std::min(frac, 1.0 - frac);
                if (dist <= options.integrality_tol) continue;
                double score = std::max(pc.dn(j, prior) * frac, 1e-6) *
                               std::max(pc.up(j, prior) * (1.0 - frac), 1e-6);
                if (score > branch_score) {
                    branch_score = score;
                    branch_var = j;
                    branch_value = v;
                }
            }

            if (branch_var < 0) {
                // integral: new incumbent
                if (!have_incumbent || better(obj, incumbent_obj)) {
                    have_incumbent = true;
                    incumbent_obj = obj;
                    engine.extract_values(incumbent);
                    apply_reduced_cost_fixing();
                }
                break;
            }

            double frac = branch_value - std::floor(branch_value);
            int near = branch_value >= 0.5 ? 1 : 0;
            int id_near = static_cast<int>(arena.size());
            arena.push_back(BBNode{node_id, branch_var, near, obj, frac});
            int id_far = static_cast<int>(arena.size());
            arena.push_back(BBNode{node_id, branch_var, 1 - near, obj, frac});

            open.emplace(obj, id_far);
            node_id = id_near;  // keep plunging toward the LP point
        }
        if (hit_node_limit) break;
    }

    if (!have_incumbent) {
        out.status = hit_node_limit ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
        return out;
    }

    // Polish: re-solve with binaries pinned at their rounded values so the
    // reported point is exactly integral and the continuous part re-optimized.
    engine.reset_variable_bounds();
    for (int j : binaries) {
        double r = std::round(incumbent[static_cast<size_t>(j)]);
        engine.set_variable_bounds(j, r, r);
    }
    if (engine.solve() == SolveStatus::Optimal) {
        engine.extract_values(incumbent);
        incumbent_obj = engine.objective_value();
    }
    engine.reset_variable_bounds();

    out.values = std::move(incumbent);
    out.objective = incumbent_obj;
    if (hit_node_limit) {
        if (!open.empty())
            best_open_bound = maximize ? std::max(best_open_bound, open.top().first)
                                       : std::min(best_open_bound, open.top().first);
        out.status = SolveStatus::IterationLimit;
        out.gap = std::fabs(best_open_bound - incumbent_obj) /
                  std::max(1.0, std::fabs(incumbent_obj));
    } else {
        out.status = SolveStatus::Optimal;
        out.gap = 0.0;
    }
    return out;
}

MilpSolution solve_milp(const MilpModel& model, double gap_tol, long node_limit) {
    SolverOptions options;
    options.gap_tol = gap_tol;
    options.node_limit = node_limit;
    return solve_milp(model, options);
}

}  // namespace vpp::milp
