#include "vpp/market/probust.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace vpp::market {

namespace {

tree::ScenarioTree certain_tree(const tree::ScenarioTree& t, int f) {
    tree::ScenarioTree one;
    one.horizon = t.horizon;
    one.n_wind = one.n_da = one.n_id = one.n_bal = 1;
    tree::Scenario s = t.scenarios[static_cast<size_t>(f)];
    s.index = 0;
    s.probability = 1.0;
    s.wind_branch = s.da_branch = s.id_branch = s.bal_branch = 0;
    one.scenarios.push_back(std::move(s));
    return one;
}

void check_optima(const tree::ScenarioTree& tree,
                  const std::vector<ScenarioOptimum>& optima) {
    if (optima.size() != tree.scenarios.size())
        throw ModelAssemblyError("need one scenario optimum per scenario");
    for (size_t f = 0; f < optima.size(); ++f) {
        if (optima[f].scenario != static_cast<int>(f))
            throw ModelAssemblyError("scenario optima out of order");
        if (!std::isfinite(optima[f].best_profit))
            throw ModelAssemblyError("scenario optimum not finite");
    }
}

/// One scenario's profit as a linear expression over the model variables.
milp::LinearExpr scenario_profit_expr(const VppModel& vm, int f) {
    const tree::Scenario& s = vm.tree.scenarios[static_cast<size_t>(f)];
    const ScenarioVars& sv = vm.scen[static_cast<size_t>(f)];
    const BranchVars& bv = vm.branch[static_cast<size_t>(vm.branch_of(f))];
    milp::LinearExpr e;
    for (int t = 0; t < vm.horizon; ++t) {
        size_t ht = static_cast<size_t>(t);
        e.add(sv.da[ht], s.da_price[ht]);
        e.add(bv.in[ht], s.id_price[ht]);
        e.add(sv.surplus[ht], s.da_price[ht] * s.up_ratio[ht]);
        e.add(sv.shortfall[ht], -s.da_price[ht] * s.down_ratio[ht]);
        e.add(bv.blocks.lc.totals.cp[ht], -1.0);
        e.add(bv.blocks.ls.totals.cp[ht], -1.0);
        e.add(bv.blocks.og.totals.cp[ht], -1.0);
        e.add(bv.blocks.es.totals.cp[ht], -1.0);
    }
    return e;
}

ProbustResult run_with_floors(const VppAssets& assets, const tree::ScenarioTree& tree,
                              const std::vector<ScenarioOptimum>& optima, double p,
                              const std::vector<double>& floors,
                              const milp::SolverOptions& options) {
    VppModel vm = build_vpp_model(assets, tree);
    add_offer_curve_constraints(vm);
    for (size_t f = 0; f < floors.size(); ++f) {
        if (!std::isfinite(floors[f])) continue;
        vm.model.add_constraint(scenario_profit_expr(vm, static_cast<int>(f)), milp::Sense::Ge,
                                floors[f], "floor_s" + std::to_string(f));
    }

    ProbustResult r;
    r.p = p;
    milp::MilpSolution sol = milp::solve_milp(vm.model, options);
    r.status = sol.status;
    r.gap = sol.gap;

    std::vector<double> weights;
    double up = 0.0;
    for (const auto& s : tree.scenarios) weights.push_back(s.probability);
    for (size_t f = 0; f < optima.size(); ++f) up += weights[f] * optima[f].best_profit;
    r.upper_bound = up;
    r.lower_bound = -milp::kInfinity;
    if (std::isfinite(p)) {
        auto [lb, ub] = profit_bounds(optima, p, weights);
        r.lower_bound = lb;
        r.upper_bound = ub;
    }

    if (r.status != milp::SolveStatus::Optimal) {
        r.expected_profit = std::numeric_limits<double>::quiet_NaN();
        r.mrr = std::numeric_limits<double>::quiet_NaN();
        return r;
    }

    r.decision = extract_decision(vm, sol);
    r.expected_profit = 0.0;
    for (const auto& s : tree.scenarios) {
        double z = evaluate_profit(r.decision, s).total;
        r.scenario_profit.push_back(z);
        r.expected_profit += s.probability * z;
    }
    bool all_positive = true;
    for (const auto& o : optima) all_positive = all_positive && o.best_profit > 0.0;
    r.mrr = all_positive ? compute_mrr(optima, r.scenario_profit)
                         : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace

std::vector<ScenarioOptimum> solve_scenario_optima(const VppAssets& assets,
                                                   const tree::ScenarioTree& tree,
                                                   const milp::SolverOptions& options) {
    std::vector<ScenarioOptimum> out;
    for (int f = 0; f < tree.size(); ++f) {
        VppModel vm = build_vpp_model(assets, certain_tree(tree, f));
        milp::MilpSolution sol = milp::solve_milp(vm.model, options);
        if (sol.status != milp::SolveStatus::Optimal)
            throw SolverError("scenario " + std::to_string(f) +
                              " optimum solve ended " + milp::to_string(sol.status));
        out.push_back({f, sol.objective});
    }
    return out;
}

double compute_mrr(const std::vector<ScenarioOptimum>& optima,
                   const std::vector<double>& achieved) {
    if (optima.size() != achieved.size())
        throw ModelAssemblyError("mrr needs one achieved profit per optimum");
    double worst = -milp::kInfinity;
    for (size_t f = 0; f < optima.size(); ++f) {
        double best = optima[f].best_profit;
        if (!(best > 0.0))
            throw RegretUndefined("scenario " + std::to_string(optima[f].scenario) +
                                  " optimum is nonpositive; relative regret undefined, use "
                                  "the absolute-regret variant");
        worst = std::max(worst, (best - achieved[f]) / best);
    }
    return worst;
}

std::pair<double, double> profit_bounds(const std::vector<ScenarioOptimum>& optima, double p,
                                        const std::vector<double>& weights) {
    if (optima.size() != weights.size())
        throw ModelAssemblyError("profit_bounds needs one weight per optimum");
    double ub = 0.0;
    for (size_t f = 0; f < optima.size(); ++f) ub += weights[f] * optima[f].best_profit;
    if (!std::isfinite(p)) return {-milp::kInfinity, ub};
    double lb = 0.0;
    for (size_t f = 0; f < optima.size(); ++f)
        lb += weights[f] * (1.0 - p) * optima[f].best_profit;
    return {lb, ub};
}

ProbustResult solve_probust(const VppAssets& assets, const tree::ScenarioTree& tree,
                            const std::vector<ScenarioOptimum>& optima, double p,
                            const milp::SolverOptions& options) {
    check_optima(tree, optima);
    if (std::isnan(p) || p < 0.0) throw ModelAssemblyError("p must be nonnegative or infinite");
    if (!std::isfinite(p)) return run_with_floors(assets, tree, optima, p, {}, options);
    std::vector<double> floors(optima.size());
    for (size_t f = 0; f < optima.size(); ++f) {
        if (!(optima[f].best_profit > 0.0))
            throw RegretUndefined("scenario " + std::to_string(f) +
                                  " optimum is nonpositive; relative regret undefined, use "
                                  "the absolute-regret variant");
        floors[f] = (1.0 - p) * optima[f].best_profit;
    }
    return run_with_floors(assets, tree, optima, p, floors, options);
}

ProbustResult solve_probust_absolute(const VppAssets& assets, const tree::ScenarioTree& tree,
                                     const std::vector<ScenarioOptimum>& optima,
                                     double regret_cap, const milp::SolverOptions& options) {
    check_optima(tree, optima);
    if (!(regret_cap >= 0.0)) throw ModelAssemblyError("regret cap must be nonnegative");
    std::vector<double> floors;
    for (const auto& o : optima) floors.push_back(o.best_profit - regret_cap);
    ProbustResult r = run_with_floors(assets, tree, optima, regret_cap, floors, options);
    return r;
}

SweepReport sweep_p(const VppAssets& assets, const tree::ScenarioTree& tree,
                    const milp::SolverOptions& options) {
    return sweep_p(assets, tree, SweepGrid{}, options);
}

SweepReport sweep_p(const VppAssets& assets, const tree::ScenarioTree& tree,
                    const SweepGrid& grid, const milp::SolverOptions& options) {
    std::vector<ScenarioOptimum> optima = solve_scenario_optima(assets, tree, options);
    SweepReport report;
    ProbustResult neutral =
        solve_probust(assets, tree, optima, milp::kInfinity, options);
    if (!neutral.feasible())
        throw SolverError("unconstrained offering solve ended " +
                          milp::to_string(neutral.status));
    double start = grid.start > 0.0 ? grid.start : neutral.mrr;
    double step = grid.step > 0.0 ? grid.step : start / 20.0;
    double stop = grid.stop;
    report.rows.push_back(std::move(neutral));
    report.min_feasible_p = milp::kInfinity;

    if (!(start > 0.0)) {
        // unconstrained solution already optimal everywhere: one p=0 row
        ProbustResult row = solve_probust(assets, tree, optima, 0.0, options);
        report.min_feasible_p = row.feasible() ? 0.0 : milp::kInfinity;
        report.rows.push_back(std::move(row));
        return report;
    }

    for (double p = start; p >= stop - 1e-12; p -= step) {
        ProbustResult row = solve_probust(assets, tree, optima, std::max(p, 0.0), options);
        bool ok = row.feasible();
        if (ok) report.min_feasible_p = std::max(p, 0.0);
        report.rows.push_back(std::move(row));
        if (!ok) break;  // the first infeasible row is recorded, then stop
        if (step <= 0.0) break;
    }
    return report;
}

SweepReport sweep_p(const VppAssets& assets, const tree::ScenarioTree& tree,
                    const std::vector<double>& ps, const milp::SolverOptions& options) {
    std::vector<ScenarioOptimum> optima = solve_scenario_optima(assets, tree, options);
    SweepReport report;
    ProbustResult neutral = solve_probust(assets, tree, optima, milp::kInfinity, options);
    report.rows.push_back(std::move(neutral));
    report.min_feasible_p = milp::kInfinity;
    for (double p : ps) {
        ProbustResult row = solve_probust(assets, tree, optima, p, options);
        bool ok = row.feasible();
        if (ok) report.min_feasible_p = std::min(report.min_feasible_p, p);
        report.rows.push_back(std::move(row));
        if (!ok) break;
    }
    return report;
}

double find_min_feasible_p(const VppAssets& assets, const tree::ScenarioTree& tree, double tol,
                           const milp::SolverOptions& options) {
    if (!(tol > 0.0)) throw ModelAssemblyError("bisection tolerance must be positive");
    std::vector<ScenarioOptimum> optima = solve_scenario_optima(assets, tree, options);
    ProbustResult neutral = solve_probust(assets, tree, optima, milp::kInfinity, options);
    if (!neutral.feasible())
        throw SolverError("unconstrained offering solve ended " +
                          milp::to_string(neutral.status));
    double hi = std::max(neutral.mrr, 0.0);

    if (solve_probust(assets, tree, optima, 0.0, options).feasible()) return 0.0;
    if (!solve_probust(assets, tree, optima, hi, options).feasible())
        throw SolverError(
            "offering problem infeasible at the unconstrained solution's own regret level");

    double lo = 0.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (solve_probust(assets, tree, optima, mid, options).feasible())
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace vpp::market
