#pragma once

#include <utility>
#include <vector>

#include "vpp/market/vpp_model.hpp"

namespace vpp::market {

/// Relative regret needs a positive per-scenario optimum to divide by.
struct RegretUndefined : ValidationError {
    explicit RegretUndefined(const std::string& what) : ValidationError(what) {}
};

/// Best attainable profit when one scenario is certain.
struct ScenarioOptimum {
    int scenario = 0;
    double best_profit = 0.0;
};

/// Solves each scenario as its own deterministic problem (that scenario's
/// prices, wind, and ratios with probability 1) and records the optimum.
std::vector<ScenarioOptimum> solve_scenario_optima(const VppAssets& assets,
                                                   const tree::ScenarioTree& tree,
                                                   const milp::SolverOptions& options = {});

/// max over scenarios of (best - achieved) / best. Throws RegretUndefined
/// when any best profit is nonpositive.
double compute_mrr(const std::vector<ScenarioOptimum>& optima,
                   const std::vector<double>& achieved);

/// (lower, upper) envelope for the expected profit of any solution whose
/// per-scenario shortfall from optimal is capped at fraction p:
/// lower = sum w_f (1-p) best_f, upper = sum w_f best_f. Infinite p gives
/// an unbounded-below lower envelope.
std::pair<double, double> profit_bounds(const std::vector<ScenarioOptimum>& optima, double p,
                                        const std::vector<double>& weights);

struct ProbustResult {
    double p = milp::kInfinity;
    milp::SolveStatus status = milp::SolveStatus::Infeasible;
    double expected_profit = 0.0;
    std::vector<double> scenario_profit;  // achieved profit per scenario
    double mrr = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double gap = 0.0;
    VppDecision decision;

    bool feasible() const { return status == milp::SolveStatus::Optimal; }
};

/// Maximizes expected profit subject to the full offering model plus, for
/// finite p, one floor per scenario: achieved profit at least (1-p) times
/// that scenario's optimum. p = infinity drops the floors entirely.
ProbustResult solve_probust(const VppAssets& assets, const tree::ScenarioTree& tree,
                            const std::vector<ScenarioOptimum>& optima, double p,
                            const milp::SolverOptions& options = {});

/// Absolute-regret variant: floors are best_f - regret_cap dollars instead
/// of a fraction, usable when scenario optima are not all positive. The
/// reported mrr is left NaN unless every optimum is positive.
ProbustResult solve_probust_absolute(const VppAssets& assets, const tree::ScenarioTree& tree,
                                     const std::vector<ScenarioOptimum>& optima,
                                     double regret_cap,
                                     const milp::SolverOptions& options = {});

/// Descending grid of regret caps. Defaults reproduce the reference layout:
/// start at the unconstrained solution's mrr, 20 equal steps toward stop.
struct SweepGrid {
    double start = 0.0;
    double step = 0.0;
    double stop = 0.0;
};

struct SweepReport {
    std::vector<ProbustResult> rows;  // rows[0] is the unconstrained solve
    double min_feasible_p = 0.0;      // smallest p that still solved
};

/// Runs the unconstrained solve, then walks the grid downward, recording one
/// row per p. The first infeasible row is recorded and the walk stops there.
SweepReport sweep_p(const VppAssets& assets, const tree::ScenarioTree& tree,
                    const milp::SolverOptions& options = {});
SweepReport sweep_p(const VppAssets& assets, const tree::ScenarioTree& tree,
                    const SweepGrid& grid, const milp::SolverOptions& options = {});
SweepReport sweep_p(const VppAssets& assets, const tree::ScenarioTree& tree,
                    const std::vector<double>& ps, const milp::SolverOptions& options = {});

/// Bisects between 0 and the unconstrained mrr for the smallest p that still
/// admits a solution, to within tol.
double find_min_feasible_p(const VppAssets& assets, const tree::ScenarioTree& tree, double tol,
                           const milp::SolverOptions& options = {});

}  // namespace vpp::market
