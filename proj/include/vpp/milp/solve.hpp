#pragma once

#include <string>
#include <vector>

#include "vpp/milp/model.hpp"

namespace vpp::milp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(SolveStatus s);

struct SolverOptions {
    double feasibility_tol = 1e-7;   // max constraint/bound violation accepted
    double integrality_tol = 1e-6;   // |x - round(x)| accepted as integral
    double gap_tol = 1e-6;           // relative incumbent/bound gap target
    long iteration_limit = 2'000'000;  // simplex pivots per LP solve
    long node_limit = 200'000;         // branch-and-bound nodes
    long log_every = 0;                // print search progress every N nodes (0 = quiet)
};

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;  // one entry per model variable when available
    double objective = 0.0;
    double gap = 0.0;  // relative bound gap achieved (0 for proven LP optima)

    double value(VarId id) const { return values.at(static_cast<size_t>(id.index)); }
    bool has_solution() const { return !values.empty(); }
};

/// Solves the continuous relaxation (binaries treated as [0,1] ranges).
MilpSolution solve_lp(const MilpModel& model, const SolverOptions& options = {});

/// Branch-and-bound over the binary variables. Deterministic: identical
/// models produce identical solutions.
MilpSolution solve_milp(const MilpModel& model, const SolverOptions& options = {});
MilpSolution solve_milp(const MilpModel& model, double gap_tol, long node_limit);

}  // namespace vpp::milp
