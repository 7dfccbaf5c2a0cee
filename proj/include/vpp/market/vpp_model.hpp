#pragma once

#include <vector>

#include "vpp/dag/contracts.hpp"
#include "vpp/dag/model.hpp"
#include "vpp/error.hpp"
#include "vpp/milp/model.hpp"
#include "vpp/milp/solve.hpp"
#include "vpp/tree/scenario_tree.hpp"

namespace vpp::market {

/// Inputs the model was asked to assemble do not fit together: broken tree,
/// mismatched horizons, negative capacities.
struct ModelAssemblyError : ValidationError {
    explicit ModelAssemblyError(const std::string& what) : ValidationError(what) {}
};

/// A decision handed to the settlement arithmetic is not usable as-is
/// (wrong dimensions, negative deviations).
struct InvalidDecision : ValidationError {
    explicit InvalidDecision(const std::string& what) : ValidationError(what) {}
};

struct VppAssets {
    double wind_capacity = 0.0;   // registered wind capacity, MW
    double expansion_cap = 0.0;   // additional schedulable headroom, MW
    dag::ContractSet contracts;
    dag::LsRecovery recovery = dag::LsRecovery::Uniform;

    // largest total the plant may schedule or be short by in any hour
    double schedule_cap() const { return wind_capacity + expansion_cap; }
};

/// Stage at which the intraday offer is fixed. Branch: one offer per
/// (day-ahead, intraday) price branch, decided before wind and balancing
/// state are known. Free: one offer per scenario (clairvoyant bound).
enum class InMode { Branch, Free };

/// Per-scenario variable handles, one entry per hour.
struct ScenarioVars {
    std::vector<milp::VarId> da;         // day-ahead offer
    std::vector<milp::VarId> sc;         // scheduled total
    std::vector<milp::VarId> wind_da;    // wind share of the day-ahead offer
    std::vector<milp::VarId> comp_da;    // contract share of the day-ahead offer
    std::vector<milp::VarId> wind_sc;    // wind share of the schedule
    std::vector<milp::VarId> surplus;    // delivery above schedule
    std::vector<milp::VarId> shortfall;  // delivery below schedule
};

/// Per-(da,id)-branch handles: the intraday offer, its split, the contract
/// schedule total, and the contract blocks dispatched at this stage.
struct BranchVars {
    std::vector<milp::VarId> in;       // intraday offer
    std::vector<milp::VarId> wind_in;  // wind share of the intraday offer
    std::vector<milp::VarId> comp_in;  // contract share of the intraday offer
    std::vector<milp::VarId> comp_sc;  // contract schedule total
    dag::DagBlockHandles blocks;
};

struct VppModel {
    milp::MilpModel model;
    tree::ScenarioTree tree;
    VppAssets assets;
    InMode in_mode = InMode::Branch;
    int horizon = 0;
    std::vector<ScenarioVars> scen;     // by scenario index
    std::vector<BranchVars> branch;     // by da_branch * n_id + id_branch
    bool offer_curves_added = false;

    int branch_of(int scenario) const {
        const tree::Scenario& s = tree.scenarios[static_cast<size_t>(scenario)];
        return s.da_branch * tree.n_id + s.id_branch;
    }
};

/// Assembles the scenario-weighted offering problem: expected market revenue
/// (day-ahead, intraday, deviation settlement) minus contract costs, with the
/// schedule/offer splits per market stage and the deviation accounting rows.
/// Offer ordering across scenarios is added separately by
/// add_offer_curve_constraints.
VppModel build_vpp_model(const VppAssets& assets, const tree::ScenarioTree& tree,
                         InMode in_mode = InMode::Branch);

/// Installs day-ahead offer coherence across scenarios at each hour: equal
/// prices force equal offers, higher prices may not offer less. Prices are
/// compared with relative tolerance 1e-9.
void add_offer_curve_constraints(VppModel& vm);

/// Everything the plant decided, read back from a solution.
/// All arrays are [scenario][hour]; branch-stage values are copied to every
/// scenario in the branch.
struct VppDecision {
    int horizon = 0;
    std::vector<std::vector<double>> da, in, sc;
    std::vector<std::vector<double>> surplus, shortfall;
    std::vector<std::vector<double>> comp_da, comp_in, comp_sc;
    std::vector<std::vector<double>> comp_delivered;  // realized contract output
    std::vector<std::vector<double>> comp_cost;       // contract cost, $
    std::vector<std::vector<double>> wind_sc;
};

VppDecision extract_decision(const VppModel& vm, const milp::MilpSolution& sol);

struct ProfitBreakdown {
    double da_revenue = 0.0;
    double in_revenue = 0.0;
    double surplus_revenue = 0.0;
    double shortfall_cost = 0.0;
    double component_cost = 0.0;
    double total = 0.0;  // da + in + surplus - shortfall - component
};

/// Recomputes one scenario's settlement from scratch. Independent of the
/// solver: used to cross-check objectives and to price fixed decisions
/// under other scenarios.
ProfitBreakdown evaluate_profit(const VppDecision& decision, const tree::Scenario& scenario);

}  // namespace vpp::market
