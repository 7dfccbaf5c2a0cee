// Self-scheduling of the aggregated contract portfolio against a known
// day-ahead price profile: pick runs, commitments, and dispatch maximizing
// hourly revenue minus contract cost.
#pragma once

#include <string>
#include <vector>

#include "vpp/dag/blocks.hpp"
#include "vpp/dag/contracts.hpp"
#include "vpp/milp/model.hpp"
#include "vpp/milp/solve.hpp"

namespace vpp::dag {

struct DagBlockHandles {
    LcBlock lc;
    LsBlock ls;
    OgBlock og;
    EsBlock es;
};

struct DagModel {
    milp::MilpModel model;
    DagBlockHandles handles;
    ContractSet contracts;
    LsRecovery recovery = LsRecovery::Uniform;
    int horizon = 0;
};

// Assembles all four families and sets the profit objective
// sum_h price_h * (p_lc + p_ls + p_og + p_es) - (cp_lc + cp_ls + cp_og + cp_es).
// An empty contract set yields a valid model with objective 0.
DagModel build_dag_model(const ContractSet& contracts, const std::vector<double>& prices,
                         LsRecovery recovery = LsRecovery::Uniform);

struct UnitSchedule {
    std::string name;
    std::string family;         // "lc", "ls", "og", "es"
    std::vector<double> on;     // hourly on/committed state
    std::vector<double> level;  // hourly delivered MW
};

struct DagSchedule {
    milp::SolveStatus status = milp::SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> p_lc, p_ls, p_og, p_es;      // hourly aggregate MW
    std::vector<double> cp_lc, cp_ls, cp_og, cp_es;  // hourly aggregate $
    std::vector<UnitSchedule> units;

    bool has_schedule() const { return status == milp::SolveStatus::Optimal; }
};

DagSchedule solve_dag_schedule(const DagModel& dag, const milp::SolverOptions& options = {});

}  // namespace vpp::dag
