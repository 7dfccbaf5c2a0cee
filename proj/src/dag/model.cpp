#include "vpp/dag/model.hpp"

#include <cmath>

namespace vpp::dag {

using milp::LinearExpr;

DagModel build_dag_model(const ContractSet& contracts, const std::vector<double>& prices,
                         LsRecovery recovery) {
    const int horizon = static_cast<int>(prices.size());
    if (horizon < 1) throw ValidationError("price profile is empty");
    for (double p : prices)
        if (!std::isfinite(p)) throw ValidationError("price profile has a non-finite entry");

    DagModel dag;
    dag.horizon = horizon;
    dag.contracts = contracts;
    dag.recovery = recovery;
    dag.handles.lc = build_lc_block(dag.model, contracts.lc, horizon, "lc");
    dag.handles.ls = build_ls_block(dag.model, contracts.ls, horizon, recovery, "ls");
    dag.handles.og = build_og_block(dag.model, contracts.og, horizon, "og");
    dag.handles.es = build_es_block(dag.model, contracts.es, horizon, "es");

    LinearExpr profit;
    for (int t = 0; t < horizon; ++t) {
        const double rho = prices[static_cast<size_t>(t)];
        for (const HourlyTotals* totals :
             {&dag.handles.lc.totals, &dag.handles.ls.totals, &dag.handles.og.totals,
              &dag.handles.es.totals}) {
            profit.add(totals->p[static_cast<size_t>(t)], rho);
            profit.add(totals->cp[static_cast<size_t>(t)], -1.0);
        }
    }
    dag.model.set_objective(std::move(profit), milp::Direction::Maximize);
    return dag;
}

namespace {

std::vector<double> values_of(const milp::MilpSolution& sol,
                              const std::vector<milp::VarId>& vars) {
    std::vector<double> out;
    out.reserve(vars.size());
    for (auto v : vars) out.push_back(sol.value(v));
    return out;
}

std::string unit_name(const std::string& given, const char* family, size_t idx) {
    return given.empty() ? std::string(family) + std::to_string(idx) : given;
}

}  // namespace

DagSchedule solve_dag_schedule(const DagModel& dag, const milp::SolverOptions& options) {
    milp::MilpSolution sol = milp::solve_milp(dag.model, options);
    DagSchedule out;
    out.status = sol.status;
    if (!sol.has_solution()) return out;
    out.objective = sol.objective;

    out.p_lc = values_of(sol, dag.handles.lc.totals.p);
    out.cp_lc = values_of(sol, dag.handles.lc.totals.cp);
    out.p_ls = values_of(sol, dag.handles.ls.totals.p);
    out.cp_ls = values_of(sol, dag.handles.ls.totals.cp);
    out.p_og = values_of(sol, dag.handles.og.totals.p);
    out.cp_og = values_of(sol, dag.handles.og.totals.cp);
    out.p_es = values_of(sol, dag.handles.es.totals.p);
    out.cp_es = values_of(sol, dag.handles.es.totals.cp);

    for (size_t i = 0; i < dag.handles.lc.units.size(); ++i) {
        UnitSchedule u;
        u.name = unit_name(dag.contracts.lc[i].name, "lc", i);
        u.family = "lc";
        u.on = values_of(sol, dag.handles.lc.units[i].y);
        u.level = u.on;
        for (double& v : u.level) v *= dag.contracts.lc[i].quantity;
        out.units.push_back(std::move(u));
    }
    for (size_t i = 0; i < dag.handles.ls.units.size(); ++i) {
        UnitSchedule u;
        u.name = unit_name(dag.contracts.ls[i].name, "ls", i);
        u.family = "ls";
        u.on = values_of(sol, dag.handles.ls.units[i].y);
        u.level = u.on;
        double eff = dag.recovery == LsRecovery::Uniform
                         ? dag.contracts.ls[i].shift_fraction * dag.contracts.ls[i].quantity
                         : dag.contracts.ls[i].quantity;
        for (double& v : u.level) v *= eff;
        out.units.push_back(std::move(u));
    }
    for (size_t i = 0; i < dag.handles.og.units.size(); ++i) {
        UnitSchedule u;
        u.name = unit_name(dag.contracts.og[i].name, "og", i);
        u.family = "og";
        u.on = values_of(sol, dag.handles.og.units[i].y);
        u.level = values_of(sol, dag.handles.og.units[i].t);
        out.units.push_back(std::move(u));
    }
    for (size_t i = 0; i < dag.handles.es.units.size(); ++i) {
        UnitSchedule u;
        u.name = unit_name(dag.contracts.es[i].name, "es", i);
        u.family = "es";
        u.on = values_of(sol, dag.handles.es.units[i].y);
        u.level = values_of(sol, dag.handles.es.units[i].t);
        out.units.push_back(std::move(u));
    }
    return out;
}

}  // namespace vpp::dag
