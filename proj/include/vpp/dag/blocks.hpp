// Per-family constraint blocks. Each builder appends one family's variables
// and rows to an existing model and returns handles to the hourly aggregate
// reduction (p) and cost (cp) variables plus the per-unit internals.
//
// Conventions shared by every family:
//   - hours are 1..H externally, 0..H-1 in the arrays;
//   - all units start the day off/idle (state at hour 0 is zero), so an
//     hour-1 start pays its initiation/startup charge;
//   - stop indicators carry one extra slot [H] pinned to the hour-H state,
//     so a run ending exactly at the horizon counts as properly stopped.
#pragma once

#include <string>
#include <vector>

#include "vpp/dag/contracts.hpp"
#include "vpp/milp/model.hpp"

namespace vpp::dag {

struct HourlyTotals {
    std::vector<milp::VarId> p;   // aggregate load reduction, MW
    std::vector<milp::VarId> cp;  // aggregate cost, $
};

struct LcUnitVars {
    std::vector<milp::VarId> y;    // on indicator, [H]
    std::vector<milp::VarId> f;    // start indicator, [H]
    std::vector<milp::VarId> w;    // stop indicator, [H+1]
    std::vector<milp::VarId> pia;  // initiation charge, [H]
};

using LsUnitVars = LcUnitVars;

struct OgUnitVars {
    std::vector<milp::VarId> y;    // commitment, [H]
    std::vector<milp::VarId> t;    // dispatch MW, [H]
    std::vector<milp::VarId> sc;   // startup cost charge, [H]
    std::vector<milp::VarId> sfc;  // startup fuel charge, [H]
};

struct EsUnitVars {
    std::vector<milp::VarId> y;  // discharging indicator, [H]
    std::vector<milp::VarId> f;  // episode start, [H]
    std::vector<milp::VarId> w;  // episode stop, [H+1]
    std::vector<milp::VarId> t;  // discharge MW, [H]
};

struct LcBlock {
    HourlyTotals totals;
    std::vector<LcUnitVars> units;
};

struct LsBlock {
    HourlyTotals totals;
    std::vector<LsUnitVars> units;
};

struct OgBlock {
    HourlyTotals totals;
    std::vector<OgUnitVars> units;
};

struct EsBlock {
    HourlyTotals totals;
    std::vector<EsUnitVars> units;
};

// `tag` prefixes every variable name so several blocks of the same family
// can coexist in one model.
LcBlock build_lc_block(milp::MilpModel& model, const std::vector<LcContract>& contracts,
                       int horizon, const std::string& tag = "lc");

LsBlock build_ls_block(milp::MilpModel& model, const std::vector<LsContract>& contracts,
                       int horizon, LsRecovery recovery = LsRecovery::Uniform,
                       const std::string& tag = "ls");

OgBlock build_og_block(milp::MilpModel& model, const std::vector<OgContract>& contracts,
                       int horizon, const std::string& tag = "og");

EsBlock build_es_block(milp::MilpModel& model, const std::vector<EsContract>& contracts,
                       int horizon, const std::string& tag = "es");

}  // namespace vpp::dag
