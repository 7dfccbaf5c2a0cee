#include "vpp/dag/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace vpp::dag {

using milp::LinearExpr;
using milp::MilpModel;
using milp::Sense;
using milp::VarId;

namespace {

std::string display_name(const std::string& name, const std::string& tag, size_t idx) {
    return name.empty() ? tag + "[" + std::to_string(idx) + "]" : name;
}

std::string hour_name(const std::string& stem, int t) {
    return stem + "_h" + std::to_string(t + 1);
}

// Start/stop bookkeeping shared by LC, LS, and ES units: f/w are start/stop
// indicators consistent with the on-state y, at most one fires per hour,
// and the extra stop slot w[H] mirrors the hour-H state.
struct RunVars {
    std::vector<VarId> y, f, w;
};

RunVars add_run_logic(MilpModel& model, int horizon, const std::string& stem) {
    RunVars rv;
    for (int t = 0; t < horizon; ++t) rv.y.push_back(model.add_binary(hour_name(stem + "_y", t)));
    for (int t = 0; t < horizon; ++t) rv.f.push_back(model.add_binary(hour_name(stem + "_f", t)));
    for (int t = 0; t < horizon; ++t) rv.w.push_back(model.add_binary(hour_name(stem + "_w", t)));
    // determined by the equality below, so it can stay continuous
    rv.w.push_back(model.add_continuous(hour_name(stem + "_w", horizon), 0.0, 1.0));

    for (int t = 0; t < horizon; ++t) {
        LinearExpr delta;
        delta.add(rv.f[t], 1.0);
        delta.add(rv.w[t], -1.0);
        delta.add(rv.y[t], -1.0);
        if (t > 0) delta.add(rv.y[t - 1], 1.0);
        model.add_constraint(std::move(delta), Sense::Eq, 0.0, hour_name(stem + "_delta", t));

        LinearExpr excl;
        excl.add(rv.f[t], 1.0);
        excl.add(rv.w[t], 1.0);
        model.add_constraint(std::move(excl), Sense::Le, 1.0, hour_name(stem + "_excl", t));
    }
    LinearExpr tail;
    tail.add(rv.w[horizon], 1.0);
    tail.add(rv.y[horizon - 1], -1.0);
    model.add_constraint(std::move(tail), Sense::Eq, 0.0, stem + "_tail");
    return rv;
}

// Each started run must keep y up for at least `len` hours; starts too close
// to the horizon to finish are forbidden by the truncated window.
void add_min_run(MilpModel& model, const RunVars& rv, int horizon, int len,
                 const std::string& stem) {
    for (int t = 0; t < horizon; ++t) {
        LinearExpr e;
        for (int u = t; u <= std::min(t + len - 1, horizon - 1); ++u) e.add(rv.y[u], 1.0);
        e.add(rv.f[t], -static_cast<double>(len));
        model.add_constraint(std::move(e), Sense::Ge, 0.0, hour_name(stem + "_minrun", t));
    }
}

// A stop must fall within `len` hours of each start; the window reaches the
// w[H] slot so a run ending exactly at the horizon is legal.
void add_max_run(MilpModel& model, const RunVars& rv, int horizon, int len,
                 const std::string& stem) {
    for (int t = 0; t < horizon; ++t) {
        LinearExpr e;
        for (int u = t + 1; u <= std::min(t + len, horizon); ++u) e.add(rv.w[u], 1.0);
        e.add(rv.f[t], -1.0);
        model.add_constraint(std::move(e), Sense::Ge, 0.0, hour_name(stem + "_maxrun", t));
    }
}

void add_run_count(MilpModel& model, const RunVars& rv, int horizon, int count,
                   const std::string& stem) {
    LinearExpr e;
    for (int t = 0; t < horizon; ++t) e.add(rv.f[t], 1.0);
    model.add_constraint(std::move(e), Sense::Le, static_cast<double>(count), stem + "_runs");
}

HourlyTotals add_totals(MilpModel& model, int horizon, const std::string& tag) {
    HourlyTotals totals;
    for (int t = 0; t < horizon; ++t)
        totals.p.push_back(model.add_continuous(hour_name("p_" + tag, t), -milp::kInfinity,
                                                milp::kInfinity));
    for (int t = 0; t < horizon; ++t)
        totals.cp.push_back(model.add_continuous(hour_name("cp_" + tag, t), -milp::kInfinity,
                                                 milp::kInfinity));
    return totals;
}

// Pins total[t] = sum of contributions[t] once all units are in.
void pin_totals(MilpModel& model, const HourlyTotals& totals, std::vector<LinearExpr> p_sum,
                std::vector<LinearExpr> cp_sum, int horizon, const std::string& tag) {
    for (int t = 0; t < horizon; ++t) {
        LinearExpr p = std::move(p_sum[static_cast<size_t>(t)]);
        p.add(totals.p[static_cast<size_t>(t)], -1.0);
        model.add_constraint(std::move(p), Sense::Eq, 0.0, hour_name("def_p_" + tag, t));
        LinearExpr cp = std::move(cp_sum[static_cast<size_t>(t)]);
        cp.add(totals.cp[static_cast<size_t>(t)], -1.0);
        model.add_constraint(std::move(cp), Sense::Eq, 0.0, hour_name("def_cp_" + tag, t));
    }
}

void require_horizon(int horizon) {
    if (horizon < 1) throw ValidationError("horizon must be at least 1 hour");
}

void check_durations(int min_duration, int max_duration, int horizon, const std::string& who) {
    if (min_duration < 1)
        throw MalformedContract(who + ": min_duration must be at least 1");
    if (min_duration > max_duration)
        throw MalformedContract(who + ": min_duration exceeds max_duration");
    if (min_duration > horizon)
        throw UnschedulableContract(who + ": min_duration " + std::to_string(min_duration) +
                                    " exceeds the " + std::to_string(horizon) + "-hour horizon");
    if (max_duration > horizon)
        throw MalformedContract(who + ": max_duration exceeds the horizon");
}

void check_window(const std::vector<int>& window, int horizon, const std::string& who,
                  const char* label) {
    std::unordered_set<int> seen;
    for (int h : window) {
        if (h < 1 || h > horizon)
            throw MalformedContract(who + ": " + label + " hour " + std::to_string(h) +
                                    " is outside 1.." + std::to_string(horizon));
        if (!seen.insert(h).second)
            throw MalformedContract(who + ": duplicate " + std::string(label) + " hour " +
                                    std::to_string(h));
    }
}

}  // namespace

LcBlock build_lc_block(MilpModel& model, const std::vector<LcContract>& contracts, int horizon,
                       const std::string& tag) {
    require_horizon(horizon);
    LcBlock block;
    block.totals = add_totals(model, horizon, tag);
    std::vector<LinearExpr> p_sum(static_cast<size_t>(horizon));
    std::vector<LinearExpr> cp_sum(static_cast<size_t>(horizon));

    for (size_t i = 0; i < contracts.size(); ++i) {
        const LcContract& c = contracts[i];
        const std::string who = display_name(c.name, tag, i);
        const std::string stem = tag + std::to_string(i);
        if (c.quantity < 0) throw MalformedContract(who + ": negative quantity");
        if (c.max_daily_curtailments < 1)
            throw MalformedContract(who + ": max_daily_curtailments must be at least 1");
        check_durations(c.min_duration, c.max_duration, horizon, who);

        RunVars rv = add_run_logic(model, horizon, stem);
        add_min_run(model, rv, horizon, c.min_duration, stem);
        add_max_run(model, rv, horizon, c.max_duration, stem);
        add_run_count(model, rv, horizon, c.max_daily_curtailments, stem);

        LcUnitVars unit;
        unit.y = rv.y;
        unit.f = rv.f;
        unit.w = rv.w;
        for (int t = 0; t < horizon; ++t) {
            VarId pia = model.add_continuous(hour_name(stem + "_pia", t), 0.0, milp::kInfinity);
            unit.pia.push_back(pia);
            LinearExpr trig;
            trig.add(pia, 1.0);
            trig.add(rv.f[t], -c.initiation_cost);
            model.add_constraint(std::move(trig), Sense::Ge, 0.0, hour_name(stem + "_init", t));

            p_sum[static_cast<size_t>(t)].add(rv.y[t], c.quantity);
            cp_sum[static_cast<size_t>(t)].add(pia, 1.0);
            cp_sum[static_cast<size_t>(t)].add(rv.y[t], c.price * c.quantity);
        }
        block.units.push_back(std::move(unit));
    }
    pin_totals(model, block.totals, std::move(p_sum), std::move(cp_sum), horizon, tag);
    return block;
}

LsBlock build_ls_block(MilpModel& model, const std::vector<LsContract>& contracts, int horizon,
                       LsRecovery recovery, const std::string& tag) {
    require_horizon(horizon);
    LsBlock block;
    block.totals = add_totals(model, horizon, tag);
    std::vector<LinearExpr> p_sum(static_cast<size_t>(horizon));
    std::vector<LinearExpr> cp_sum(static_cast<size_t>(horizon));

    for (size_t i = 0; i < contracts.size(); ++i) {
        const LsContract& c = contracts[i];
        const std::string who = display_name(c.name, tag, i);
        const std::string stem = tag + std::to_string(i);
        if (c.quantity < 0) throw MalformedContract(who + ": negative quantity");
        if (c.shift_fraction < 0.0 || c.shift_fraction > 1.0)
            throw MalformedContract(who + ": shift_fraction outside [0, 1]");
        check_durations(c.min_duration, c.max_duration, horizon, who);
        check_window(c.reduction_window, horizon, who, "reduction window");
        check_window(c.recovery_window, horizon, who, "recovery window");
        if (c.reduction_window.empty())
            throw UnschedulableContract(who + ": empty reduction window");
        // Under uniform recovery the deliverable reduction is the shiftable
        // share of the customer load; the literal block uses the full
        // quantity and returns nothing.
        const double effective =
            recovery == LsRecovery::Uniform ? c.shift_fraction * c.quantity : c.quantity;
        const bool recovers = recovery == LsRecovery::Uniform && effective > 0.0;
        if (recovers && c.recovery_window.empty())
            throw UnschedulableContract(who + ": shifted energy has no recovery window");

        std::unordered_set<int> reduction(c.reduction_window.begin(), c.reduction_window.end());

        RunVars rv = add_run_logic(model, horizon, stem);
        // availability: the contract may only run inside its window
        for (int t = 0; t < horizon; ++t)
            if (!reduction.count(t + 1)) {
                LinearExpr off;
                off.add(rv.y[t], 1.0);
                model.add_constraint(std::move(off), Sense::Eq, 0.0,
                                     hour_name(stem + "_avail", t));
            }
        add_min_run(model, rv, horizon, c.min_duration, stem);
        add_max_run(model, rv, horizon, c.max_duration, stem);

        LsUnitVars unit;
        unit.y = rv.y;
        unit.f = rv.f;
        unit.w = rv.w;
        for (int t = 0; t < horizon; ++t) {
            VarId pia = model.add_continuous(hour_name(stem + "_pia", t), 0.0, milp::kInfinity);
            unit.pia.push_back(pia);
            LinearExpr trig;
            trig.add(pia, 1.0);
            trig.add(rv.f[t], -c.initiation_cost);
            model.add_constraint(std::move(trig), Sense::Ge, 0.0, hour_name(stem + "_init", t));

            p_sum[static_cast<size_t>(t)].add(rv.y[t], effective);
            cp_sum[static_cast<size_t>(t)].add(pia, 1.0);
            cp_sum[static_cast<size_t>(t)].add(rv.y[t], c.price * effective);
        }
        if (recovers) {
            // every shifted MWh returns evenly across the recovery window
            // as negative reduction
            double per_hour = effective / static_cast<double>(c.recovery_window.size());
            for (int h : c.recovery_window)
                for (int hr : c.reduction_window)
                    p_sum[static_cast<size_t>(h - 1)].add(rv.y[hr - 1], -per_hour);
        }
        block.units.push_back(std::move(unit));
    }
    pin_totals(model, block.totals, std::move(p_sum), std::move(cp_sum), horizon, tag);
    return block;
}

OgBlock build_og_block(MilpModel& model, const std::vector<OgContract>& contracts, int horizon,
                       const std::string& tag) {
    require_horizon(horizon);
    OgBlock block;
    block.totals = add_totals(model, horizon, tag);
    std::vector<LinearExpr> p_sum(static_cast<size_t>(horizon));
    std::vector<LinearExpr> cp_sum(static_cast<size_t>(horizon));

    for (size_t i = 0; i < contracts.size(); ++i) {
        const OgContract& c = contracts[i];
        const std::string who = display_name(c.name, tag, i);
        const std::string stem = tag + std::to_string(i);
        if (c.p_min <= 0.0) throw MalformedContract(who + ": p_min must be positive");
        if (c.p_min > c.p_max) throw MalformedContract(who + ": p_min exceeds p_max");
        if (c.startup_cost < 0 || c.startup_fuel < 0 || c.fuel_factor < 0 || c.fuel_limit < 0 ||
            c.ramp_up < 0 || c.ramp_down < 0 || c.min_on < 0 || c.min_off < 0)
            throw MalformedContract(who + ": negative limit");
        if (c.p_min * c.min_on * c.fuel_factor > c.fuel_limit)
            throw UnschedulableContract(who +
                                        ": one minimum-length run already overruns the fuel limit");

        OgUnitVars unit;
        for (int t = 0; t < horizon; ++t)
            unit.y.push_back(model.add_binary(hour_name(stem + "_y", t)));
        for (int t = 0; t < horizon; ++t)
            unit.t.push_back(model.add_continuous(hour_name(stem + "_t", t), 0.0, c.p_max));
        for (int t = 0; t < horizon; ++t)
            unit.sc.push_back(
                model.add_continuous(hour_name(stem + "_sc", t), 0.0, milp::kInfinity));
        for (int t = 0; t < horizon; ++t)
            unit.sfc.push_back(
                model.add_continuous(hour_name(stem + "_sfc", t), 0.0, milp::kInfinity));

        LinearExpr fuel;
        for (int t = 0; t < horizon; ++t) {
            // dispatch window tied to commitment
            LinearExpr lo;
            lo.add(unit.t[t], 1.0);
            lo.add(unit.y[t], -c.p_min);
            model.add_constraint(std::move(lo), Sense::Ge, 0.0, hour_name(stem + "_pmin", t));
            LinearExpr hi;
            hi.add(unit.t[t], 1.0);
            hi.add(unit.y[t], -c.p_max);
            model.add_constraint(std::move(hi), Sense::Le, 0.0, hour_name(stem + "_pmax", t));

            // ramps against an idle hour 0
            LinearExpr up;
            up.add(unit.t[t], 1.0);
            if (t > 0) up.add(unit.t[t - 1], -1.0);
            model.add_constraint(std::move(up), Sense::Le, c.ramp_up,
                                 hour_name(stem + "_rampup", t));
            LinearExpr down;
            down.add(unit.t[t], -1.0);
            if (t > 0) down.add(unit.t[t - 1], 1.0);
            model.add_constraint(std::move(down), Sense::Le, c.ramp_down,
                                 hour_name(stem + "_rampdown", t));

            // startup charges fire on the off-to-on edge
            LinearExpr sc;
            sc.add(unit.sc[t], 1.0);
            sc.add(unit.y[t], -c.startup_cost);
            if (t > 0) sc.add(unit.y[t - 1], c.startup_cost);
            model.add_constraint(std::move(sc), Sense::Ge, 0.0, hour_name(stem + "_scost", t));
            LinearExpr sf;
            sf.add(unit.sfc[t], 1.0);
            sf.add(unit.y[t], -c.startup_fuel);
            if (t > 0) sf.add(unit.y[t - 1], c.startup_fuel);
            model.add_constraint(std::move(sf), Sense::Ge, 0.0, hour_name(stem + "_sfuel", t));

            // minimum on-time; runs that cannot finish may not start
            if (c.min_on > 0) {
                LinearExpr on;
                for (int u = t; u <= std::min(t + c.min_on - 1, horizon - 1); ++u)
                    on.add(unit.y[u], 1.0);
                on.add(unit.y[t], -static_cast<double>(c.min_on));
                if (t > 0) on.add(unit.y[t - 1], static_cast<double>(c.min_on));
                model.add_constraint(std::move(on), Sense::Ge, 0.0,
                                     hour_name(stem + "_minon", t));
            }
            // minimum off-time; hours past the horizon count as off
            if (c.min_off > 0) {
                LinearExpr off;
                int last = std::min(t + c.min_off - 1, horizon - 1);
                double window = static_cast<double>(last - t + 1);
                double overhang = static_cast<double>(c.min_off) - window;
                off.add_constant(window + overhang);
                for (int u = t; u <= last; ++u) off.add(unit.y[u], -1.0);
                off.add(unit.y[t], static_cast<double>(c.min_off));
                if (t > 0) off.add(unit.y[t - 1], -static_cast<double>(c.min_off));
                model.add_constraint(std::move(off), Sense::Ge, 0.0,
                                     hour_name(stem + "_minoff", t));
            }

            fuel.add(unit.t[t], c.fuel_factor);
            fuel.add(unit.sfc[t], 1.0);

            p_sum[static_cast<size_t>(t)].add(unit.t[t], 1.0);
            cp_sum[static_cast<size_t>(t)].add(unit.sc[t], 1.0);
            cp_sum[static_cast<size_t>(t)].add(unit.t[t], c.energy_price);
        }
        model.add_constraint(std::move(fuel), Sense::Le, c.fuel_limit, stem + "_fuel");
        block.units.push_back(std::move(unit));
    }
    pin_totals(model, block.totals, std::move(p_sum), std::move(cp_sum), horizon, tag);
    return block;
}

EsBlock build_es_block(MilpModel& model, const std::vector<EsContract>& contracts, int horizon,
                       const std::string& tag) {
    require_horizon(horizon);
    EsBlock block;
    block.totals = add_totals(model, horizon, tag);
    std::vector<LinearExpr> p_sum(static_cast<size_t>(horizon));
    std::vector<LinearExpr> cp_sum(static_cast<size_t>(horizon));

    for (size_t i = 0; i < contracts.size(); ++i) {
        const EsContract& c = contracts[i];
        const std::string who = display_name(c.name, tag, i);
        const std::string stem = tag + std::to_string(i);
        if (c.retention_time < 1)
            throw MalformedContract(who + ": retention_time must be at least 1 hour");
        if (c.retention_time > horizon)
            throw MalformedContract(who + ": retention_time exceeds the horizon");
        if (c.discharge_efficiency <= 0.0 || c.discharge_efficiency > 1.0)
            throw MalformedContract(who + ": discharge_efficiency outside (0, 1]");
        if (c.power_rating < 0 || c.energy_capacity < 0 || c.ramp_up < 0 || c.ramp_down < 0 ||
            c.max_cycles < 0)
            throw MalformedContract(who + ": negative limit");

        RunVars rv = add_run_logic(model, horizon, stem);
        add_max_run(model, rv, horizon, c.retention_time, stem);
        add_run_count(model, rv, horizon, c.max_cycles, stem);

        EsUnitVars unit;
        unit.y = rv.y;
        unit.f = rv.f;
        unit.w = rv.w;
        LinearExpr budget;
        for (int t = 0; t < horizon; ++t) {
            VarId dis = model.add_continuous(hour_name(stem + "_t", t), 0.0, c.power_rating);
            unit.t.push_back(dis);

            LinearExpr cap;
            cap.add(dis, 1.0);
            cap.add(rv.y[t], -c.power_rating);
            model.add_constraint(std::move(cap), Sense::Le, 0.0, hour_name(stem + "_cap", t));

            LinearExpr up;
            up.add(dis, 1.0);
            if (t > 0) up.add(unit.t[t - 1], -1.0);
            model.add_constraint(std::move(up), Sense::Le, c.ramp_up,
                                 hour_name(stem + "_rampup", t));
            LinearExpr down;
            down.add(dis, -1.0);
            if (t > 0) down.add(unit.t[t - 1], 1.0);
            model.add_constraint(std::move(down), Sense::Le, c.ramp_down,
                                 hour_name(stem + "_rampdown", t));

            budget.add(dis, 1.0);

            p_sum[static_cast<size_t>(t)].add(dis, 1.0);
            cp_sum[static_cast<size_t>(t)].add(dis, c.discharge_price);
        }
        model.add_constraint(std::move(budget), Sense::Le,
                             c.discharge_efficiency * c.energy_capacity, stem + "_energy");
        block.units.push_back(std::move(unit));
    }
    pin_totals(model, block.totals, std::move(p_sum), std::move(cp_sum), horizon, tag);
    return block;
}

}  // namespace vpp::dag
