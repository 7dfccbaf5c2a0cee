// Independent re-verification of contract-block semantics. Works from the
// contract data and raw solution values only; every rule is re-derived here
// rather than read from the model, so builder and checker can disagree.
#pragma once

#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "vpp/dag/model.hpp"

namespace checks {

inline constexpr double kTol = 1e-7;
inline constexpr double kIntTol = 1e-6;

namespace detail {

inline double at(const std::vector<double>& x, vpp::milp::VarId v) {
    return x[static_cast<size_t>(v.index)];
}

inline void complain(std::vector<std::string>& out, const std::string& who,
                     const std::string& what) {
    out.push_back(who + ": " + what);
}

struct Run {
    int start = 0;  // 0-based first on-hour
    int len = 0;
};

inline std::vector<Run> runs_of(const std::vector<double>& y) {
    std::vector<Run> runs;
    for (size_t t = 0; t < y.size(); ++t) {
        bool on = y[t] > 0.5;
        if (on && (t == 0 || y[t - 1] <= 0.5)) runs.push_back({static_cast<int>(t), 1});
        else if (on) ++runs.back().len;
    }
    return runs;
}

// Shared on/off bookkeeping: integrality, start/stop indicators matching the
// state transitions, and the mirrored stop slot at the horizon boundary.
inline void check_run_logic(std::vector<std::string>& out, const std::string& who,
                            const std::vector<double>& y, const std::vector<double>& f,
                            const std::vector<double>& w) {
    const size_t H = y.size();
    for (size_t t = 0; t < H; ++t) {
        if (std::fabs(y[t] - std::round(y[t])) > kIntTol) complain(out, who, "fractional state");
        if (std::fabs(f[t] - std::round(f[t])) > kIntTol) complain(out, who, "fractional start");
        if (std::fabs(w[t] - std::round(w[t])) > kIntTol) complain(out, who, "fractional stop");
        double prev = t == 0 ? 0.0 : y[t - 1];
        double want_f = std::max(y[t] - prev, 0.0);
        double want_w = std::max(prev - y[t], 0.0);
        if (std::fabs(f[t] - want_f) > kIntTol) complain(out, who, "start indicator off");
        if (std::fabs(w[t] - want_w) > kIntTol) complain(out, who, "stop indicator off");
        if (f[t] + w[t] > 1.0 + kIntTol) complain(out, who, "start and stop in one hour");
    }
    if (std::fabs(w[H] - y[H - 1]) > kIntTol) complain(out, who, "horizon stop slot off");
}

}  // namespace detail

inline std::vector<std::string> check_lc(const std::vector<vpp::dag::LcContract>& contracts,
                                         const vpp::dag::LcBlock& block,
                                         const std::vector<double>& x, int horizon) {
    using detail::at;
    std::vector<std::string> out;
    std::vector<double> p_expect(static_cast<size_t>(horizon), 0.0);
    std::vector<double> cp_expect(static_cast<size_t>(horizon), 0.0);
    for (size_t i = 0; i < contracts.size(); ++i) {
        const auto& c = contracts[i];
        const auto& u = block.units[i];
        const std::string who = "lc[" + std::to_string(i) + "]";
        std::vector<double> y, f, w;
        for (auto v : u.y) y.push_back(at(x, v));
        for (auto v : u.f) f.push_back(at(x, v));
        for (auto v : u.w) w.push_back(at(x, v));
        detail::check_run_logic(out, who, y, f, w);
        auto runs = detail::runs_of(y);
        for (const auto& r : runs) {
            if (r.len < c.min_duration) detail::complain(out, who, "run shorter than minimum");
            if (r.len > c.max_duration) detail::complain(out, who, "run longer than maximum");
        }
        if (static_cast<int>(runs.size()) > c.max_daily_curtailments)
            detail::complain(out, who, "too many curtailments");
        for (int t = 0; t < horizon; ++t) {
            double pia = at(x, u.pia[static_cast<size_t>(t)]);
            if (pia < c.initiation_cost * f[static_cast<size_t>(t)] - kTol)
                detail::complain(out, who, "initiation charge below trigger");
            p_expect[static_cast<size_t>(t)] += c.quantity * y[static_cast<size_t>(t)];
            cp_expect[static_cast<size_t>(t)] +=
                pia + c.price * c.quantity * y[static_cast<size_t>(t)];
        }
    }
    for (int t = 0; t < horizon; ++t) {
        if (std::fabs(at(x, block.totals.p[static_cast<size_t>(t)]) -
                      p_expect[static_cast<size_t>(t)]) > kTol)
            detail::complain(out, "lc totals", "reduction aggregate off");
        if (std::fabs(at(x, block.totals.cp[static_cast<size_t>(t)]) -
                      cp_expect[static_cast<size_t>(t)]) > 1e-5)
            detail::complain(out, "lc totals", "cost aggregate off");
    }
    return out;
}

inline std::vector<std::string> check_ls(const std::vector<vpp::dag::LsContract>& contracts,
                                         const vpp::dag::LsBlock& block,
                                         const std::vector<double>& x, int horizon,
                                         vpp::dag::LsRecovery recovery) {
    using detail::at;
    using vpp::dag::LsRecovery;
    std::vector<std::string> out;
    std::vector<double> p_expect(static_cast<size_t>(horizon), 0.0);
    std::vector<double> cp_expect(static_cast<size_t>(horizon), 0.0);
    for (size_t i = 0; i < contracts.size(); ++i) {
        const auto& c = contracts[i];
        const auto& u = block.units[i];
        const std::string who = "ls[" + std::to_string(i) + "]";
        std::vector<double> y, f, w;
        for (auto v : u.y) y.push_back(at(x, v));
        for (auto v : u.f) f.push_back(at(x, v));
        for (auto v : u.w) w.push_back(at(x, v));
        detail::check_run_logic(out, who, y, f, w);
        std::unordered_set<int> window(c.reduction_window.begin(), c.reduction_window.end());
        for (int t = 0; t < horizon; ++t)
            if (y[static_cast<size_t>(t)] > 0.5 && !window.count(t + 1))
                detail::complain(out, who, "scheduled outside reduction window");
        for (const auto& r : detail::runs_of(y)) {
            if (r.len < c.min_duration) detail::complain(out, who, "run shorter than minimum");
            if (r.len > c.max_duration) detail::complain(out, who, "run longer than maximum");
        }
        double eff = recovery == LsRecovery::Uniform ? c.shift_fraction * c.quantity : c.quantity;
        double scheduled = 0.0;
        for (double v : y) scheduled += v;
        for (int t = 0; t < horizon; ++t) {
            double pia = at(x, u.pia[static_cast<size_t>(t)]);
            if (pia < c.initiation_cost * f[static_cast<size_t>(t)] - kTol)
                detail::complain(out, who, "initiation charge below trigger");
            p_expect[static_cast<size_t>(t)] += eff * y[static_cast<size_t>(t)];
            cp_expect[static_cast<size_t>(t)] += pia + c.price * eff * y[static_cast<size_t>(t)];
        }
        if (recovery == LsRecovery::Uniform && eff > 0.0) {
            double per_hour = eff * scheduled / static_cast<double>(c.recovery_window.size());
            for (int h : c.recovery_window) p_expect[static_cast<size_t>(h - 1)] -= per_hour;
        }
    }
    for (int t = 0; t < horizon; ++t) {
        if (std::fabs(at(x, block.totals.p[static_cast<size_t>(t)]) -
                      p_expect[static_cast<size_t>(t)]) > kTol)
            detail::complain(out, "ls totals", "reduction aggregate off");
        if (std::fabs(at(x, block.totals.cp[static_cast<size_t>(t)]) -
                      cp_expect[static_cast<size_t>(t)]) > 1e-5)
            detail::complain(out, "ls totals", "cost aggregate off");
    }
    return out;
}

inline std::vector<std::string> check_og(const std::vector<vpp::dag::OgContract>& contracts,
                                         const vpp::dag::OgBlock& block,
                                         const std::vector<double>& x, int horizon) {
    using detail::at;
    std::vector<std::string> out;
    std::vector<double> p_expect(static_cast<size_t>(horizon), 0.0);
    std::vector<double> cp_expect(static_cast<size_t>(horizon), 0.0);
    for (size_t i = 0; i < contracts.size(); ++i) {
        const auto& c = contracts[i];
        const auto& u = block.units[i];
        const std::string who = "og[" + std::to_string(i) + "]";
        std::vector<double> y, t_mw;
        for (auto v : u.y) y.push_back(at(x, v));
        for (auto v : u.t) t_mw.push_back(at(x, v));

        double fuel = 0.0;
        for (int t = 0; t < horizon; ++t) {
            if (std::fabs(y[static_cast<size_t>(t)] - std::round(y[static_cast<size_t>(t)])) >
                kIntTol)
                detail::complain(out, who, "fractional commitment");
            double yt = y[static_cast<size_t>(t)];
            double mw = t_mw[static_cast<size_t>(t)];
            if (mw < c.p_min * yt - kTol || mw > c.p_max * yt + kTol)
                detail::complain(out, who, "dispatch outside committed band");
            double prev = t == 0 ? 0.0 : t_mw[static_cast<size_t>(t - 1)];
            if (mw - prev > c.ramp_up + kTol) detail::complain(out, who, "ramp-up violated");
            if (prev - mw > c.ramp_down + kTol) detail::complain(out, who, "ramp-down violated");

            double prev_y = t == 0 ? 0.0 : y[static_cast<size_t>(t - 1)];
            double sc = at(x, u.sc[static_cast<size_t>(t)]);
            double sfc = at(x, u.sfc[static_cast<size_t>(t)]);
            if (sc < c.startup_cost * std::max(yt - prev_y, 0.0) - kTol)
                detail::complain(out, who, "startup cost below trigger");
            if (sfc < c.startup_fuel * std::max(yt - prev_y, 0.0) - kTol)
                detail::complain(out, who, "startup fuel below trigger");
            fuel += c.fuel_factor * mw + sfc;

            p_expect[static_cast<size_t>(t)] += mw;
            cp_expect[static_cast<size_t>(t)] += sc + c.energy_price * mw;
        }
        if (fuel > c.fuel_limit + kTol) detail::complain(out, who, "fuel budget exceeded");

        auto runs = detail::runs_of(y);
        for (const auto& r : runs)
            if (r.len < c.min_on) detail::complain(out, who, "on-run shorter than minimum");
        // interior off-runs only; the tail may spill past the horizon
        for (size_t k = 1; k < runs.size(); ++k) {
            int gap = runs[k].start - (runs[k - 1].start + runs[k - 1].len);
            if (gap < c.min_off) detail::complain(out, who, "off-gap shorter than minimum");
        }
    }
    for (int t = 0; t < horizon; ++t) {
        if (std::fabs(at(x, block.totals.p[static_cast<size_t>(t)]) -
                      p_expect[static_cast<size_t>(t)]) > kTol)
            detail::complain(out, "og totals", "reduction aggregate off");
        if (std::fabs(at(x, block.totals.cp[static_cast<size_t>(t)]) -
                      cp_expect[static_cast<size_t>(t)]) > 1e-5)
            detail::complain(out, "og totals", "cost aggregate off");
    }
    return out;
}

inline std::vector<std::string> check_es(const std::vector<vpp::dag::EsContract>& contracts,
                                         const vpp::dag::EsBlock& block,
                                         const std::vector<double>& x, int horizon) {
    using detail::at;
    std::vector<std::string> out;
    std::vector<double> p_expect(static_cast<size_t>(horizon), 0.0);
    std::vector<double> cp_expect(static_cast<size_t>(horizon), 0.0);
    for (size_t i = 0; i < contracts.size(); ++i) {
        const auto& c = contracts[i];
        const auto& u = block.units[i];
        const std::string who = "es[" + std::to_string(i) + "]";
        std::vector<double> y, f, w, t_mw;
        for (auto v : u.y) y.push_back(at(x, v));
        for (auto v : u.f) f.push_back(at(x, v));
        for (auto v : u.w) w.push_back(at(x, v));
        for (auto v : u.t) t_mw.push_back(at(x, v));
        detail::check_run_logic(out, who, y, f, w);

        auto runs = detail::runs_of(y);
        if (static_cast<int>(runs.size()) > c.max_cycles)
            detail::complain(out, who, "too many discharge episodes");
        for (const auto& r : runs)
            if (r.len > c.retention_time) detail::complain(out, who, "episode beyond retention");

        double energy = 0.0;
        for (int t = 0; t < horizon; ++t) {
            double mw = t_mw[static_cast<size_t>(t)];
            if (mw < -kTol) detail::complain(out, who, "negative discharge");
            if (mw > c.power_rating * y[static_cast<size_t>(t)] + kTol)
                detail::complain(out, who, "discharge above rating");
            double prev = t == 0 ? 0.0 : t_mw[static_cast<size_t>(t - 1)];
            if (mw - prev > c.ramp_up + kTol) detail::complain(out, who, "ramp-up violated");
            if (prev - mw > c.ramp_down + kTol) detail::complain(out, who, "ramp-down violated");
            energy += mw;
            p_expect[static_cast<size_t>(t)] += mw;
            cp_expect[static_cast<size_t>(t)] += c.discharge_price * mw;
        }
        if (energy > c.discharge_efficiency * c.energy_capacity + kTol)
            detail::complain(out, who, "energy budget exceeded");
    }
    for (int t = 0; t < horizon; ++t) {
        if (std::fabs(at(x, block.totals.p[static_cast<size_t>(t)]) -
                      p_expect[static_cast<size_t>(t)]) > kTol)
            detail::complain(out, "es totals", "reduction aggregate off");
        if (std::fabs(at(x, block.totals.cp[static_cast<size_t>(t)]) -
                      cp_expect[static_cast<size_t>(t)]) > 1e-5)
            detail::complain(out, "es totals", "cost aggregate off");
    }
    return out;
}

inline std::vector<std::string> check_dag(const vpp::dag::DagModel& dag,
                                          const std::vector<double>& x) {
    std::vector<std::string> out;
    auto merge = [&out](std::vector<std::string> part) {
        out.insert(out.end(), part.begin(), part.end());
    };
    merge(check_lc(dag.contracts.lc, dag.handles.lc, x, dag.horizon));
    merge(check_ls(dag.contracts.ls, dag.handles.ls, x, dag.horizon, dag.recovery));
    merge(check_og(dag.contracts.og, dag.handles.og, x, dag.horizon));
    merge(check_es(dag.contracts.es, dag.handles.es, x, dag.horizon));
    return out;
}

}  // namespace checks
