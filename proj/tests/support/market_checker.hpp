// Independent verification of the offering model's coupling rules on a raw
// solution vector: schedule identities, deviation accounting, settlement
// bounds, offer-curve coherence, and the contract blocks of every branch.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "support/dag_checker.hpp"
#include "vpp/market/vpp_model.hpp"

namespace checks {

namespace detail {
inline void complain(std::vector<std::string>& out, const std::string& who,
                     const std::string& what, double by) {
    complain(out, who, what + " (by " + std::to_string(by) + ")");
}
}  // namespace detail

/// Offer coherence over a [scenario][hour] day-ahead offer table: at each
/// hour, equal prices must carry equal offers and higher prices at least as
/// much. Usable on solver output or on hand-built tables.
inline std::vector<std::string> check_offer_monotonicity(
    const vpp::tree::ScenarioTree& tree, const std::vector<std::vector<double>>& da,
    double tol = kTol) {
    std::vector<std::string> out;
    size_t NS = tree.scenarios.size();
    if (da.size() != NS) {
        out.push_back("offer table does not cover every scenario");
        return out;
    }
    for (int t = 0; t < tree.horizon; ++t) {
        size_t ht = static_cast<size_t>(t);
        for (size_t a = 0; a < NS; ++a) {
            for (size_t b = 0; b < NS; ++b) {
                double pa = tree.scenarios[a].da_price[ht];
                double pb = tree.scenarios[b].da_price[ht];
                double qa = da[a][ht];
                double qb = da[b][ht];
                bool equal = std::fabs(pa - pb) <=
                             1e-9 * std::max({1.0, std::fabs(pa), std::fabs(pb)});
                std::string spot = "hour " + std::to_string(t + 1) + " scenarios " +
                                   std::to_string(a) + "/" + std::to_string(b);
                if (equal && std::fabs(qa - qb) > tol)
                    detail::complain(out, spot, "equal prices with unequal offers",
                             std::fabs(qa - qb));
                else if (!equal && pa > pb && qa < qb - tol)
                    detail::complain(out, spot, "offer falls as price rises", qb - qa);
            }
        }
    }
    return out;
}

/// Every structural rule of the assembled offering model, re-derived from
/// the solution vector without consulting the solver's row activities.
inline std::vector<std::string> check_vpp(const vpp::market::VppModel& vm,
                                          const std::vector<double>& x) {
    using vpp::market::InMode;
    std::vector<std::string> out;
    const int H = vm.horizon;
    const double cap = vm.assets.schedule_cap();
    const double wind_cap = vm.assets.wind_capacity;

    for (int n = 0; n < vm.tree.size(); ++n) {
        const auto& s = vm.tree.scenarios[static_cast<size_t>(n)];
        const auto& sv = vm.scen[static_cast<size_t>(n)];
        const auto& bv = vm.branch[static_cast<size_t>(vm.branch_of(n))];
        std::string tag = "scenario " + std::to_string(n);
        for (int t = 0; t < H; ++t) {
            size_t ht = static_cast<size_t>(t);
            std::string spot = tag + " hour " + std::to_string(t + 1);
            double da = detail::at(x, sv.da[ht]);
            double sc = detail::at(x, sv.sc[ht]);
            double in = vm.in_mode == InMode::Branch ? detail::at(x, bv.in[ht]) : sc - da;
            double up = detail::at(x, sv.surplus[ht]);
            double dn = detail::at(x, sv.shortfall[ht]);
            double csc = detail::at(x, bv.comp_sc[ht]);
            double wda = detail::at(x, sv.wind_da[ht]);
            double cda = detail::at(x, sv.comp_da[ht]);
            double wsc = detail::at(x, sv.wind_sc[ht]);

            if (da < -kTol || da > cap + kTol) detail::complain(out, spot, "day-ahead offer bound", da);
            if (sc < -kTol || sc > cap + kTol) detail::complain(out, spot, "schedule bound", sc);
            if (in < -kTol || in > cap + kTol) detail::complain(out, spot, "intraday offer bound", in);
            if (up < -kTol) detail::complain(out, spot, "negative surplus", up);
            if (dn < -kTol || dn > cap + kTol) detail::complain(out, spot, "shortfall bound", dn);
            if (wda < -kTol || wda > wind_cap + kTol)
                detail::complain(out, spot, "wind share of day-ahead offer", wda);
            if (wsc < -kTol || wsc > wind_cap + kTol)
                detail::complain(out, spot, "wind share of schedule", wsc);

            if (std::fabs(sc - da - in) > kTol)
                detail::complain(out, spot, "schedule != day-ahead + intraday",
                         std::fabs(sc - da - in));
            if (std::fabs(da - wda - cda) > kTol)
                detail::complain(out, spot, "day-ahead split broken", std::fabs(da - wda - cda));
            if (std::fabs(sc - wsc - csc) > kTol)
                detail::complain(out, spot, "schedule split broken", std::fabs(sc - wsc - csc));
            double delivered = s.wind[ht] + csc;
            if (std::fabs((up - dn) - (delivered - sc)) > kTol)
                detail::complain(out, spot, "deviation identity broken",
                         std::fabs((up - dn) - (delivered - sc)));
            if (up > delivered + kTol)
                detail::complain(out, spot, "surplus above delivered energy", up - delivered);
        }
    }

    for (size_t b = 0; b < vm.branch.size(); ++b) {
        const auto& bv = vm.branch[b];
        std::string tag = "branch " + std::to_string(b);
        for (int t = 0; t < H; ++t) {
            size_t ht = static_cast<size_t>(t);
            std::string spot = tag + " hour " + std::to_string(t + 1);
            double total = detail::at(x, bv.blocks.lc.totals.p[ht]) + detail::at(x, bv.blocks.ls.totals.p[ht]) +
                           detail::at(x, bv.blocks.og.totals.p[ht]) + detail::at(x, bv.blocks.es.totals.p[ht]);
            if (std::fabs(detail::at(x, bv.comp_sc[ht]) - total) > kTol)
                detail::complain(out, spot, "contract schedule total broken",
                         std::fabs(detail::at(x, bv.comp_sc[ht]) - total));
            if (vm.in_mode == InMode::Branch) {
                double in = detail::at(x, bv.in[ht]);
                double win = detail::at(x, bv.wind_in[ht]);
                double cin = detail::at(x, bv.comp_in[ht]);
                if (std::fabs(in - win - cin) > kTol)
                    detail::complain(out, spot, "intraday split broken", std::fabs(in - win - cin));
                if (win < -kTol || win > wind_cap + kTol)
                    detail::complain(out, spot, "wind share of intraday offer", win);
            }
        }
        auto merge = [&out](std::vector<std::string> v) {
            out.insert(out.end(), v.begin(), v.end());
        };
        merge(check_lc(vm.assets.contracts.lc, bv.blocks.lc, x, H));
        merge(check_ls(vm.assets.contracts.ls, bv.blocks.ls, x, H, vm.assets.recovery));
        merge(check_og(vm.assets.contracts.og, bv.blocks.og, x, H));
        merge(check_es(vm.assets.contracts.es, bv.blocks.es, x, H));
    }

    if (vm.offer_curves_added) {
        std::vector<std::vector<double>> da(vm.scen.size());
        for (size_t n = 0; n < vm.scen.size(); ++n)
            for (int t = 0; t < H; ++t)
                da[n].push_back(detail::at(x, vm.scen[n].da[static_cast<size_t>(t)]));
        auto v = check_offer_monotonicity(vm.tree, da);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

}  // namespace checks
