#include "vpp/market/vpp_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vpp::market {

namespace {

constexpr double kPriceTieTol = 1e-9;

std::string hour_name(const std::string& stem, int t) {
    return stem + "_h" + std::to_string(t + 1);
}

bool prices_equal(double a, double b) {
    return std::fabs(a - b) <= kPriceTieTol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

VppModel build_vpp_model(const VppAssets& assets, const tree::ScenarioTree& tree,
                         InMode in_mode) {
    if (assets.wind_capacity < 0.0 || assets.expansion_cap < 0.0)
        throw ModelAssemblyError("asset capacities must be nonnegative");
    auto report = tree::validate_tree(tree);
    if (!report.empty()) throw ModelAssemblyError("scenario tree invalid: " + report.front());

    VppModel vm;
    vm.tree = tree;
    vm.assets = assets;
    vm.in_mode = in_mode;
    vm.horizon = tree.horizon;

    milp::MilpModel& m = vm.model;
    const int H = tree.horizon;
    const int NS = tree.size();
    const int NB = tree.n_da * tree.n_id;
    const double cap = assets.schedule_cap();
    const double wind_cap = assets.wind_capacity;

    // stage-two structures: one contract fleet and intraday position per
    // (day-ahead, intraday) price branch
    vm.branch.resize(static_cast<size_t>(NB));
    for (int d = 0; d < tree.n_da; ++d) {
        for (int i = 0; i < tree.n_id; ++i) {
            int b = d * tree.n_id + i;
            BranchVars& bv = vm.branch[static_cast<size_t>(b)];
            std::string tag = "b" + std::to_string(b);
            if (in_mode == InMode::Branch) {
                for (int t = 0; t < H; ++t) {
                    bv.in.push_back(m.add_continuous(hour_name("in_" + tag, t), 0.0, cap));
                    bv.wind_in.push_back(
                        m.add_continuous(hour_name("win_" + tag, t), 0.0, wind_cap));
                    bv.comp_in.push_back(m.add_continuous(hour_name("cin_" + tag, t),
                                                          -milp::kInfinity, milp::kInfinity));
                }
            }
            for (int t = 0; t < H; ++t)
                bv.comp_sc.push_back(m.add_continuous(hour_name("csc_" + tag, t),
                                                      -milp::kInfinity, milp::kInfinity));
            bv.blocks.lc = dag::build_lc_block(m, assets.contracts.lc, H, tag + "_lc");
            bv.blocks.ls =
                dag::build_ls_block(m, assets.contracts.ls, H, assets.recovery, tag + "_ls");
            bv.blocks.og = dag::build_og_block(m, assets.contracts.og, H, tag + "_og");
            bv.blocks.es = dag::build_es_block(m, assets.contracts.es, H, tag + "_es");

            for (int t = 0; t < H; ++t) {
                // contract schedule total = sum of family aggregates
                milp::LinearExpr link;
                link.add(bv.comp_sc[static_cast<size_t>(t)], 1.0);
                link.add(bv.blocks.lc.totals.p[static_cast<size_t>(t)], -1.0);
                link.add(bv.blocks.ls.totals.p[static_cast<size_t>(t)], -1.0);
                link.add(bv.blocks.og.totals.p[static_cast<size_t>(t)], -1.0);
                link.add(bv.blocks.es.totals.p[static_cast<size_t>(t)], -1.0);
                m.add_constraint(std::move(link), milp::Sense::Eq, 0.0,
                                 hour_name("link_csc_" + tag, t));
                if (in_mode == InMode::Branch) {
                    milp::LinearExpr split;
                    split.add(bv.in[static_cast<size_t>(t)], 1.0);
                    split.add(bv.wind_in[static_cast<size_t>(t)], -1.0);
                    split.add(bv.comp_in[static_cast<size_t>(t)], -1.0);
                    m.add_constraint(std::move(split), milp::Sense::Eq, 0.0,
                                     hour_name("split_in_" + tag, t));
                }
            }
        }
    }

    // stage-one offers and stage-three settlement, per scenario
    vm.scen.resize(static_cast<size_t>(NS));
    std::vector<std::vector<milp::VarId>> free_in(static_cast<size_t>(NS));
    for (int n = 0; n < NS; ++n) {
        ScenarioVars& sv = vm.scen[static_cast<size_t>(n)];
        std::string tag = "s" + std::to_string(n);
        for (int t = 0; t < H; ++t) {
            sv.da.push_back(m.add_continuous(hour_name("da_" + tag, t), 0.0, cap));
            sv.sc.push_back(m.add_continuous(hour_name("sc_" + tag, t), 0.0, cap));
            sv.wind_da.push_back(m.add_continuous(hour_name("wda_" + tag, t), 0.0, wind_cap));
            sv.comp_da.push_back(m.add_continuous(hour_name("cda_" + tag, t),
                                                  -milp::kInfinity, milp::kInfinity));
            sv.wind_sc.push_back(m.add_continuous(hour_name("wsc_" + tag, t), 0.0, wind_cap));
            sv.surplus.push_back(
                m.add_continuous(hour_name("eps_up_" + tag, t), 0.0, milp::kInfinity));
            sv.shortfall.push_back(m.add_continuous(hour_name("eps_dn_" + tag, t), 0.0, cap));
        }
        if (in_mode == InMode::Free) {
            for (int t = 0; t < H; ++t) {
                free_in[static_cast<size_t>(n)].push_back(
                    m.add_continuous(hour_name("in_" + tag, t), 0.0, cap));
            }
        }
    }

    for (int n = 0; n < NS; ++n) {
        const tree::Scenario& s = tree.scenarios[static_cast<size_t>(n)];
        ScenarioVars& sv = vm.scen[static_cast<size_t>(n)];
        BranchVars& bv = vm.branch[static_cast<size_t>(vm.branch_of(n))];
        const auto& in_vars =
            in_mode == InMode::Branch ? bv.in : free_in[static_cast<size_t>(n)];
        std::string tag = "s" + std::to_string(n);
        for (int t = 0; t < H; ++t) {
            size_t ht = static_cast<size_t>(t);
            // schedule equals the two market positions combined
            milp::LinearExpr sched;
            sched.add(sv.sc[ht], 1.0);
            sched.add(sv.da[ht], -1.0);
            sched.add(in_vars[ht], -1.0);
            m.add_constraint(std::move(sched), milp::Sense::Eq, 0.0,
                             hour_name("sched_" + tag, t));

            milp::LinearExpr sda;
            sda.add(sv.da[ht], 1.0);
            sda.add(sv.wind_da[ht], -1.0);
            sda.add(sv.comp_da[ht], -1.0);
            m.add_constraint(std::move(sda), milp::Sense::Eq, 0.0,
                             hour_name("split_da_" + tag, t));

            milp::LinearExpr ssc;
            ssc.add(sv.sc[ht], 1.0);
            ssc.add(sv.wind_sc[ht], -1.0);
            ssc.add(bv.comp_sc[ht], -1.0);
            m.add_constraint(std::move(ssc), milp::Sense::Eq, 0.0,
                             hour_name("split_sc_" + tag, t));

            // delivered minus scheduled splits into the two settlement sides
            milp::LinearExpr dev;
            dev.add(sv.surplus[ht], 1.0);
            dev.add(sv.shortfall[ht], -1.0);
            dev.add(sv.sc[ht], 1.0);
            dev.add(bv.comp_sc[ht], -1.0);
            m.add_constraint(std::move(dev), milp::Sense::Eq, s.wind[ht],
                             hour_name("dev_" + tag, t));

            // surplus cannot exceed what was actually produced
            milp::LinearExpr lim;
            lim.add(sv.surplus[ht], 1.0);
            lim.add(bv.comp_sc[ht], -1.0);
            m.add_constraint(std::move(lim), milp::Sense::Le, s.wind[ht],
                             hour_name("cap_up_" + tag, t));
        }
    }

    // expected profit: market revenue settled per scenario, contract costs
    // charged once per branch with that branch's probability mass
    milp::LinearExpr obj;
    for (int n = 0; n < NS; ++n) {
        const tree::Scenario& s = tree.scenarios[static_cast<size_t>(n)];
        ScenarioVars& sv = vm.scen[static_cast<size_t>(n)];
        const auto& in_vars = in_mode == InMode::Branch
                                  ? vm.branch[static_cast<size_t>(vm.branch_of(n))].in
                                  : free_in[static_cast<size_t>(n)];
        for (int t = 0; t < H; ++t) {
            size_t ht = static_cast<size_t>(t);
            double pi = s.probability;
            obj.add(sv.da[ht], pi * s.da_price[ht]);
            obj.add(in_vars[ht], pi * s.id_price[ht]);
            obj.add(sv.surplus[ht], pi * s.da_price[ht] * s.up_ratio[ht]);
            obj.add(sv.shortfall[ht], -pi * s.da_price[ht] * s.down_ratio[ht]);
        }
    }
    std::vector<double> branch_mass(static_cast<size_t>(NB), 0.0);
    for (int n = 0; n < NS; ++n)
        branch_mass[static_cast<size_t>(vm.branch_of(n))] +=
            tree.scenarios[static_cast<size_t>(n)].probability;
    for (int b = 0; b < NB; ++b) {
        const BranchVars& bv = vm.branch[static_cast<size_t>(b)];
        double mass = branch_mass[static_cast<size_t>(b)];
        for (int t = 0; t < H; ++t) {
            size_t ht = static_cast<size_t>(t);
            obj.add(bv.blocks.lc.totals.cp[ht], -mass);
            obj.add(bv.blocks.ls.totals.cp[ht], -mass);
            obj.add(bv.blocks.og.totals.cp[ht], -mass);
            obj.add(bv.blocks.es.totals.cp[ht], -mass);
        }
    }
    m.set_objective(std::move(obj), milp::Direction::Maximize);
    return vm;
}

void add_offer_curve_constraints(VppModel& vm) {
    const int NS = vm.tree.size();
    for (int t = 0; t < vm.horizon; ++t) {
        size_t ht = static_cast<size_t>(t);
        std::vector<int> order(static_cast<size_t>(NS));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return vm.tree.scenarios[static_cast<size_t>(a)].da_price[ht] <
                   vm.tree.scenarios[static_cast<size_t>(b)].da_price[ht];
        });
        // adjacent rows are enough: ordering and tie-equality both chain
        for (int k = 0; k + 1 < NS; ++k) {
            int lo = order[static_cast<size_t>(k)];
            int hi = order[static_cast<size_t>(k + 1)];
            double p_lo = vm.tree.scenarios[static_cast<size_t>(lo)].da_price[ht];
            double p_hi = vm.tree.scenarios[static_cast<size_t>(hi)].da_price[ht];
            milp::LinearExpr e;
            e.add(vm.scen[static_cast<size_t>(hi)].da[ht], 1.0);
            e.add(vm.scen[static_cast<size_t>(lo)].da[ht], -1.0);
            std::string name = "curve_h" + std::to_string(t + 1) + "_s" + std::to_string(lo) +
                               "_s" + std::to_string(hi);
            if (prices_equal(p_lo, p_hi))
                vm.model.add_constraint(std::move(e), milp::Sense::Eq, 0.0, name);
            else
                vm.model.add_constraint(std::move(e), milp::Sense::Ge, 0.0, name);
        }
    }
    vm.offer_curves_added = true;
}

VppDecision extract_decision(const VppModel& vm, const milp::MilpSolution& sol) {
    if (!sol.has_solution()) throw InvalidDecision("no solution values to extract");
    const int NS = vm.tree.size();
    const int H = vm.horizon;
    VppDecision d;
    d.horizon = H;
    auto grid = [&] {
        return std::vector<std::vector<double>>(static_cast<size_t>(NS),
                                                std::vector<double>(static_cast<size_t>(H)));
    };
    d.da = grid();
    d.in = grid();
    d.sc = grid();
    d.surplus = grid();
    d.shortfall = grid();
    d.comp_da = grid();
    d.comp_in = grid();
    d.comp_sc = grid();
    d.comp_delivered = grid();
    d.comp_cost = grid();
    d.wind_sc = grid();

    for (int n = 0; n < NS; ++n) {
        size_t sn = static_cast<size_t>(n);
        const ScenarioVars& sv = vm.scen[sn];
        const BranchVars& bv = vm.branch[static_cast<size_t>(vm.branch_of(n))];
        for (int t = 0; t < H; ++t) {
            size_t ht = static_cast<size_t>(t);
            d.da[sn][ht] = sol.value(sv.da[ht]);
            d.sc[sn][ht] = sol.value(sv.sc[ht]);
            d.surplus[sn][ht] = sol.value(sv.surplus[ht]);
            d.shortfall[sn][ht] = sol.value(sv.shortfall[ht]);
            d.comp_da[sn][ht] = sol.value(sv.comp_da[ht]);
            d.wind_sc[sn][ht] = sol.value(sv.wind_sc[ht]);
            d.comp_sc[sn][ht] = sol.value(bv.comp_sc[ht]);
            d.comp_delivered[sn][ht] = d.comp_sc[sn][ht];
            if (vm.in_mode == InMode::Branch) {
                d.in[sn][ht] = sol.value(bv.in[ht]);
                d.comp_in[sn][ht] = sol.value(bv.comp_in[ht]);
            }
            d.comp_cost[sn][ht] = sol.value(bv.blocks.lc.totals.cp[ht]) +
                                  sol.value(bv.blocks.ls.totals.cp[ht]) +
                                  sol.value(bv.blocks.og.totals.cp[ht]) +
                                  sol.value(bv.blocks.es.totals.cp[ht]);
        }
    }
    if (vm.in_mode == InMode::Free) {
        // free-mode intraday offers live per scenario: recover them from the
        // schedule identity instead of keeping a second handle table
        for (int n = 0; n < NS; ++n) {
            size_t sn = static_cast<size_t>(n);
            for (int t = 0; t < H; ++t) {
                size_t ht = static_cast<size_t>(t);
                d.in[sn][ht] = d.sc[sn][ht] - d.da[sn][ht];
                d.comp_in[sn][ht] = d.comp_sc[sn][ht] - d.comp_da[sn][ht];
            }
        }
    }
    return d;
}

ProfitBreakdown evaluate_profit(const VppDecision& d, const tree::Scenario& s) {
    size_t n = static_cast<size_t>(s.index);
    if (n >= d.da.size() || d.horizon != static_cast<int>(s.da_price.size()))
        throw InvalidDecision("decision does not cover scenario " + std::to_string(s.index));
    ProfitBreakdown pb;
    for (int t = 0; t < d.horizon; ++t) {
        size_t ht = static_cast<size_t>(t);
        double up = d.surplus[n][ht];
        double dn = d.shortfall[n][ht];
        if (up < -1e-9 || dn < -1e-9)
            throw InvalidDecision("negative deviation in scenario " + std::to_string(s.index) +
                                  " hour " + std::to_string(t + 1));
        pb.da_revenue += s.da_price[ht] * d.da[n][ht];
        pb.in_revenue += s.id_price[ht] * d.in[n][ht];
        pb.surplus_revenue += s.da_price[ht] * s.up_ratio[ht] * up;
        pb.shortfall_cost += s.da_price[ht] * s.down_ratio[ht] * dn;
        pb.component_cost += d.comp_cost[n][ht];
    }
    pb.total = pb.da_revenue + pb.in_revenue + pb.surplus_revenue - pb.shortfall_cost -
               pb.component_cost;
    return pb;
}

}  // namespace vpp::market
