// Brute-force reference for component-free offering problems: enumerate
// day-ahead offers per price branch and intraday offers per (da,id) branch on
// an integer grid, settle deviations at the kink-optimal split, and keep the
// best expected profit. Exact whenever wind levels and the cap are integers
// (every optimal vertex then lands on the grid).
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vpp/tree/scenario_tree.hpp"

namespace oracle {

inline double best_offering_profit(const vpp::tree::ScenarioTree& tree, double cap,
                                   double step = 1.0) {
    const int D = tree.n_da;
    const int I = tree.n_id;
    const int NB = D * I;
    const int G = static_cast<int>(std::floor(cap / step + 0.5)) + 1;

    // branch probability masses and per-scenario branch map
    std::vector<int> branch_of;
    for (const auto& s : tree.scenarios) branch_of.push_back(s.da_branch * I + s.id_branch);

    double total = 0.0;
    std::vector<double> da(static_cast<size_t>(D)), in(static_cast<size_t>(NB));
    for (int t = 0; t < tree.horizon; ++t) {
        size_t ht = static_cast<size_t>(t);
        // one representative price per da branch at this hour
        std::vector<double> price_d(static_cast<size_t>(D));
        for (const auto& s : tree.scenarios)
            price_d[static_cast<size_t>(s.da_branch)] = s.da_price[ht];

        double best = -1e300;
        std::vector<int> gd(static_cast<size_t>(D), 0), gi(static_cast<size_t>(NB), 0);
        while (true) {
            for (int d = 0; d < D; ++d) da[static_cast<size_t>(d)] = gd[static_cast<size_t>(d)] * step;
            // offers must follow prices: higher price never offers less,
            // equal prices offer the same
            bool ok = true;
            for (int a = 0; a < D && ok; ++a)
                for (int b = 0; b < D && ok; ++b) {
                    double pa = price_d[static_cast<size_t>(a)];
                    double pb = price_d[static_cast<size_t>(b)];
                    bool eq = std::fabs(pa - pb) <= 1e-9 * std::max({1.0, pa, pb});
                    if (eq && da[static_cast<size_t>(a)] != da[static_cast<size_t>(b)]) ok = false;
                    if (!eq && pa > pb && da[static_cast<size_t>(a)] < da[static_cast<size_t>(b)]) ok = false;
                }
            if (ok) {
                std::fill(gi.begin(), gi.end(), 0);
                while (true) {
                    bool fits = true;
                    for (int b = 0; b < NB; ++b) {
                        in[static_cast<size_t>(b)] = gi[static_cast<size_t>(b)] * step;
                        if (da[static_cast<size_t>(b / I)] + in[static_cast<size_t>(b)] >
                            cap + 1e-9)
                            fits = false;
                    }
                    if (fits) {
                        double expected = 0.0;
                        for (const auto& s : tree.scenarios) {
                            size_t b = static_cast<size_t>(branch_of[static_cast<size_t>(s.index)]);
                            double off_da = da[static_cast<size_t>(s.da_branch)];
                            double off_in = in[b];
                            double sched = off_da + off_in;
                            double w = s.wind[ht];
                            double up = std::max(w - sched, 0.0);
                            double dn = std::max(sched - w, 0.0);
                            expected += s.probability *
                                        (s.da_price[ht] * off_da + s.id_price[ht] * off_in +
                                         s.da_price[ht] * s.up_ratio[ht] * up -
                                         s.da_price[ht] * s.down_ratio[ht] * dn);
                        }
                        best = std::max(best, expected);
                    }
                    int k = 0;
                    while (k < NB && ++gi[static_cast<size_t>(k)] == G) {
                        gi[static_cast<size_t>(k)] = 0;
                        ++k;
                    }
                    if (k == NB) break;
                }
            }
            int k = 0;
            while (k < D && ++gd[static_cast<size_t>(k)] == G) {
                gd[static_cast<size_t>(k)] = 0;
                ++k;
            }
            if (k == D) break;
        }
        total += best;
    }
    return total;
}

}  // namespace oracle
