#include "vpp/market/offering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vpp::market {

namespace {

constexpr double kPriceTieTol = 1e-9;
constexpr double kQuantityTol = 1e-7;

bool prices_equal(double a, double b) {
    return std::fabs(a - b) <= kPriceTieTol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

OfferingCurve extract_offering_curve(const VppDecision& d, const tree::ScenarioTree& tree,
                                     int hour) {
    if (hour < 1 || hour > d.horizon)
        throw CorruptDecision("hour " + std::to_string(hour) + " outside the decision");
    if (d.da.size() != tree.scenarios.size())
        throw CorruptDecision("decision does not cover every scenario");
    size_t ht = static_cast<size_t>(hour - 1);

    std::vector<int> order(tree.scenarios.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return tree.scenarios[static_cast<size_t>(a)].da_price[ht] <
               tree.scenarios[static_cast<size_t>(b)].da_price[ht];
    });

    OfferingCurve curve;
    curve.hour = hour;
    for (size_t k = 0; k < order.size(); ++k) {
        size_t n = static_cast<size_t>(order[k]);
        double price = tree.scenarios[n].da_price[ht];
        double qty = d.da[n][ht];
        if (!curve.points.empty() && prices_equal(curve.points.back().price, price)) {
            double held = curve.points.back().quantity;
            if (std::fabs(held - qty) > kQuantityTol * std::max(1.0, std::fabs(held)))
                throw CorruptDecision("hour " + std::to_string(hour) + ": price " +
                                      std::to_string(price) +
                                      " carries two different quantities");
            continue;  // tie merged; first scenario in index order is the keeper
        }
        if (!curve.points.empty() &&
            qty < curve.points.back().quantity -
                      kQuantityTol * std::max(1.0, std::fabs(curve.points.back().quantity)))
            throw CorruptDecision("hour " + std::to_string(hour) +
                                  ": quantity falls as price rises");
        curve.points.push_back({price, qty});
    }
    return curve;
}

std::vector<OfferingCurve> extract_offering_curves(const VppDecision& d,
                                                   const tree::ScenarioTree& tree) {
    std::vector<OfferingCurve> out;
    for (int h = 1; h <= d.horizon; ++h) out.push_back(extract_offering_curve(d, tree, h));
    return out;
}

double curve_quantity_at(const OfferingCurve& curve, double price) {
    for (const CurvePoint& pt : curve.points)
        if (prices_equal(pt.price, price)) return pt.quantity;
    throw CorruptDecision("price " + std::to_string(price) + " not on the hour " +
                          std::to_string(curve.hour) + " curve");
}

}  // namespace vpp::market
