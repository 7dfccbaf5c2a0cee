#pragma once

#include <vector>

#include "vpp/market/vpp_model.hpp"
#include "vpp/tree/scenario_tree.hpp"

namespace vpp::market {

/// The decision fed to curve extraction breaks the offer coherence rules
/// (unequal offers at one price, or quantity falling as price rises).
struct CorruptDecision : ValidationError {
    explicit CorruptDecision(const std::string& what) : ValidationError(what) {}
};

struct CurvePoint {
    double price = 0.0;     // $/MWh
    double quantity = 0.0;  // MW
};

/// Hourly price-quantity offer staircase: prices strictly increasing,
/// quantities nondecreasing.
struct OfferingCurve {
    int hour = 0;  // 1-based
    std::vector<CurvePoint> points;
};

/// Collapses the per-scenario day-ahead offers at `hour` (1-based) into one
/// curve: scenarios with equal price (relative tolerance 1e-9) merge into a
/// single point and must offer the same quantity. Throws CorruptDecision on
/// unequal tied quantities or decreasing quantities.
OfferingCurve extract_offering_curve(const VppDecision& decision,
                                     const tree::ScenarioTree& tree, int hour);

/// extract_offering_curve for every hour of the horizon.
std::vector<OfferingCurve> extract_offering_curves(const VppDecision& decision,
                                                   const tree::ScenarioTree& tree);

/// Looks the quantity up by price (same tolerance as extraction).
/// Prices absent from the curve are a CorruptDecision.
double curve_quantity_at(const OfferingCurve& curve, double price);

}  // namespace vpp::market
