#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vpp/error.hpp"

namespace vpp::tree {

/// A marginal probability set does not describe a usable tree: weights off 1,
/// negative values, mismatched series lengths.
struct InvalidMarginals : ValidationError {
    explicit InvalidMarginals(const std::string& what) : ValidationError(what) {}
};

/// Balancing ratio below 1. The ratio measures how far the settlement price
/// moves away from day-ahead, so 1 is the floor in both regimes.
struct InvalidRatio : ValidationError {
    explicit InvalidRatio(const std::string& what) : ValidationError(what) {}
};

/// System state behind a balancing draw: overall surplus or shortage.
enum class Regime { Excess, Deficit };

/// Price multipliers applied to deviations: `up` to delivery above the
/// committed schedule, `down` to delivery below it. Exactly one side sits
/// at 1 (that side settles at the day-ahead price).
struct RatioPair {
    double up = 1.0;
    double down = 1.0;
};

/// One hourly series with its sampling weight.
struct WeightedSeries {
    std::vector<double> values;
    double probability = 0.0;
};

/// One balancing draw. `regimes`/`ratios` hold either a single entry applied
/// to every hour or one entry per hour.
struct BalancingMarginal {
    std::vector<Regime> regimes;
    std::vector<double> ratios;
    double probability = 0.0;
};

/// Independent marginal scenario sets. Intraday prices are conditional on the
/// day-ahead branch: id_price[d] lists the alternatives given da_price[d],
/// and each inner probability set sums to 1 on its own.
struct MarginalScenarios {
    int horizon = 0;
    std::vector<WeightedSeries> wind;
    std::vector<WeightedSeries> da_price;
    std::vector<std::vector<WeightedSeries>> id_price;
    std::vector<BalancingMarginal> balancing;
};

struct Scenario {
    int index = 0;
    double probability = 0.0;
    std::vector<double> da_price;
    std::vector<double> id_price;
    std::vector<double> wind;
    std::vector<double> up_ratio;
    std::vector<double> down_ratio;
    // positions in the marginal sets this scenario was assembled from
    int wind_branch = 0;
    int da_branch = 0;
    int id_branch = 0;
    int bal_branch = 0;
};

struct ScenarioTree {
    int horizon = 0;
    int n_wind = 0;
    int n_da = 0;
    int n_id = 0;
    int n_bal = 0;
    std::vector<Scenario> scenarios;

    int size() const { return static_cast<int>(scenarios.size()); }
};

/// Applies the two-regime settlement rule: excess -> (1/r, 1),
/// deficit -> (1, r). Throws InvalidRatio when r < 1.
RatioPair expand_ratio(Regime regime, double ratio);

/// Maps a list of (regime, ratio) draws through expand_ratio.
std::vector<RatioPair> expand_balancing_ratios(
    const std::vector<std::pair<Regime, double>>& draws);

/// Full Cartesian product of the marginal sets. Scenario n is laid out with
/// the wind branch outermost and the balancing branch innermost, and carries
/// the product of its marginal weights. Throws InvalidMarginals/InvalidRatio.
ScenarioTree build_symmetric_tree(const MarginalScenarios& marginals);

/// Re-checks every tree invariant and returns one message per violation.
/// Empty result means the tree is sound.
std::vector<std::string> validate_tree(const ScenarioTree& t);

}  // namespace vpp::tree
