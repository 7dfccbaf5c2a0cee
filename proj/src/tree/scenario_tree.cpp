#include "vpp/tree/scenario_tree.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

namespace vpp::tree {

namespace {

constexpr double kProbTol = 1e-9;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void check_weights(const char* label, const std::vector<double>& probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0) || !std::isfinite(p))
            throw InvalidMarginals(std::string(label) + ": nonpositive branch weight " + fmt(p));
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kProbTol)
        throw InvalidMarginals(std::string(label) + ": weights sum to " + fmt(sum) +
                               ", expected 1");
}

void check_series(const char* label, const std::vector<double>& values, int horizon,
                  bool nonnegative) {
    if (static_cast<int>(values.size()) != horizon)
        throw InvalidMarginals(std::string(label) + ": series has " +
                               std::to_string(values.size()) + " hours, expected " +
                               std::to_string(horizon));
    for (double v : values) {
        if (!std::isfinite(v) || (nonnegative && v < 0.0))
            throw InvalidMarginals(std::string(label) + ": bad value " + fmt(v));
    }
}

}  // namespace

RatioPair expand_ratio(Regime regime, double ratio) {
    if (!(ratio >= 1.0) || !std::isfinite(ratio))
        throw InvalidRatio("balancing ratio " + fmt(ratio) + " is below 1");
    if (regime == Regime::Excess) return {1.0 / ratio, 1.0};
    return {1.0, ratio};
}

std::vector<RatioPair> expand_balancing_ratios(
    const std::vector<std::pair<Regime, double>>& draws) {
    std::vector<RatioPair> out;
    out.reserve(draws.size());
    for (const auto& [regime, ratio] : draws) out.push_back(expand_ratio(regime, ratio));
    return out;
}

ScenarioTree build_symmetric_tree(const MarginalScenarios& m) {
    if (m.horizon < 1) throw InvalidMarginals("horizon must be at least 1");
    if (m.wind.empty() || m.da_price.empty() || m.id_price.empty() || m.balancing.empty())
        throw InvalidMarginals("every marginal set needs at least one branch");
    if (m.id_price.size() != m.da_price.size())
        throw InvalidMarginals("need one intraday branch set per day-ahead branch");

    const size_t n_id = m.id_price.front().size();
    if (n_id == 0) throw InvalidMarginals("empty intraday branch set");
    for (const auto& branch : m.id_price) {
        if (branch.size() != n_id)
            throw InvalidMarginals("intraday branch sets must share one size");
    }

    std::vector<double> probs;
    auto weights_of = [&probs](const auto& items) -> const std::vector<double>& {
        probs.clear();
        for (const auto& it : items) probs.push_back(it.probability);
        return probs;
    };
    check_weights("wind", weights_of(m.wind));
    check_weights("da_price", weights_of(m.da_price));
    for (size_t d = 0; d < m.id_price.size(); ++d)
        check_weights(("id_price[" + std::to_string(d) + "]").c_str(),
                      weights_of(m.id_price[d]));
    check_weights("balancing", weights_of(m.balancing));

    for (const auto& s : m.wind) check_series("wind", s.values, m.horizon, true);
    for (const auto& s : m.da_price) check_series("da_price", s.values, m.horizon, true);
    for (const auto& branch : m.id_price)
        for (const auto& s : branch) check_series("id_price", s.values, m.horizon, true);

    // expand each balancing draw to per-hour ratio pairs up front
    std::vector<std::vector<RatioPair>> hourly_ratios;
    for (const auto& b : m.balancing) {
        if (b.regimes.size() != b.ratios.size() || b.regimes.empty())
            throw InvalidMarginals("balancing draw needs matching regime/ratio entries");
        if (b.regimes.size() != 1 && static_cast<int>(b.regimes.size()) != m.horizon)
            throw InvalidMarginals("balancing draw must give 1 entry or one per hour");
        std::vector<RatioPair> series(static_cast<size_t>(m.horizon));
        for (int h = 0; h < m.horizon; ++h) {
            size_t k = b.regimes.size() == 1 ? 0 : static_cast<size_t>(h);
            series[static_cast<size_t>(h)] = expand_ratio(b.regimes[k], b.ratios[k]);
        }
        hourly_ratios.push_back(std::move(series));
    }

    ScenarioTree t;
    t.horizon = m.horizon;
    t.n_wind = static_cast<int>(m.wind.size());
    t.n_da = static_cast<int>(m.da_price.size());
    t.n_id = static_cast<int>(n_id);
    t.n_bal = static_cast<int>(m.balancing.size());
    t.scenarios.reserve(static_cast<size_t>(t.n_wind) * static_cast<size_t>(t.n_da) *
                        n_id * static_cast<size_t>(t.n_bal));

    int n = 0;
    for (int w = 0; w < t.n_wind; ++w)
        for (int d = 0; d < t.n_da; ++d)
            for (int i = 0; i < t.n_id; ++i)
                for (int b = 0; b < t.n_bal; ++b) {
                    Scenario s;
                    s.index = n++;
                    s.probability = m.wind[static_cast<size_t>(w)].probability *
                                    m.da_price[static_cast<size_t>(d)].probability *
                                    m.id_price[static_cast<size_t>(d)][static_cast<size_t>(i)]
                                        .probability *
                                    m.balancing[static_cast<size_t>(b)].probability;
                    s.wind = m.wind[static_cast<size_t>(w)].values;
                    s.da_price = m.da_price[static_cast<size_t>(d)].values;
                    s.id_price =
                        m.id_price[static_cast<size_t>(d)][static_cast<size_t>(i)].values;
                    const auto& pairs = hourly_ratios[static_cast<size_t>(b)];
                    s.up_ratio.reserve(pairs.size());
                    s.down_ratio.reserve(pairs.size());
                    for (const RatioPair& rp : pairs) {
                        s.up_ratio.push_back(rp.up);
                        s.down_ratio.push_back(rp.down);
                    }
                    s.wind_branch = w;
                    s.da_branch = d;
                    s.id_branch = i;
                    s.bal_branch = b;
                    t.scenarios.push_back(std::move(s));
                }
    return t;
}

std::vector<std::string> validate_tree(const ScenarioTree& t) {
    std::vector<std::string> out;
    auto bad = [&out](const std::string& msg) { out.push_back(msg); };

    size_t expected = static_cast<size_t>(t.n_wind) * static_cast<size_t>(t.n_da) *
                      static_cast<size_t>(t.n_id) * static_cast<size_t>(t.n_bal);
    if (t.scenarios.size() != expected)
        bad("scenario count " + std::to_string(t.scenarios.size()) + " != product " +
            std::to_string(expected));

    double total = 0.0;
    std::map<std::tuple<int, int, int, int>, int> seen;
    std::map<int, const Scenario*> by_da;
    std::map<std::pair<int, int>, const Scenario*> by_da_id;
    std::map<int, const Scenario*> by_wind;
    std::map<int, const Scenario*> by_bal;

    for (const Scenario& s : t.scenarios) {
        std::string tag = "scenario " + std::to_string(s.index);
        total += s.probability;
        if (!(s.probability > 0.0)) bad(tag + ": nonpositive probability");

        if (s.wind_branch < 0 || s.wind_branch >= t.n_wind || s.da_branch < 0 ||
            s.da_branch >= t.n_da || s.id_branch < 0 || s.id_branch >= t.n_id ||
            s.bal_branch < 0 || s.bal_branch >= t.n_bal) {
            bad(tag + ": branch index out of range");
            continue;
        }
        auto key = std::make_tuple(s.wind_branch, s.da_branch, s.id_branch, s.bal_branch);
        if (++seen[key] > 1) bad(tag + ": duplicate branch combination");

        size_t hours = static_cast<size_t>(t.horizon);
        if (s.da_price.size() != hours || s.id_price.size() != hours ||
            s.wind.size() != hours || s.up_ratio.size() != hours ||
            s.down_ratio.size() != hours) {
            bad(tag + ": series length != horizon");
            continue;
        }
        for (size_t h = 0; h < hours; ++h) {
            if (s.da_price[h] < 0.0 || s.id_price[h] < 0.0)
                bad(tag + ": negative price at hour " + std::to_string(h + 1));
            if (s.wind[h] < 0.0) bad(tag + ": negative wind at hour " + std::to_string(h + 1));
            double up = s.up_ratio[h];
            double down = s.down_ratio[h];
            if (up > 1.0 + kProbTol || up <= 0.0 || down < 1.0 - kProbTol)
                bad(tag + ": settlement ratios outside up <= 1 <= down at hour " +
                    std::to_string(h + 1));
            else if (std::min(1.0 - up, down - 1.0) > kProbTol)
                bad(tag + ": neither deviation side settles at day-ahead at hour " +
                    std::to_string(h + 1));
        }

        // scenarios sharing a branch must carry identical copies of its series
        auto check_same = [&](const std::vector<double>& a, const std::vector<double>& b,
                              const char* what) {
            if (a != b) bad(tag + std::string(": ") + what + " differs within its branch");
        };
        if (auto [it, inserted] = by_da.try_emplace(s.da_branch, &s); !inserted)
            check_same(it->second->da_price, s.da_price, "day-ahead price");
        if (auto [it, inserted] = by_da_id.try_emplace({s.da_branch, s.id_branch}, &s);
            !inserted)
            check_same(it->second->id_price, s.id_price, "intraday price");
        if (auto [it, inserted] = by_wind.try_emplace(s.wind_branch, &s); !inserted)
            check_same(it->second->wind, s.wind, "wind");
        if (auto [it, inserted] = by_bal.try_emplace(s.bal_branch, &s); !inserted) {
            check_same(it->second->up_ratio, s.up_ratio, "up ratio");
            check_same(it->second->down_ratio, s.down_ratio, "down ratio");
        }
    }

    if (std::fabs(total - 1.0) > kProbTol)
        bad("probability sum " + fmt(total) + " != 1");
    return out;
}

}  // namespace vpp::tree
