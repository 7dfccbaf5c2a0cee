// Independent brute-force oracles used to pin solver results in tests.
// Deliberately slow and simple; none of this shares code with the engine.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "vpp/milp/model.hpp"

namespace oracle {

inline constexpr double kFeasTol = 1e-7;

// Gaussian elimination with partial pivoting. Returns nullopt when singular.
inline std::optional<std::vector<double>> dense_solve(std::vector<std::vector<double>> a,
                                                      std::vector<double> b) {
    const size_t n = b.size();
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        for (size_t i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
        if (std::fabs(a[piv][k]) < 1e-11) return std::nullopt;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (size_t i = k + 1; i < n; ++i) {
            double f = a[i][k] / a[k][k];
            if (f == 0.0) continue;
            for (size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// One linear condition over the structural variables: row * x (sense) rhs,
// where sense is -1 (<=), 0 (=), +1 (>=).
struct Facet {
    std::vector<double> row;
    int sense = -1;
    double rhs = 0.0;
};

struct OracleResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> argmax;
};

// Collects rows and finite variable bounds of `model` as facets.
inline std::vector<Facet> collect_facets(const vpp::milp::MilpModel& model) {
    using namespace vpp::milp;
    const int n = model.num_variables();
    std::vector<Facet> facets;
    for (const auto& c : model.constraints()) {
        Facet f;
        f.row.assign(static_cast<size_t>(n), 0.0);
        for (const auto& [v, coef] : c.expr.terms()) f.row[static_cast<size_t>(v.index)] = coef;
        f.rhs = c.rhs - c.expr.constant();
        f.sense = c.sense == Sense::Le ? -1 : c.sense == Sense::Ge ? 1 : 0;
        facets.push_back(std::move(f));
    }
    for (int j = 0; j < n; ++j) {
        const auto& v = model.variables()[static_cast<size_t>(j)];
        if (std::isfinite(v.lower)) {
            Facet f;
            f.row.assign(static_cast<size_t>(n), 0.0);
            f.row[static_cast<size_t>(j)] = 1.0;
            f.sense = 1;
            f.rhs = v.lower;
            facets.push_back(std::move(f));
        }
        if (std::isfinite(v.upper)) {
            Facet f;
            f.row.assign(static_cast<size_t>(n), 0.0);
            f.row[static_cast<size_t>(j)] = 1.0;
            f.sense = -1;
            f.rhs = v.upper;
            facets.push_back(std::move(f));
        }
    }
    return facets;
}

inline bool point_feasible(const std::vector<Facet>& facets, const std::vector<double>& x,
                           double tol = kFeasTol) {
    for (const auto& f : facets) {
        double lhs = 0.0;
        for (size_t j = 0; j < x.size(); ++j) lhs += f.row[j] * x[j];
        if (f.sense <= 0 && lhs > f.rhs + tol) return false;
        if (f.sense >= 0 && lhs < f.rhs - tol) return false;
    }
    return true;
}

// Vertex enumeration over every n-subset of facets treated as tight.
// Exact for feasible bounded LPs (any optimum is attained at some vertex)
// and reports infeasibility when no candidate vertex satisfies all facets.
// Only valid when the feasible region is bounded; keep all test instances
// boxed.
inline OracleResult vertex_enum_lp(const vpp::milp::MilpModel& model) {
    using namespace vpp::milp;
    const int n = model.num_variables();
    std::vector<Facet> facets = collect_facets(model);
    const int m = static_cast<int>(facets.size());

    std::vector<double> obj(static_cast<size_t>(n), 0.0);
    for (const auto& [v, coef] : model.objective().terms())
        obj[static_cast<size_t>(v.index)] = coef;
    const bool maximize = model.direction() == Direction::Maximize;

    OracleResult best;
    std::vector<int> pick(static_cast<size_t>(n));
    // iterate combinations of facet indices of size n
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    if (n > m) return best;
    for (;;) {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (int i = 0; i < n; ++i) {
            a.push_back(facets[static_cast<size_t>(idx[static_cast<size_t>(i)])].row);
            b.push_back(facets[static_cast<size_t>(idx[static_cast<size_t>(i)])].rhs);
        }
        if (auto x = dense_solve(a, b); x && point_feasible(facets, *x)) {
            double val = model.objective().constant();
            for (int j = 0; j < n; ++j)
                val += obj[static_cast<size_t>(j)] * (*x)[static_cast<size_t>(j)];
            if (!best.feasible || (maximize ? val > best.objective : val < best.objective)) {
                best.feasible = true;
                best.objective = val;
                best.argmax = *x;
            }
        }
        // next combination
        int i = n - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == m - n + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int k = i + 1; k < n; ++k)
            idx[static_cast<size_t>(k)] = idx[static_cast<size_t>(k - 1)] + 1;
    }
    return best;
}

// Exhaustive search over all binary assignments of a pure-binary model.
inline OracleResult enumerate_pure_binary(const vpp::milp::MilpModel& model) {
    using namespace vpp::milp;
    const int n = model.num_variables();
    std::vector<Facet> facets = collect_facets(model);
    std::vector<double> obj(static_cast<size_t>(n), 0.0);
    for (const auto& [v, coef] : model.objective().terms())
        obj[static_cast<size_t>(v.index)] = coef;
    const bool maximize = model.direction() == Direction::Maximize;

    OracleResult best;
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        for (int j = 0; j < n; ++j) x[static_cast<size_t>(j)] = (mask >> j) & 1u ? 1.0 : 0.0;
        if (!point_feasible(facets, x)) continue;
        double val = model.objective().constant();
        for (int j = 0; j < n; ++j) val += obj[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
        if (!best.feasible || (maximize ? val > best.objective : val < best.objective)) {
            best.feasible = true;
            best.objective = val;
            best.argmax = x;
        }
    }
    return best;
}

// Mixed case: enumerate the binaries, vertex-enumerate the continuous rest.
inline OracleResult enumerate_mixed(const vpp::milp::MilpModel& model) {
    using namespace vpp::milp;
    const int n = model.num_variables();
    std::vector<int> bins;
    for (int j = 0; j < n; ++j)
        if (model.variables()[static_cast<size_t>(j)].kind == VarKind::Binary) bins.push_back(j);

    const bool maximize = model.direction() == Direction::Maximize;
    OracleResult best;
    for (unsigned mask = 0; mask < (1u << bins.size()); ++mask) {
        MilpModel sub;
        for (int j = 0; j < n; ++j) {
            Variable v = model.variables()[static_cast<size_t>(j)];
            if (v.kind == VarKind::Binary) {
                size_t k = 0;
                while (bins[k] != j) ++k;
                double fixed = (mask >> k) & 1u ? 1.0 : 0.0;
                v.lower = v.upper = fixed;
                v.kind = VarKind::Continuous;
            }
            sub.add_variable(v);
        }
        for (const auto& c : model.constraints()) {
            LinearExpr e = c.expr;
            sub.add_constraint(std::move(e), c.sense, c.rhs, c.name);
        }
        LinearExpr o = model.objective();
        sub.set_objective(std::move(o), model.direction());
        OracleResult r = vertex_enum_lp(sub);
        if (r.feasible &&
            (!best.feasible || (maximize ? r.objective > best.objective
                                         : r.objective < best.objective))) {
            best = r;
        }
    }
    return best;
}

}  // namespace oracle
