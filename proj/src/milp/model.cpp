#include "vpp/milp/model.hpp"

#include <algorithm>
#include <cmath>

namespace vpp::milp {

LinearExpr& LinearExpr::add(VarId var, double coeff) {
    if (!var.valid()) throw ValidationError("LinearExpr::add: invalid variable id");
    if (coeff != 0.0) terms_.emplace_back(var, coeff);
    return *this;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
    if (scale != 0.0) {
        terms_.reserve(terms_.size() + other.terms_.size());
        for (const auto& [v, c] : other.terms_) terms_.emplace_back(v, c * scale);
        constant_ += other.constant_ * scale;
    }
    return *this;
}

void LinearExpr::normalize() {
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<VarId, double>> merged;
    merged.reserve(terms_.size());
    for (const auto& [v, c] : terms_) {
        if (!merged.empty() && merged.back().first == v)
            merged.back().second += c;
        else
            merged.emplace_back(v, c);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& t) { return t.second == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
    double acc = constant_;
    for (const auto& [v, c] : terms_) acc += c * values.at(static_cast<size_t>(v.index));
    return acc;
}

VarId MilpModel::add_variable(Variable v) {
    if (v.name.empty()) throw ValidationError("add_variable: empty variable name");
    if (std::isnan(v.lower) || std::isnan(v.upper))
        throw ValidationError("add_variable: NaN bound on '" + v.name + "'");
    if (v.lower > v.upper)
        throw ValidationError("add_variable: lower > upper on '" + v.name + "'");
    if (v.kind == VarKind::Binary) {
        // Binary bounds live inside [0,1]; callers may pre-fix to a constant.
        v.lower = std::max(v.lower, 0.0);
        v.upper = std::min(v.upper, 1.0);
        if (v.lower > v.upper)
            throw ValidationError("add_variable: binary '" + v.name + "' fixed outside {0,1}");
        ++num_binaries_;
    }
    variables_.push_back(std::move(v));
    return VarId{static_cast<int>(variables_.size()) - 1};
}

VarId MilpModel::add_continuous(std::string name, double lower, double upper) {
    return add_variable(Variable{std::move(name), lower, upper, VarKind::Continuous});
}

VarId MilpModel::add_binary(std::string name) {
    return add_variable(Variable{std::move(name), 0.0, 1.0, VarKind::Binary});
}

void MilpModel::add_constraint(LinearExpr expr, Sense sense, double rhs, std::string name) {
    if (std::isnan(rhs)) throw ValidationError("add_constraint: NaN right-hand side");
    check_expr(expr);
    expr.normalize();
    constraints_.push_back(Constraint{std::move(expr), sense, rhs, std::move(name)});
}

void MilpModel::set_objective(LinearExpr expr, Direction direction) {
    check_expr(expr);
    expr.normalize();
    objective_ = std::move(expr);
    direction_ = direction;
}

const Variable& MilpModel::variable(VarId id) const {
    check_id(id);
    return variables_[static_cast<size_t>(id.index)];
}

void MilpModel::check_id(VarId id) const {
    if (id.index < 0 || id.index >= num_variables())
        throw ValidationError("variable id out of range");
}

void MilpModel::check_expr(const LinearExpr& e) const {
    for (const auto& [v, c] : e.terms()) {
        check_id(v);
        if (std::isnan(c) || std::isinf(c))
            throw ValidationError("non-finite coefficient on variable '" +
                                  variables_[static_cast<size_t>(v.index)].name + "'");
    }
}

}  // namespace vpp::milp
