#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "vpp/error.hpp"

namespace vpp::milp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Opaque handle into a model's variable table. Dense, zero-based,
/// valid only for the model that issued it.
struct VarId {
    int index = -1;

    bool valid() const { return index >= 0; }
    friend bool operator==(VarId a, VarId b) { return a.index == b.index; }
    friend bool operator!=(VarId a, VarId b) { return a.index != b.index; }
    friend bool operator<(VarId a, VarId b) { return a.index < b.index; }
};

enum class VarKind { Continuous, Binary };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
    VarKind kind = VarKind::Continuous;
};

/// Sparse linear form: sum of coefficient * variable plus a constant.
class LinearExpr {
  public:
    LinearExpr() = default;
    /* implicit */ LinearExpr(double constant) : constant_(constant) {}

    LinearExpr& add(VarId var, double coeff);
    LinearExpr& add(const LinearExpr& other, double scale = 1.0);
    LinearExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    /// Merges duplicate variables and drops zero coefficients.
    void normalize();

    const std::vector<std::pair<VarId, double>>& terms() const { return terms_; }
    double constant() const { return constant_; }
    bool empty() const { return terms_.empty(); }

    double evaluate(const std::vector<double>& values) const;

  private:
    std::vector<std::pair<VarId, double>> terms_;
    double constant_ = 0.0;
};

enum class Sense { Le, Eq, Ge };

struct Constraint {
    LinearExpr expr;
    Sense sense = Sense::Le;
    double rhs = 0.0;
    std::string name;
};

enum class Direction { Maximize, Minimize };

/// In-memory MILP: variable table, linear constraints, linear objective.
/// Immutable once handed to a solver; building is single-threaded.
class MilpModel {
  public:
    VarId add_variable(Variable v);
    VarId add_continuous(std::string name, double lower, double upper);
    VarId add_binary(std::string name);

    void add_constraint(LinearExpr expr, Sense sense, double rhs, std::string name = "");
    void set_objective(LinearExpr expr, Direction direction);

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    int num_binaries() const { return num_binaries_; }

    const Variable& variable(VarId id) const;
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const LinearExpr& objective() const { return objective_; }
    Direction direction() const { return direction_; }

  private:
    void check_id(VarId id) const;
    void check_expr(const LinearExpr& e) const;

    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    LinearExpr objective_;
    Direction direction_ = Direction::Minimize;
    int num_binaries_ = 0;
};

}  // namespace vpp::milp
