#pragma once

// Bounded-variable revised simplex used for LP relaxations. Internal to the
// solver; callers go through solve_lp / solve_milp.
//
// Layout: the model's m constraints become equality rows "a.x + s = b" with
// one slack column per row; slack bounds encode the sense. Columns are stored
// sparse. The basis is held as an LU factorization (left-looking, partial
// pivoting) plus product-form eta updates; refactorization happens on a fixed
// cadence. Phase 1 is the composite scheme: it minimizes the total bound
// violation of basic variables, so any starting basis is a legal warm start.
// All tie-breaks are by lowest index to keep runs bit-reproducible.

#include <vector>

#include "vpp/milp/model.hpp"
#include "vpp/milp/solve.hpp"

namespace vpp::milp::detail {

struct LuFactor {
    int m = 0;
    std::vector<int> l_start, l_row;
    std::vector<double> l_val;
    std::vector<int> u_start, u_ord;
    std::vector<double> u_val;
    std::vector<double> u_diag;
    std::vector<int> pivot_row;  // order -> original row
    std::vector<int> row_order;  // original row -> order
    std::vector<int> col_pos;    // order -> basis position
    int failed_pos = -1;         // basis position that could not pivot

    // Factors the given basis columns; returns false on a singular basis,
    // leaving failed_pos and row_order describing the dependent column and
    // which rows did get pivoted, so the caller can repair the basis.
    bool factor(int m_rows, const std::vector<int>& basis,
                const std::vector<int>& col_start, const std::vector<int>& row_idx,
                const std::vector<double>& value);

    void ftran(std::vector<double>& v, std::vector<double>& scratch) const;
    void btran(std::vector<double>& v, std::vector<double>& scratch) const;
};

struct Eta {
    int pos = -1;        // basis position replaced
    double pivot = 0.0;  // w[pos]
    std::vector<std::pair<int, double>> entries;  // other nonzeros of w
};

enum class ColState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

class LpEngine {
  public:
    void load(const MilpModel& model, const SolverOptions& options);

    // Bound overrides (model variable index space); used by branch and bound.
    void set_variable_bounds(int var, double lower, double upper);
    void reset_variable_bounds();

    // Permanently narrows the model bounds (reduced-cost fixing). Takes effect
    // at the next reset_variable_bounds(); current overrides are not touched.
    void tighten_model_bounds(int var, double lower, double upper);

    // Per-structural margins |d_j| of the current (optimal) basis, in objective
    // units: the minimum degradation for moving j off its bound. Sign encodes
    // the side: positive for at-lower, negative for at-upper, 0 for basic/free.
    void reduced_cost_margins(std::vector<double>& out) const;

    void set_row_rhs(int row, double rhs);
    void set_objective_costs(const std::vector<double>& costs, double constant,
                             Direction direction);

    // Warm solve from the current basis; reset_basis() forces a cold start.
    SolveStatus solve();
    void reset_basis();

    double objective_value() const;
    void extract_values(std::vector<double>& out) const;
    double structural_value(int var) const { return x_[static_cast<size_t>(var)]; }
    long iterations() const { return total_iterations_; }

    int num_rows() const { return m_; }
    int num_structurals() const { return n_; }

  private:
    enum class PhaseResult { Feasible, Optimal, Infeasible, Unbounded, IterLimit, Restart };

    int col_begin(int j) const { return col_start_[static_cast<size_t>(j)]; }
    int col_end(int j) const { return col_start_[static_cast<size_t>(j) + 1]; }

    void compute_basic_values();
    void full_ftran(std::vector<double>& v) const;
    void full_btran(std::vector<double>& v) const;
    bool refactorize();  // true if the basis had to be repaired or reset
    double dot_column(int j, const std::vector<double>& y_rows) const;
    void snap_nonbasic_values();
    void apply_bound_shifts(int round);  // expand basic columns' bounds a little
    void restore_bound_shifts();

    PhaseResult run_phase(bool phase1, long& iters_this_solve);

    int m_ = 0;  // rows
    int n_ = 0;  // structural columns
    int ncols_ = 0;

    std::vector<int> col_start_, row_idx_;
    std::vector<double> col_val_;
    std::vector<double> cost_, lb_, ub_;
    std::vector<double> model_lb_, model_ub_;
    std::vector<double> b_;
    double obj_constant_ = 0.0;
    double obj_sign_ = 1.0;  // -1 when the user objective is maximized

    std::vector<int> basis_;
    std::vector<ColState> state_;
    std::vector<double> x_;

    LuFactor lu_;
    std::vector<Eta> etas_;
    bool factor_valid_ = false;

    SolverOptions options_;
    double dual_tol_ = 1e-9;
    long total_iterations_ = 0;

    // scratch buffers
    std::vector<double> work_, work2_, w_col_, y_row_;
    std::vector<double> devex_, rho_;  // pricing weights and pivot-row scratch
    std::vector<double> perturb_;      // anti-degeneracy cost offsets, usually zero
    bool perturb_active_ = false;
    std::vector<double> lb_shift_, ub_shift_;  // anti-cycling bound expansion
    bool bounds_shifted_ = false;
};

}  // namespace vpp::milp::detail
