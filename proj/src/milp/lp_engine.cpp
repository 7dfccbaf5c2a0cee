#include "lp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace vpp::milp::detail {

namespace {

constexpr double kPivotZero = 1e-11;   // entries below this never pivot
constexpr double kPivotAccept = 1e-8;  // pivots below this trigger a rebuild
constexpr double kHarrisWindow = 1e-9; // ratio-test tie window
constexpr double kDegenStep = 1e-10;   // step sizes below this count as degenerate
constexpr long kPerturbTrigger = 200;  // degenerate pivots before cost perturbation
constexpr long kShiftTrigger = 500;    // degenerate pivots before bound expansion
constexpr long kBlandTrigger = 2000;   // degenerate pivots before Bland's rule
constexpr int kRefactorEvery = 64;     // eta updates between refactorizations
constexpr double kPerturbScale = 2e-7; // relative size of anti-degeneracy offsets
constexpr double kShiftScale = 1e-9;   // relative size of bound expansions
constexpr int kMaxShiftRounds = 50;    // bound expansions per phase call

bool is_finite(double v) { return std::isfinite(v); }

bool lp_trace() {
    static const bool on = std::getenv("VPP_LP_TRACE") != nullptr;
    return on;
}

}  // namespace

// ---------------------------------------------------------------------------
// LU factorization: left-looking with partial pivoting. Columns are factored
// in order of increasing nonzero count, which keeps fill modest on the
// window-structured bases these models produce.

bool LuFactor::factor(int m_rows, const std::vector<int>& basis,
                      const std::vector<int>& col_start, const std::vector<int>& row_idx,
                      const std::vector<double>& value) {
    m = m_rows;
    failed_pos = -1;
    l_start.assign(1, 0);
    l_row.clear();
    l_val.clear();
    u_start.assign(1, 0);
    u_ord.clear();
    u_val.clear();
    u_diag.assign(static_cast<size_t>(m), 0.0);
    pivot_row.assign(static_cast<size_t>(m), -1);
    row_order.assign(static_cast<size_t>(m), -1);
    col_pos.assign(static_cast<size_t>(m), -1);
    if (m == 0) return true;

    std::vector<int> seq(static_cast<size_t>(m));
    std::iota(seq.begin(), seq.end(), 0);
    std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) {
        int ca = basis[static_cast<size_t>(a)];
        int cb = basis[static_cast<size_t>(b)];
        return col_start[static_cast<size_t>(ca) + 1] - col_start[static_cast<size_t>(ca)] <
               col_start[static_cast<size_t>(cb) + 1] - col_start[static_cast<size_t>(cb)];
    });

    std::vector<double> x(static_cast<size_t>(m), 0.0);
    std::vector<int> touched;
    std::vector<char> in_heap(static_cast<size_t>(m), 0);
    std::vector<int> heap;

    auto heap_push = [&](int ord) {
        if (!in_heap[static_cast<size_t>(ord)]) {
            in_heap[static_cast<size_t>(ord)] = 1;
            heap.push_back(ord);
            std::push_heap(heap.begin(), heap.end(), std::greater<int>());
        }
    };

    for (int k = 0; k < m; ++k) {
        int pos = seq[static_cast<size_t>(k)];
        int col = basis[static_cast<size_t>(pos)];
        for (int t = col_start[static_cast<size_t>(col)];
             t < col_start[static_cast<size_t>(col) + 1]; ++t) {
            int r = row_idx[static_cast<size_t>(t)];
            if (x[static_cast<size_t>(r)] == 0.0) touched.push_back(r);
            x[static_cast<size_t>(r)] += value[static_cast<size_t>(t)];
            int ord = row_order[static_cast<size_t>(r)];
            if (ord >= 0 && x[static_cast<size_t>(r)] != 0.0) heap_push(ord);
        }

        // eliminate against already-factored pivots, ascending order
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end(), std::greater<int>());
            int j = heap.back();
            heap.pop_back();
            in_heap[static_cast<size_t>(j)] = 0;
            double ukj = x[static_cast<size_t>(pivot_row[static_cast<size_t>(j)])];
            if (ukj == 0.0) continue;
            u_ord.push_back(j);
            u_val.push_back(ukj);
            for (int t = l_start[static_cast<size_t>(j)]; t < l_start[static_cast<size_t>(j) + 1];
                 ++t) {
                int r = l_row[static_cast<size_t>(t)];
                if (x[static_cast<size_t>(r)] == 0.0) touched.push_back(r);
                x[static_cast<size_t>(r)] -= ukj * l_val[static_cast<size_t>(t)];
                int ord = row_order[static_cast<size_t>(r)];
                if (ord > j && x[static_cast<size_t>(r)] != 0.0) heap_push(ord);
            }
        }

        // pivot: largest magnitude among still-active rows, lowest index on ties
        int prow = -1;
        double pmag = 0.0;
        for (int r : touched) {
            if (row_order[static_cast<size_t>(r)] >= 0) continue;
            double mag = std::fabs(x[static_cast<size_t>(r)]);
            if (mag > pmag || (mag == pmag && mag > 0.0 && (prow < 0 || r < prow))) {
                pmag = mag;
                prow = r;
            }
        }
        if (prow < 0 || pmag < kPivotZero) {
            for (int r : touched) x[static_cast<size_t>(r)] = 0.0;
            touched.clear();
            failed_pos = pos;  // this basis column is dependent on the others
            return false;
        }

        double diag = x[static_cast<size_t>(prow)];
        u_diag[static_cast<size_t>(k)] = diag;
        pivot_row[static_cast<size_t>(k)] = prow;
        row_order[static_cast<size_t>(prow)] = k;
        col_pos[static_cast<size_t>(k)] = pos;
        for (int r : touched) {
            double xv = x[static_cast<size_t>(r)];
            if (r != prow && row_order[static_cast<size_t>(r)] < 0 && xv != 0.0) {
                l_row.push_back(r);
                l_val.push_back(xv / diag);
            }
            x[static_cast<size_t>(r)] = 0.0;
        }
        touched.clear();
        l_start.push_back(static_cast<int>(l_row.size()));
        u_start.push_back(static_cast<int>(u_ord.size()));
    }
    return true;
}

void LuFactor::ftran(std::vector<double>& v, std::vector<double>& scratch) const {
    for (int k = 0; k < m; ++k) {
        double t = v[static_cast<size_t>(pivot_row[static_cast<size_t>(k)])];
        if (t != 0.0) {
            for (int i = l_start[static_cast<size_t>(k)]; i < l_start[static_cast<size_t>(k) + 1];
                 ++i)
                v[static_cast<size_t>(l_row[static_cast<size_t>(i)])] -=
                    t * l_val[static_cast<size_t>(i)];
        }
    }
    scratch.resize(static_cast<size_t>(m));
    for (int k = m - 1; k >= 0; --k) {
        double t = v[static_cast<size_t>(pivot_row[static_cast<size_t>(k)])] /
                   u_diag[static_cast<size_t>(k)];
        scratch[static_cast<size_t>(k)] = t;
        if (t != 0.0) {
            for (int i = u_start[static_cast<size_t>(k)]; i < u_start[static_cast<size_t>(k) + 1];
                 ++i)
                v[static_cast<size_t>(
                    pivot_row[static_cast<size_t>(u_ord[static_cast<size_t>(i)])])] -=
                    t * u_val[static_cast<size_t>(i)];
        }
    }
    for (int k = 0; k < m; ++k)
        v[static_cast<size_t>(col_pos[static_cast<size_t>(k)])] = scratch[static_cast<size_t>(k)];
}

void LuFactor::btran(std::vector<double>& v, std::vector<double>& scratch) const {
    scratch.resize(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        double t = v[static_cast<size_t>(col_pos[static_cast<size_t>(k)])];
        for (int i = u_start[static_cast<size_t>(k)]; i < u_start[static_cast<size_t>(k) + 1]; ++i)
            t -= u_val[static_cast<size_t>(i)] *
                 scratch[static_cast<size_t>(u_ord[static_cast<size_t>(i)])];
        scratch[static_cast<size_t>(k)] = t / u_diag[static_cast<size_t>(k)];
    }
    for (int k = m - 1; k >= 0; --k) {
        double t = scratch[static_cast<size_t>(k)];
        for (int i = l_start[static_cast<size_t>(k)]; i < l_start[static_cast<size_t>(k) + 1]; ++i)
            t -= l_val[static_cast<size_t>(i)] *
                 scratch[static_cast<size_t>(
                     row_order[static_cast<size_t>(l_row[static_cast<size_t>(i)])])];
        scratch[static_cast<size_t>(k)] = t;
    }
    for (int k = 0; k < m; ++k)
        v[static_cast<size_t>(pivot_row[static_cast<size_t>(k)])] = scratch[static_cast<size_t>(k)];
}

// ---------------------------------------------------------------------------
// Engine setup

void LpEngine::load(const MilpModel& model, const SolverOptions& options) {
    options_ = options;
    m_ = model.num_constraints();
    n_ = model.num_variables();
    ncols_ = n_ + m_;

    std::vector<int> counts(static_cast<size_t>(n_), 0);
    for (const auto& c : model.constraints())
        for (const auto& [v, coef] : c.expr.terms()) {
            (void)coef;
            ++counts[static_cast<size_t>(v.index)];
        }
    col_start_.assign(static_cast<size_t>(ncols_) + 1, 0);
    for (int j = 0; j < n_; ++j)
        col_start_[static_cast<size_t>(j) + 1] =
            col_start_[static_cast<size_t>(j)] + counts[static_cast<size_t>(j)];
    int struct_nnz = col_start_[static_cast<size_t>(n_)];
    for (int j = n_; j < ncols_; ++j)
        col_start_[static_cast<size_t>(j) + 1] = struct_nnz + (j - n_) + 1;

    row_idx_.assign(static_cast<size_t>(struct_nnz + m_), 0);
    col_val_.assign(static_cast<size_t>(struct_nnz + m_), 0.0);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    b_.assign(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const Constraint& c = model.constraints()[static_cast<size_t>(i)];
        for (const auto& [v, coef] : c.expr.terms()) {
            int& slot = fill[static_cast<size_t>(v.index)];
            row_idx_[static_cast<size_t>(slot)] = i;
            col_val_[static_cast<size_t>(slot)] = coef;
            ++slot;
        }
        b_[static_cast<size_t>(i)] = c.rhs - c.expr.constant();
        int sj = n_ + i;
        int sslot = col_start_[static_cast<size_t>(sj)];
        row_idx_[static_cast<size_t>(sslot)] = i;
        col_val_[static_cast<size_t>(sslot)] = 1.0;
    }

    lb_.assign(static_cast<size_t>(ncols_), 0.0);
    ub_.assign(static_cast<size_t>(ncols_), 0.0);
    for (int j = 0; j < n_; ++j) {
        const Variable& v = model.variables()[static_cast<size_t>(j)];
        lb_[static_cast<size_t>(j)] = v.lower;
        ub_[static_cast<size_t>(j)] = v.upper;
    }
    for (int i = 0; i < m_; ++i) {
        double lo = 0.0, hi = 0.0;
        switch (model.constraints()[static_cast<size_t>(i)].sense) {
            case Sense::Le: lo = 0.0; hi = kInfinity; break;
            case Sense::Ge: lo = -kInfinity; hi = 0.0; break;
            case Sense::Eq: lo = 0.0; hi = 0.0; break;
        }
        lb_[static_cast<size_t>(n_ + i)] = lo;
        ub_[static_cast<size_t>(n_ + i)] = hi;
    }
    model_lb_.assign(lb_.begin(), lb_.begin() + n_);
    model_ub_.assign(ub_.begin(), ub_.begin() + n_);

    std::vector<double> user_costs(static_cast<size_t>(n_), 0.0);
    for (const auto& [v, coef] : model.objective().terms())
        user_costs[static_cast<size_t>(v.index)] = coef;
    set_objective_costs(user_costs, model.objective().constant(), model.direction());

    x_.assign(static_cast<size_t>(ncols_), 0.0);
    state_.assign(static_cast<size_t>(ncols_), ColState::AtLower);
    basis_.assign(static_cast<size_t>(m_), -1);
    work_.assign(static_cast<size_t>(std::max(m_, 1)), 0.0);
    work2_.assign(static_cast<size_t>(std::max(m_, 1)), 0.0);
    w_col_.assign(static_cast<size_t>(std::max(m_, 1)), 0.0);
    y_row_.assign(static_cast<size_t>(std::max(m_, 1)), 0.0);
    reset_basis();
}

void LpEngine::set_objective_costs(const std::vector<double>& costs, double constant,
                                   Direction direction) {
    obj_sign_ = direction == Direction::Maximize ? -1.0 : 1.0;
    obj_constant_ = constant;
    cost_.assign(static_cast<size_t>(ncols_), 0.0);
    double cmax = 1.0;
    for (int j = 0; j < n_; ++j) {
        cost_[static_cast<size_t>(j)] = obj_sign_ * costs[static_cast<size_t>(j)];
        cmax = std::max(cmax, std::fabs(cost_[static_cast<size_t>(j)]));
    }
    dual_tol_ = 1e-9 * cmax;
}

void LpEngine::set_variable_bounds(int var, double lower, double upper) {
    lb_[static_cast<size_t>(var)] = lower;
    ub_[static_cast<size_t>(var)] = upper;
    if (state_[static_cast<size_t>(var)] != ColState::Basic) {
        if (is_finite(lower)) {
            state_[static_cast<size_t>(var)] = ColState::AtLower;
            x_[static_cast<size_t>(var)] = lower;
        } else if (is_finite(upper)) {
            state_[static_cast<size_t>(var)] = ColState::AtUpper;
            x_[static_cast<size_t>(var)] = upper;
        } else {
            state_[static_cast<size_t>(var)] = ColState::FreeZero;
            x_[static_cast<size_t>(var)] = 0.0;
        }
    }
}

void LpEngine::reset_variable_bounds() {
    for (int j = 0; j < n_; ++j) {
        if (lb_[static_cast<size_t>(j)] != model_lb_[static_cast<size_t>(j)] ||
            ub_[static_cast<size_t>(j)] != model_ub_[static_cast<size_t>(j)])
            set_variable_bounds(j, model_lb_[static_cast<size_t>(j)],
                                model_ub_[static_cast<size_t>(j)]);
    }
}

void LpEngine::tighten_model_bounds(int var, double lower, double upper) {
    model_lb_[static_cast<size_t>(var)] = lower;
    model_ub_[static_cast<size_t>(var)] = upper;
}

void LpEngine::reduced_cost_margins(std::vector<double>& out) const {
    std::vector<double> y(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
        y[static_cast<size_t>(i)] = cost_[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
    full_btran(y);
    out.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
        ColState st = state_[static_cast<size_t>(j)];
        if (st != ColState::AtLower && st != ColState::AtUpper) continue;
        double dj = cost_[static_cast<size_t>(j)] - dot_column(j, y);
        if (st == ColState::AtLower)
            out[static_cast<size_t>(j)] = std::max(dj, 0.0);
        else
            out[static_cast<size_t>(j)] = -std::max(-dj, 0.0);
    }
}

void LpEngine::set_row_rhs(int row, double rhs) { b_[static_cast<size_t>(row)] = rhs; }

void LpEngine::reset_basis() {
    for (int j = 0; j < ncols_; ++j) {
        if (j >= n_) {
            state_[static_cast<size_t>(j)] = ColState::Basic;
            continue;
        }
        if (is_finite(lb_[static_cast<size_t>(j)])) {
            state_[static_cast<size_t>(j)] = ColState::AtLower;
            x_[static_cast<size_t>(j)] = lb_[static_cast<size_t>(j)];
        } else if (is_finite(ub_[static_cast<size_t>(j)])) {
            state_[static_cast<size_t>(j)] = ColState::AtUpper;
            x_[static_cast<size_t>(j)] = ub_[static_cast<size_t>(j)];
        } else {
            state_[static_cast<size_t>(j)] = ColState::FreeZero;
            x_[static_cast<size_t>(j)] = 0.0;
        }
    }
    for (int i = 0; i < m_; ++i) basis_[static_cast<size_t>(i)] = n_ + i;
    factor_valid_ = false;
}

void LpEngine::snap_nonbasic_values() {
    for (int j = 0; j < ncols_; ++j) {
        switch (state_[static_cast<size_t>(j)]) {
            case ColState::Basic: break;
            case ColState::AtLower:
                if (is_finite(lb_[static_cast<size_t>(j)]))
                    x_[static_cast<size_t>(j)] = lb_[static_cast<size_t>(j)];
                else
                    set_variable_bounds(j, lb_[static_cast<size_t>(j)],
                                        ub_[static_cast<size_t>(j)]);
                break;
            case ColState::AtUpper:
                if (is_finite(ub_[static_cast<size_t>(j)]))
                    x_[static_cast<size_t>(j)] = ub_[static_cast<size_t>(j)];
                else
                    set_variable_bounds(j, lb_[static_cast<size_t>(j)],
                                        ub_[static_cast<size_t>(j)]);
                break;
            case ColState::FreeZero: x_[static_cast<size_t>(j)] = 0.0; break;
        }
    }
}

// Expand every basic column's finite bounds outward by a tiny deterministic
// amount. Blocked ratio-test steps become strictly positive, which breaks
// degenerate cycles that cost perturbation alone cannot (the blocking is in
// the primal, not the pricing). Shifts accumulate across rounds and are taken
// back at the next optimum.
void LpEngine::apply_bound_shifts(int round) {
    if (lb_shift_.empty()) {
        lb_shift_.assign(static_cast<size_t>(ncols_), 0.0);
        ub_shift_.assign(static_cast<size_t>(ncols_), 0.0);
    }
    for (int i = 0; i < m_; ++i) {
        size_t j = static_cast<size_t>(basis_[static_cast<size_t>(i)]);
        unsigned mix = (static_cast<unsigned>(j) * 2654435761u) ^
                       (static_cast<unsigned>(round) * 40503u + 1u);
        double unit = kShiftScale *
                      (1.0 + static_cast<double>((mix >> 16) & 1023u) / 1024.0);
        if (is_finite(lb_[j])) {
            double d = unit * (1.0 + std::fabs(lb_[j]));
            lb_[j] -= d;
            lb_shift_[j] += d;
        }
        if (is_finite(ub_[j])) {
            double d = unit * (1.0 + std::fabs(ub_[j]));
            ub_[j] += d;
            ub_shift_[j] += d;
        }
    }
    bounds_shifted_ = true;
}

void LpEngine::restore_bound_shifts() {
    if (!bounds_shifted_) return;
    for (size_t j = 0; j < lb_shift_.size(); ++j) {
        if (lb_shift_[j] != 0.0) {
            lb_[j] += lb_shift_[j];
            lb_shift_[j] = 0.0;
        }
        if (ub_shift_[j] != 0.0) {
            ub_[j] -= ub_shift_[j];
            ub_shift_[j] = 0.0;
        }
    }
    bounds_shifted_ = false;
}

bool LpEngine::refactorize() {
    bool changed = false;
    for (int round = 0; round <= m_; ++round) {
        if (lu_.factor(m_, basis_, col_start_, row_idx_, col_val_)) {
            etas_.clear();
            factor_valid_ = true;
            return changed;
        }
        // Repair: the column at failed_pos is (numerically) dependent on the
        // rest of the basis. Eject it to a bound and seat the slack of a row
        // the factorization could not pivot; that keeps the remaining basis
        // intact instead of discarding all progress.
        int pos = lu_.failed_pos;
        int row = -1;
        for (int r = 0; r < m_; ++r) {
            if (lu_.row_order[static_cast<size_t>(r)] < 0 &&
                state_[static_cast<size_t>(n_ + r)] != ColState::Basic) {
                row = r;
                break;
            }
        }
        if (pos < 0 || row < 0) break;  // nothing to repair with
        int out = basis_[static_cast<size_t>(pos)];
        basis_[static_cast<size_t>(pos)] = n_ + row;
        state_[static_cast<size_t>(n_ + row)] = ColState::Basic;
        if (is_finite(lb_[static_cast<size_t>(out)])) {
            state_[static_cast<size_t>(out)] = ColState::AtLower;
            x_[static_cast<size_t>(out)] = lb_[static_cast<size_t>(out)];
        } else if (is_finite(ub_[static_cast<size_t>(out)])) {
            state_[static_cast<size_t>(out)] = ColState::AtUpper;
            x_[static_cast<size_t>(out)] = ub_[static_cast<size_t>(out)];
        } else {
            state_[static_cast<size_t>(out)] = ColState::FreeZero;
            x_[static_cast<size_t>(out)] = 0.0;
        }
        changed = true;
    }
    // Last resort: the all-slack basis always factors.
    reset_basis();
    if (!lu_.factor(m_, basis_, col_start_, row_idx_, col_val_))
        throw SolverError("simplex: slack basis failed to factor");
    etas_.clear();
    factor_valid_ = true;
    return true;
}

void LpEngine::full_ftran(std::vector<double>& v) const {
    lu_.ftran(v, const_cast<std::vector<double>&>(work2_));
    for (const Eta& e : etas_) {
        double t = v[static_cast<size_t>(e.pos)] / e.pivot;
        if (t != 0.0)
            for (const auto& [i, val] : e.entries) v[static_cast<size_t>(i)] -= val * t;
        v[static_cast<size_t>(e.pos)] = t;
    }
}

void LpEngine::full_btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = v[static_cast<size_t>(it->pos)];
        for (const auto& [i, val] : it->entries) s -= val * v[static_cast<size_t>(i)];
        v[static_cast<size_t>(it->pos)] = s / it->pivot;
    }
    lu_.btran(v, const_cast<std::vector<double>&>(work2_));
}

void LpEngine::compute_basic_values() {
    std::vector<double>& rhs = work_;
    rhs.assign(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) rhs[static_cast<size_t>(i)] = b_[static_cast<size_t>(i)];
    for (int j = 0; j < ncols_; ++j) {
        if (state_[static_cast<size_t>(j)] == ColState::Basic) continue;
        double xj = x_[static_cast<size_t>(j)];
        if (xj == 0.0) continue;
        for (int t = col_begin(j); t < col_end(j); ++t)
            rhs[static_cast<size_t>(row_idx_[static_cast<size_t>(t)])] -=
                col_val_[static_cast<size_t>(t)] * xj;
    }
    full_ftran(rhs);
    for (int i = 0; i < m_; ++i)
        x_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = rhs[static_cast<size_t>(i)];
}

double LpEngine::dot_column(int j, const std::vector<double>& y_rows) const {
    double acc = 0.0;
    for (int t = col_begin(j); t < col_end(j); ++t)
        acc += col_val_[static_cast<size_t>(t)] *
               y_rows[static_cast<size_t>(row_idx_[static_cast<size_t>(t)])];
    return acc;
}

double LpEngine::objective_value() const {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) acc += cost_[static_cast<size_t>(j)] * x_[static_cast<size_t>(j)];
    return obj_sign_ * acc + obj_constant_;
}

void LpEngine::extract_values(std::vector<double>& out) const {
    out.assign(x_.begin(), x_.begin() + n_);
}

// ---------------------------------------------------------------------------
// Simplex iterations

LpEngine::PhaseResult LpEngine::run_phase(bool phase1, long& iters_this_solve) {
    const double ftol = options_.feasibility_tol;
    bool bland = false;
    long degen_streak = 0;
    int shift_rounds = 0;
    bool force_refactor = false;
    bool fresh_factor = false;  // true while no eta has been added since refactoring
    devex_.assign(static_cast<size_t>(ncols_), 1.0);

    for (;;) {
        if (iters_this_solve >= options_.iteration_limit) {
            restore_bound_shifts();
            return PhaseResult::IterLimit;
        }
        if (force_refactor || static_cast<int>(etas_.size()) >= kRefactorEvery) {
            if (refactorize()) {
                restore_bound_shifts();
                return PhaseResult::Restart;
            }
            compute_basic_values();
            force_refactor = false;
            fresh_factor = true;
        }

        // phase costs on the basis; phase 1 prices total bound violation
        int num_viol = 0;
        std::vector<double>& cb = work_;
        cb.assign(static_cast<size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) {
            int bj = basis_[static_cast<size_t>(i)];
            double xv = x_[static_cast<size_t>(bj)];
            if (phase1) {
                if (xv > ub_[static_cast<size_t>(bj)] + ftol) {
                    cb[static_cast<size_t>(i)] = 1.0;
                    ++num_viol;
                } else if (xv < lb_[static_cast<size_t>(bj)] - ftol) {
                    cb[static_cast<size_t>(i)] = -1.0;
                    ++num_viol;
                }
            } else {
                cb[static_cast<size_t>(i)] = cost_[static_cast<size_t>(bj)] +
                                             perturb_[static_cast<size_t>(bj)];
            }
        }
        if (phase1 && num_viol == 0) return PhaseResult::Feasible;

        y_row_ = cb;
        full_btran(y_row_);

        // pricing: devex-weighted reduced costs, Bland's rule under stalling
        const double dtol = phase1 ? 1e-9 : dual_tol_;
        int enter = -1;
        double enter_metric = 0.0;
        double enter_dir = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            ColState st = state_[static_cast<size_t>(j)];
            if (st == ColState::Basic) continue;
            if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;
            double dj = (phase1 ? 0.0
                                : cost_[static_cast<size_t>(j)] + perturb_[static_cast<size_t>(j)]) -
                        dot_column(j, y_row_);
            double dir;
            if (st == ColState::AtLower)
                dir = 1.0;
            else if (st == ColState::AtUpper)
                dir = -1.0;
            else
                dir = dj <= 0.0 ? 1.0 : -1.0;
            if (dir * dj >= -dtol) continue;
            if (bland) {
                enter = j;
                enter_dir = dir;
                break;
            }
            double metric = dj * dj / devex_[static_cast<size_t>(j)];
            if (metric > enter_metric) {
                enter = j;
                enter_metric = metric;
                enter_dir = dir;
            }
        }
        if (enter < 0) {
            if (phase1) {
                // the expanded box is a relaxation, so infeasible still stands
                restore_bound_shifts();
                return PhaseResult::Infeasible;
            }
            if (perturb_active_) {
                // optimal for the perturbed costs: lift the perturbation and
                // keep pivoting on the true objective (usually a few steps)
                perturb_.assign(static_cast<size_t>(ncols_), 0.0);
                perturb_active_ = false;
                bland = false;
                degen_streak = 0;
                continue;
            }
            if (bounds_shifted_) {
                // optimal on the expanded box: pull the bounds back in, snap
                // strayed columns, and repair if any basic drifted outside
                restore_bound_shifts();
                snap_nonbasic_values();
                compute_basic_values();
                bool clean = true;
                for (int i = 0; i < m_ && clean; ++i) {
                    size_t bj = static_cast<size_t>(basis_[static_cast<size_t>(i)]);
                    clean = x_[bj] <= ub_[bj] + ftol && x_[bj] >= lb_[bj] - ftol;
                }
                if (clean) return PhaseResult::Optimal;
                return PhaseResult::Restart;
            }
            return PhaseResult::Optimal;
        }

        w_col_.assign(static_cast<size_t>(m_), 0.0);
        for (int t = col_begin(enter); t < col_end(enter); ++t)
            w_col_[static_cast<size_t>(row_idx_[static_cast<size_t>(t)])] =
                col_val_[static_cast<size_t>(t)];
        full_ftran(w_col_);

        double own_range = kInfinity;
        if (state_[static_cast<size_t>(enter)] != ColState::FreeZero &&
            is_finite(lb_[static_cast<size_t>(enter)]) &&
            is_finite(ub_[static_cast<size_t>(enter)]))
            own_range = ub_[static_cast<size_t>(enter)] - lb_[static_cast<size_t>(enter)];

        // ratio test, pass 1: tightest blocking step
        double best_t = own_range;
        for (int i = 0; i < m_; ++i) {
            double wi = w_col_[static_cast<size_t>(i)];
            if (std::fabs(wi) <= kPivotZero) continue;
            int bj = basis_[static_cast<size_t>(i)];
            double rate = -enter_dir * wi;
            double xv = x_[static_cast<size_t>(bj)];
            double lo = lb_[static_cast<size_t>(bj)];
            double hi = ub_[static_cast<size_t>(bj)];
            double ratio = kInfinity;
            if (phase1 && xv > hi + ftol) {
                if (rate < 0.0) ratio = (xv - hi) / -rate;
            } else if (phase1 && xv < lo - ftol) {
                if (rate > 0.0) ratio = (lo - xv) / rate;
            } else if (rate > 0.0 && is_finite(hi)) {
                ratio = (hi - xv) / rate;
            } else if (rate < 0.0 && is_finite(lo)) {
                ratio = (xv - lo) / -rate;
            }
            if (ratio < 0.0) ratio = 0.0;
            if (ratio < best_t) best_t = ratio;
        }
        if (!is_finite(best_t)) {
            restore_bound_shifts();
            if (phase1) throw SolverError("simplex: unbounded infeasibility descent");
            return PhaseResult::Unbounded;
        }

        bool flip = best_t >= own_range;
        int leave_pos = -1;
        int leave_target_upper = 0;
        double leave_mag = 0.0;
        if (!flip) {
            // pass 2: among blockers inside the tie window prefer the largest
            // pivot magnitude, lowest position on ties
            for (int i = 0; i < m_; ++i) {
                double wi = w_col_[static_cast<size_t>(i)];
                if (std::fabs(wi) <= kPivotZero) continue;
                int bj = basis_[static_cast<size_t>(i)];
                double rate = -enter_dir * wi;
                double xv = x_[static_cast<size_t>(bj)];
                double lo = lb_[static_cast<size_t>(bj)];
                double hi = ub_[static_cast<size_t>(bj)];
                double ratio = kInfinity;
                int target_upper = 0;
                if (phase1 && xv > hi + ftol) {
                    if (rate < 0.0) {
                        ratio = (xv - hi) / -rate;
                        target_upper = 1;
                    }
                } else if (phase1 && xv < lo - ftol) {
                    if (rate > 0.0) ratio = (lo - xv) / rate;
                } else if (rate > 0.0 && is_finite(hi)) {
                    ratio = (hi - xv) / rate;
                    target_upper = 1;
                } else if (rate < 0.0 && is_finite(lo)) {
                    ratio = (xv - lo) / -rate;
                }
                if (!is_finite(ratio)) continue;
                if (ratio < 0.0) ratio = 0.0;
                if (ratio <= best_t + kHarrisWindow && std::fabs(wi) > leave_mag) {
                    leave_mag = std::fabs(wi);
                    leave_pos = i;
                    leave_target_upper = target_upper;
                }
            }
            if (leave_pos < 0) flip = true;  // numerical corner: treat as flip
        }
        // a blocking pivot this small is usually eta-file noise: rebuild the
        // factorization and re-price before trusting it
        if (!flip && leave_mag < kPivotAccept && !fresh_factor) {
            if (refactorize()) {
                restore_bound_shifts();
                return PhaseResult::Restart;
            }
            compute_basic_values();
            fresh_factor = true;
            continue;
        }
        double step = flip ? own_range : best_t;

        ++iters_this_solve;
        ++total_iterations_;
        if (lp_trace() && iters_this_solve % 5000 == 0) {
            double ob = 0.0;
            for (int j = 0; j < ncols_; ++j)
                ob += cost_[static_cast<size_t>(j)] * x_[static_cast<size_t>(j)];
            std::fprintf(stderr, "[it] %ld ph%d obj %.6f viol %d streak %ld perturb %d bland %d\n",
                         iters_this_solve, phase1 ? 1 : 2, ob, num_viol, degen_streak,
                         static_cast<int>(perturb_active_), static_cast<int>(bland));
        }
        if (step <= kDegenStep) {
            ++degen_streak;
            if (!phase1 && !perturb_active_ && degen_streak >= kPerturbTrigger) {
                // stalling on a degenerate plateau: nudge every nonbasic cost
                // away from its bound by a tiny deterministic amount
                for (int j = 0; j < ncols_; ++j) {
                    ColState st = state_[static_cast<size_t>(j)];
                    if (st != ColState::AtLower && st != ColState::AtUpper) continue;
                    if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;
                    unsigned mix = static_cast<unsigned>(j) * 2654435761u;
                    double eps = kPerturbScale * (1.0 + std::fabs(cost_[static_cast<size_t>(j)])) *
                                 (1.0 + static_cast<double>((mix >> 16) & 1023u) / 1024.0);
                    perturb_[static_cast<size_t>(j)] = st == ColState::AtLower ? eps : -eps;
                }
                perturb_active_ = true;
                degen_streak = 0;
            } else if (degen_streak >= kBlandTrigger) {
                bland = true;
            }
        } else {
            degen_streak = 0;
        }

        if (step != 0.0) {
            for (int i = 0; i < m_; ++i) {
                double wi = w_col_[static_cast<size_t>(i)];
                if (wi != 0.0)
                    x_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] -=
                        enter_dir * step * wi;
            }
        }

        if (flip) {
            if (state_[static_cast<size_t>(enter)] == ColState::AtLower) {
                state_[static_cast<size_t>(enter)] = ColState::AtUpper;
                x_[static_cast<size_t>(enter)] = ub_[static_cast<size_t>(enter)];
            } else {
                state_[static_cast<size_t>(enter)] = ColState::AtLower;
                x_[static_cast<size_t>(enter)] = lb_[static_cast<size_t>(enter)];
            }
            continue;
        }

        int leave_col = basis_[static_cast<size_t>(leave_pos)];
        double alpha = w_col_[static_cast<size_t>(leave_pos)];

        // devex reference-weight update along the pivot row
        if (!bland) {
            rho_.assign(static_cast<size_t>(m_), 0.0);
            rho_[static_cast<size_t>(leave_pos)] = 1.0;
            full_btran(rho_);
            double wq = std::max(devex_[static_cast<size_t>(enter)], 1.0);
            double ratio2 = wq / (alpha * alpha);
            double wmax = 0.0;
            for (int j = 0; j < ncols_; ++j) {
                if (j == enter || state_[static_cast<size_t>(j)] == ColState::Basic) continue;
                if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;
                double arj = dot_column(j, rho_);
                if (arj != 0.0) {
                    double cand = arj * arj * ratio2;
                    if (cand > devex_[static_cast<size_t>(j)])
                        devex_[static_cast<size_t>(j)] = cand;
                }
                wmax = std::max(wmax, devex_[static_cast<size_t>(j)]);
            }
            devex_[static_cast<size_t>(leave_col)] = std::max(ratio2, 1.0);
            if (wmax > 1e8) devex_.assign(static_cast<size_t>(ncols_), 1.0);
        }

        double start = x_[static_cast<size_t>(enter)];
        x_[static_cast<size_t>(enter)] = start + enter_dir * step;
        x_[static_cast<size_t>(leave_col)] = leave_target_upper
                                                 ? ub_[static_cast<size_t>(leave_col)]
                                                 : lb_[static_cast<size_t>(leave_col)];
        state_[static_cast<size_t>(leave_col)] =
            leave_target_upper ? ColState::AtUpper : ColState::AtLower;
        state_[static_cast<size_t>(enter)] = ColState::Basic;
        basis_[static_cast<size_t>(leave_pos)] = enter;

        Eta eta;
        eta.pos = leave_pos;
        eta.pivot = alpha;
        eta.entries.reserve(16);
        for (int i = 0; i < m_; ++i) {
            double wi = w_col_[static_cast<size_t>(i)];
            if (i != leave_pos && wi != 0.0) eta.entries.emplace_back(i, wi);
        }
        etas_.push_back(std::move(eta));
        fresh_factor = false;
        if (leave_mag < kPivotAccept) force_refactor = true;  // contain the damage
    }
}

SolveStatus LpEngine::solve() {
    long iters_this_solve = 0;
    const bool trace = lp_trace();
    perturb_.assign(static_cast<size_t>(ncols_), 0.0);
    perturb_active_ = false;

    for (int attempt = 0; attempt < 16; ++attempt) {
        if (!factor_valid_ || static_cast<int>(etas_.size()) >= kRefactorEvery) refactorize();
        snap_nonbasic_values();
        compute_basic_values();

        long before = iters_this_solve;
        PhaseResult r = run_phase(true, iters_this_solve);
        if (trace)
            std::fprintf(stderr, "[lp] attempt %d phase1 %ld iters r=%d\n", attempt,
                         iters_this_solve - before, static_cast<int>(r));
        if (r == PhaseResult::Restart) continue;
        if (r == PhaseResult::Infeasible) return SolveStatus::Infeasible;
        if (r == PhaseResult::IterLimit) return SolveStatus::IterationLimit;

        before = iters_this_solve;
        r = run_phase(false, iters_this_solve);
        if (trace)
            std::fprintf(stderr, "[lp] attempt %d phase2 %ld iters r=%d\n", attempt,
                         iters_this_solve - before, static_cast<int>(r));
        if (r == PhaseResult::Restart) continue;
        if (r == PhaseResult::Optimal) return SolveStatus::Optimal;
        if (r == PhaseResult::Unbounded) return SolveStatus::Unbounded;
        if (r == PhaseResult::IterLimit) return SolveStatus::IterationLimit;
    }
    throw SolverError("simplex: failed to converge after repeated basis restarts");
}

}  // namespace vpp::milp::detail
