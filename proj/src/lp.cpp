#include "top/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace top {

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;

// Full-tableau simplex. Rows 0..m-1 hold the constraints, row m the reduced
// costs; column N the right-hand side. Bland's rule on both the entering
// column (smallest index with negative reduced cost) and the leaving row
// (smallest basic index among ratio ties).
struct Tableau {
    Matrix t;
    std::vector<int> basis;
    int m = 0;
    int cols = 0;  // structural + slack + artificial columns

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int r = 0; r <= m; ++r) {
            if (r == row) continue;
            const double factor = t(r, col);
            if (factor != 0.0) t.row(r) -= factor * t.row(row);
        }
        basis[row] = col;
    }

    // Returns optimal/unbounded/iteration_limit.
    LpStatus iterate(double tol, int max_iter, int& iterations) {
        for (;;) {
            int entering = -1;
            for (int j = 0; j < cols; ++j) {
                if (t(m, j) < -tol) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return LpStatus::optimal;

            double min_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                const double a = t(r, entering);
                if (a > kPivotTol) min_ratio = std::min(min_ratio, t(r, cols) / a);
            }
            if (!std::isfinite(min_ratio)) return LpStatus::unbounded;
            int leaving = -1;
            for (int r = 0; r < m; ++r) {
                const double a = t(r, entering);
                if (a > kPivotTol && t(r, cols) / a <= min_ratio + kPivotTol &&
                    (leaving < 0 || basis[r] < basis[leaving]))
                    leaving = r;
            }
            if (++iterations > max_iter) return LpStatus::iteration_limit;
            pivot(leaving, entering);
        }
    }
};

}  // namespace

LpSolution solve(const LinearProgram& lp, double tol, int max_iter) {
    const int n_orig = static_cast<int>(lp.objective.size());
    const int m = static_cast<int>(lp.constraints.rows());
    if (lp.constraints.cols() != n_orig || lp.bounds.size() != m ||
        static_cast<int>(lp.nonneg.size()) != n_orig)
        throw DimensionMismatch("inconsistent linear program dimensions");
    if (!lp.objective.allFinite() || !lp.constraints.allFinite() || !lp.bounds.allFinite())
        throw Error("linear program has non-finite entries");
    if (!(tol > 0.0)) throw Error("tolerance must be positive");

    // Split free variables into differences of nonnegative pairs.
    std::vector<int> plus_col(n_orig), minus_col(n_orig, -1);
    int n_split = 0;
    for (int j = 0; j < n_orig; ++j) {
        plus_col[j] = n_split++;
        if (!lp.nonneg[j]) minus_col[j] = n_split++;
    }
    if (max_iter < 0) max_iter = 50 * (n_split + m);

    Vector cost = Vector::Zero(n_split);
    Matrix a = Matrix::Zero(m, n_split);
    for (int j = 0; j < n_orig; ++j) {
        cost(plus_col[j]) = lp.objective(j);
        a.col(plus_col[j]) = lp.constraints.col(j);
        if (minus_col[j] >= 0) {
            cost(minus_col[j]) = -lp.objective(j);
            a.col(minus_col[j]) = -lp.constraints.col(j);
        }
    }

    // Slack per row; artificial where the slack cannot start basic.
    std::vector<int> artificial_rows;
    for (int r = 0; r < m; ++r)
        if (lp.bounds(r) < 0.0) artificial_rows.push_back(r);
    const int n_slack = m;
    const int n_art = static_cast<int>(artificial_rows.size());
    const int total = n_split + n_slack + n_art;

    Tableau tab;
    tab.m = m;
    tab.cols = total;
    tab.t = Matrix::Zero(m + 1, total + 1);
    tab.basis.assign(m, -1);
    for (int r = 0; r < m; ++r) {
        const double sign = lp.bounds(r) < 0.0 ? -1.0 : 1.0;
        tab.t.block(r, 0, 1, n_split) = sign * a.row(r);
        tab.t(r, n_split + r) = sign;           // slack
        tab.t(r, total) = sign * lp.bounds(r);  // rhs >= 0
        tab.basis[r] = n_split + r;
    }
    int next_art = n_split + n_slack;
    for (int r : artificial_rows) {
        tab.t(r, next_art) = 1.0;
        tab.basis[r] = next_art;
        ++next_art;
    }

    LpSolution sol;
    sol.iterations = 0;

    if (n_art > 0) {
        // Phase 1: drive the artificial variables to zero.
        for (int j = n_split + n_slack; j < total; ++j) tab.t(m, j) = 1.0;
        for (int r = 0; r < m; ++r)
            if (tab.basis[r] >= n_split + n_slack) tab.t.row(m) -= tab.t.row(r);

        const LpStatus phase1 = tab.iterate(tol, max_iter, sol.iterations);
        if (phase1 == LpStatus::iteration_limit) {
            sol.status = phase1;
            return sol;
        }
        if (-tab.t(m, total) > tol) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        // Pivot remaining artificials out of the basis; drop redundant rows.
        for (int r = m - 1; r >= 0; --r) {
            if (tab.basis[r] < n_split + n_slack) continue;
            int col = -1;
            for (int j = 0; j < n_split + n_slack; ++j) {
                if (std::abs(tab.t(r, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                tab.pivot(r, col);
            } else {
                // Redundant constraint; drop the row.
                const Eigen::Index rows = tab.t.rows();
                Matrix reduced(rows - 1, tab.t.cols());
                reduced.topRows(r) = tab.t.topRows(r);
                reduced.bottomRows(rows - 1 - r) = tab.t.bottomRows(rows - 1 - r);
                tab.t = std::move(reduced);
                tab.basis.erase(tab.basis.begin() + r);
                --tab.m;
            }
        }
        // Drop the artificial columns, keeping the rhs.
        Matrix t2(tab.m + 1, n_split + n_slack + 1);
        t2.leftCols(n_split + n_slack) = tab.t.leftCols(n_split + n_slack);
        t2.col(n_split + n_slack) = tab.t.col(total);
        tab.t = std::move(t2);
        tab.cols = n_split + n_slack;
    }

    // Phase 2 objective row.
    {
        tab.t.row(tab.m).setZero();
        tab.t.row(tab.m).head(n_split) = cost.transpose();
        for (int r = 0; r < tab.m; ++r) {
            const double cb = tab.basis[r] < n_split ? cost(tab.basis[r]) : 0.0;
            if (cb != 0.0) tab.t.row(tab.m) -= cb * tab.t.row(r);
        }
    }

    sol.status = tab.iterate(tol, max_iter, sol.iterations);
    if (sol.status != LpStatus::optimal) return sol;

    Vector y = Vector::Zero(n_split);
    for (int r = 0; r < tab.m; ++r)
        if (tab.basis[r] < n_split) y(tab.basis[r]) = tab.t(r, tab.cols);
    sol.z.resize(n_orig);
    for (int j = 0; j < n_orig; ++j)
        sol.z(j) = minus_col[j] >= 0 ? y(plus_col[j]) - y(minus_col[j]) : y(plus_col[j]);
    sol.objective_value = lp.objective.dot(sol.z);
    return sol;
}

LinearProgram omega_program(const Matrix& theta_ll, int k, double lambda) {
    const int dim = static_cast<int>(theta_ll.rows());
    if (theta_ll.cols() != dim) throw DimensionMismatch("theta_ll must be square");
    if (k < 0 || k >= dim) throw DimensionMismatch("topic index out of range");
    if (lambda < 0.0) throw Error("lambda must be nonnegative");

    LinearProgram lp;
    const int vars = 3 * dim;  // [w+ w- r]
    lp.objective = Vector::Zero(vars);
    lp.objective.head(2 * dim).setOnes();
    lp.nonneg.assign(vars, true);
    lp.constraints = Matrix::Zero(2 * dim + 1, vars);
    lp.bounds = Vector::Zero(2 * dim + 1);
    for (int a = 0; a < dim; ++a) {
        const double rhs = a == k ? 1.0 : 0.0;
        //  theta_a . (w+ - w-) - r_a <= e_k[a]
        lp.constraints.block(a, 0, 1, dim) = theta_ll.row(a);
        lp.constraints.block(a, dim, 1, dim) = -theta_ll.row(a);
        lp.constraints(a, 2 * dim + a) = -1.0;
        lp.bounds(a) = rhs;
        // -theta_a . (w+ - w-) - r_a <= -e_k[a]
        lp.constraints.block(dim + a, 0, 1, dim) = -theta_ll.row(a);
        lp.constraints.block(dim + a, dim, 1, dim) = theta_ll.row(a);
        lp.constraints(dim + a, 2 * dim + a) = -1.0;
        lp.bounds(dim + a) = -rhs;
    }
    // sum r <= lambda * sum (w+ + w-)
    lp.constraints.block(2 * dim, 0, 1, 2 * dim).setConstant(-lambda);
    lp.constraints.block(2 * dim, 2 * dim, 1, dim).setOnes();
    return lp;
}

Vector decode_omega(const Vector& z, int k_dim) {
    if (z.size() != 3 * k_dim) throw DimensionMismatch("solution vector does not match the omega encoding");
    return z.head(k_dim) - z.segment(k_dim, k_dim);
}

}  // namespace top
