// Test-only reference oracles, independent of the implementation paths they
// check: exhaustive vertex enumeration for small LPs and factorial search
// for column alignment.
#pragma once

#include "top/lp.hpp"
#include "top/model.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace top::testing {

// min c.x over G x <= b, x >= 0 by enumerating basic solutions of the
// slack-augmented system: every vertex picks m basic columns among n + m.
inline double enumerate_min_objective(const LinearProgram& lp) {
    const int n = static_cast<int>(lp.objective.size());
    const int m = static_cast<int>(lp.bounds.size());
    Matrix full(m, n + m);
    full.leftCols(n) = lp.constraints;
    full.rightCols(m) = Matrix::Identity(m, m);

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        Matrix basis(m, m);
        for (int c = 0; c < m; ++c) basis.col(c) = full.col(idx[c]);
        Eigen::FullPivLU<Matrix> lu(basis);
        if (lu.isInvertible()) {
            const Vector xb = lu.solve(lp.bounds);
            if ((xb.array() >= -1e-9).all()) {
                double objective = 0.0;
                for (int c = 0; c < m; ++c)
                    if (idx[c] < n) objective += lp.objective(idx[c]) * xb(c);
                best = std::min(best, objective);
            }
        }
        int i = m - 1;
        while (i >= 0 && idx[i] == n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

// All-permutations alignment for equal column counts, summing matched
// distances in ascending estimated-column order.
inline double brute_force_l1(const Matrix& a_hat, const Matrix& a_true) {
    const int k = static_cast<int>(a_hat.cols());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int u = 0; u < k; ++u) total += (a_hat.col(u) - a_true.col(perm[u])).cwiseAbs().sum();
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace top::testing
