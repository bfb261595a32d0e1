#include "top/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace top {

namespace {

// Hungarian algorithm (potentials form), assigning every row of an
// n_rows x n_cols cost matrix with n_rows <= n_cols. Returns row -> column.
std::vector<int> min_cost_assignment(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

AlignedLoss aligned_losses(const Matrix& a_hat, const Matrix& a_true) {
    if (a_hat.rows() != a_true.rows())
        throw DimensionMismatch("matrices disagree on the number of words (" + std::to_string(a_hat.rows()) +
                                " vs " + std::to_string(a_true.rows()) + ")");
    const int k_est = static_cast<int>(a_hat.cols());
    const int k_true = static_cast<int>(a_true.cols());
    const bool est_rows = k_est <= k_true;
    const int n = est_rows ? k_est : k_true;
    const int m = est_rows ? k_true : k_est;

    Matrix cost(n, m);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) {
            const int u = est_rows ? r : c;
            const int v = est_rows ? c : r;
            cost(r, c) = (a_hat.col(u) - a_true.col(v)).cwiseAbs().sum();
        }
    const std::vector<int> row_to_col = min_cost_assignment(cost);

    AlignedLoss loss;
    loss.matched = n;
    std::vector<char> col_used(m, 0);
    for (int r = 0; r < n; ++r) {
        const int c = row_to_col[r];
        col_used[c] = 1;
        const double d = cost(r, c);
        loss.l1 += d;
        loss.l1_inf = std::max(loss.l1_inf, d);
        loss.permutation.emplace_back(est_rows ? r : c, est_rows ? c : r);
    }
    for (int c = 0; c < m; ++c) {
        if (col_used[c]) continue;
        const double charge =
            est_rows ? a_true.col(c).cwiseAbs().sum() : a_hat.col(c).cwiseAbs().sum();
        loss.l1 += charge;
        loss.l1_inf = std::max(loss.l1_inf, charge);
    }
    std::sort(loss.permutation.begin(), loss.permutation.end());
    return loss;
}

double coherence(const CountData& counts, const std::vector<int>& top_words, double epsilon) {
    if (top_words.empty()) throw Error("word set is empty");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    const int t = static_cast<int>(top_words.size());
    std::vector<int> slot(counts.p, -1);
    for (int s = 0; s < t; ++s) {
        const int w = top_words[s];
        if (w < 0 || w >= counts.p) throw DimensionMismatch("word index out of range");
        slot[w] = s;
    }

    std::vector<long> present(t, 0);
    std::vector<std::vector<long>> joint(t, std::vector<long>(t, 0));
    std::vector<int> in_doc;
    for (int i = 0; i < counts.n; ++i) {
        in_doc.clear();
        for (const auto& [word, count] : counts.docs[i])
            if (slot[word] >= 0 && count > 0) in_doc.push_back(slot[word]);
        for (int a : in_doc) {
            ++present[a];
            for (int b : in_doc)
                if (a != b) ++joint[a][b];
        }
    }

    double total = 0.0;
    for (int a = 0; a < t; ++a) {
        for (int b = 0; b < t; ++b) {
            if (a == b) continue;
            if (present[b] == 0)
                throw WordNeverOccurs("word " + std::to_string(top_words[b] + 1) + " occurs in no document",
                                      top_words[b]);
            total += std::log((static_cast<double>(joint[a][b]) + epsilon) / static_cast<double>(present[b]));
        }
    }
    return total;
}

std::vector<int> top_words_of_topic(const Matrix& a_hat, int topic, int t) {
    const int p = static_cast<int>(a_hat.rows());
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + std::min(t, p), order.end(), [&](int a, int b) {
        if (a_hat(a, topic) != a_hat(b, topic)) return a_hat(a, topic) > a_hat(b, topic);
        return a < b;
    });
    order.resize(std::min(t, p));
    return order;
}

std::vector<int> unique_words(const Matrix& a_hat, int t) {
    const int p = static_cast<int>(a_hat.rows());
    const int k = static_cast<int>(a_hat.cols());
    if (t < 1 || t > p) throw DimensionMismatch("t must lie in [1, p]");

    std::vector<std::vector<char>> in_top(k, std::vector<char>(p, 0));
    std::vector<std::vector<int>> tops(k);
    for (int c = 0; c < k; ++c) {
        tops[c] = top_words_of_topic(a_hat, c, t);
        for (int w : tops[c]) in_top[c][w] = 1;
    }
    std::vector<int> counts(k, 0);
    for (int c = 0; c < k; ++c) {
        for (int w : tops[c]) {
            bool unique = true;
            for (int other = 0; other < k && unique; ++other)
                if (other != c && in_top[other][w]) unique = false;
            if (unique) ++counts[c];
        }
    }
    return counts;
}

}  // namespace top
