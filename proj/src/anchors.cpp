#include "top/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <ostream>

namespace top {

namespace {

int row_argmax(const Matrix& r, int row) {
    int best = 0;
    for (int j = 1; j < r.cols(); ++j)
        if (r(row, j) > r(row, best)) best = j;
    return best;
}

}  // namespace

AnchorPartition find_anchor_words(const Matrix& r, const MarginOracle& margins) {
    const int p = static_cast<int>(r.rows());
    if (r.cols() != p) throw DimensionMismatch("R must be square");
    if (margins.q.rows() != p || margins.q.cols() != p)
        throw DimensionMismatch("margin matrix does not match R");
    if (!r.allFinite()) throw Error("R contains non-finite entries");
    const Matrix& q = margins.q;

    std::vector<int> argmax(p);
    for (int i = 0; i < p; ++i) argmax[i] = row_argmax(r, i);

    AnchorPartition partition;
    std::vector<int> candidate;
    for (int i = 0; i < p; ++i) {
        const int ai = argmax[i];
        candidate.clear();
        for (int l = 0; l < p; ++l)
            if (r(i, ai) - r(i, l) <= q(i, ai) + q(i, l)) candidate.push_back(l);

        bool anchor = true;
        for (int j : candidate) {
            const int aj = argmax[j];
            if (std::abs(r(i, j) - r(j, aj)) > q(i, j) + q(j, aj)) {
                anchor = false;
                break;
            }
        }
        if (!anchor) continue;

        // Merge: intersect with the first overlapping group, else append.
        bool merged = false;
        for (auto& group : partition.groups) {
            std::vector<int> intersection;
            std::set_intersection(group.begin(), group.end(), candidate.begin(), candidate.end(),
                                  std::back_inserter(intersection));
            if (!intersection.empty()) {
                group = std::move(intersection);
                merged = true;
                break;
            }
        }
        if (!merged) partition.groups.push_back(candidate);
    }

    std::erase_if(partition.groups, [](const std::vector<int>& g) {
        if (g.empty()) std::cerr << "warning: dropped group emptied by merge\n";
        return g.empty();
    });
    if (partition.groups.empty())
        throw NoAnchorsFound("no anchor words found; margins may be misconfigured or the data non-separable");
    return partition;
}

MarginOracle population_margin(const Matrix& r) {
    const double eps = 1e-9 * r.cwiseAbs().maxCoeff();
    return {Matrix::Constant(r.rows(), r.cols(), eps)};
}

std::pair<double, double> sensitivity_specificity(const AnchorPartition& estimated, const TopicModel& truth) {
    std::vector<char> in_est(truth.p, 0), in_true(truth.p, 0);
    for (const auto& group : estimated.groups)
        for (int j : group) {
            if (j < 0 || j >= truth.p) throw DimensionMismatch("estimated partition refers to an unknown word");
            in_est[j] = 1;
        }
    for (const auto& group : truth.anchor_partition.groups)
        for (int j : group) in_true[j] = 1;

    int true_anchors = 0, true_non = 0, hit = 0, reject = 0;
    for (int j = 0; j < truth.p; ++j) {
        if (in_true[j]) {
            ++true_anchors;
            if (in_est[j]) ++hit;
        } else {
            ++true_non;
            if (!in_est[j]) ++reject;
        }
    }
    const double sensitivity = true_anchors ? static_cast<double>(hit) / true_anchors : 1.0;
    const double specificity = true_non ? static_cast<double>(reject) / true_non : 1.0;
    return {sensitivity, specificity};
}

void write_partition(const AnchorPartition& partition, std::ostream& out) {
    for (const auto& group : partition.groups) {
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (i) out << ' ';
            out << group[i] + 1;
        }
        out << '\n';
    }
}

}  // namespace top
