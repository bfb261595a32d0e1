#pragma once

#include "top/model.hpp"

#include <utility>
#include <vector>

namespace top {

/// Losses after the best column matching. permutation lists the matched
/// (estimated, true) column pairs; unmatched columns on either side are
/// charged their full l1 mass.
struct AlignedLoss {
    double l1 = 0.0;
    double l1_inf = 0.0;
    std::vector<std::pair<int, int>> permutation;
    int matched = 0;
};

/// Exact assignment (Hungarian algorithm) over the column-distance matrix
/// c[u,v] = || a_hat[.,u] - a_true[.,v] ||_1.
AlignedLoss aligned_losses(const Matrix& a_hat, const Matrix& a_true);

/// Co-occurrence score over ordered pairs (w1, w2), w1 != w2, of
/// log((docs containing both + epsilon) / docs containing w2). Word indices
/// are 0-based rows of the corpus.
double coherence(const CountData& counts, const std::vector<int>& top_words, double epsilon = 0.01);

/// For each topic, how many of its top-t words (by column weight, ties to
/// the smaller index) appear in no other topic's top-t.
std::vector<int> unique_words(const Matrix& a_hat, int t);

/// The top-t row indices of one column, by descending weight then index.
std::vector<int> top_words_of_topic(const Matrix& a_hat, int topic, int t);

}  // namespace top
