#pragma once

#include "top/model.hpp"

#include <cstdint>
#include <vector>

namespace top {

/// Topic weights per document: support size uniform on {1..max(1, K/3)},
/// support uniform without replacement, entries Uniform(0,1) normalized to
/// sum 1.
Matrix generate_w(int n, int k, std::uint64_t seed);

struct GeneratedA {
    Matrix a;
    AnchorPartition partition;
};

/// Word-topic matrix with anchors_per_topic anchor rows per topic in a
/// contiguous leading block (entries K*xi) and Uniform(0,1) non-anchor rows
/// rescaled so every column sums to 1.
GeneratedA generate_a(int p, int k, int anchors_per_topic, double xi, std::uint64_t seed);

/// Independent multinomial draws per document from the columns of Pi, with
/// per-document RNG streams derived from (seed, document).
CountData sample_corpus(const TopicModel& model, const std::vector<std::int64_t>& doc_lengths,
                        std::uint64_t seed);

/// Columns i.i.d. Dirichlet(alpha).
Matrix generate_w_dirichlet(int n, int k, const Vector& alpha, std::uint64_t seed);

/// Near-block-identity weights: balanced blocks of basis columns with a
/// 1/(n*N) flattening perturbation, column sums exactly 1. Errors if n*N is
/// too small to keep entries nonnegative.
Matrix generate_w_lowerbound(int n, int k, std::int64_t total_words);

/// Softmax of a zero-mean Gaussian with block-diagonal covariance: unit
/// diagonal, off-diagonal rho inside each of n_blocks equal blocks.
Matrix generate_w_logistic_normal(int n, int k, double rho, int n_blocks, std::uint64_t seed);

/// Small built-in 6-word / 3-topic model used by demos and golden tests.
TopicModel toy_model();

/// Rejection-samples a model until W has full rank and the row-separation
/// check passes with margin; anchors come from generate_a.
TopicModel random_identifiable_model(int p, int k, int n, std::uint64_t seed);

}  // namespace top
