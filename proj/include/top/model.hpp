#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace top {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Errors thrown by the library. All user-facing indices in messages are
// 1-based; the stored fields are 0-based like the rest of the API.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ColumnSumViolation : Error {
    ColumnSumViolation(std::string what, int column, double sum)
        : Error(std::move(what)), column(column), sum(sum) {}
    int column;
    double sum;
};

struct NegativeEntry : Error {
    using Error::Error;
};

struct NoAnchorWord : Error {
    NoAnchorWord(std::string what, int topic) : Error(std::move(what)), topic(topic) {}
    int topic;
};

struct ParseError : Error {
    ParseError(std::string what, long line) : Error(std::move(what)), line(line) {}
    long line;
};

struct DocumentTooShort : Error {
    DocumentTooShort(std::string what, int document) : Error(std::move(what)), document(document) {}
    int document;
};

struct EmptyCorpus : Error {
    using Error::Error;
};

struct ZeroRow : Error {
    ZeroRow(std::string what, int row) : Error(std::move(what)), row(row) {}
    int row;
};

struct DimensionLimit : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NoAnchorsFound : Error {
    using Error::Error;
};

struct InfeasibleXi : Error {
    using Error::Error;
};

struct WordNeverOccurs : Error {
    WordNeverOccurs(std::string what, int word) : Error(std::move(what)), word(word) {}
    int word;
};

struct SingularGram : Error {
    using Error::Error;
};

struct AssumptionViolated : Error {
    AssumptionViolated(std::string what, int which) : Error(std::move(what)), which(which) {}
    int which;  // 1: anchor words, 2: full rank, 3: row separation
};

/// Word-count corpus: p words by n documents, stored per document as sorted
/// (word, count) pairs. Column sums equal doc_lengths; every N_i >= 2.
/// kept_words maps row index -> original word index from before zero-row
/// pruning (identity when nothing was pruned).
struct CountData {
    int p = 0;
    int n = 0;
    std::vector<std::vector<std::pair<int, std::int64_t>>> docs;
    std::vector<std::int64_t> doc_lengths;
    std::vector<int> kept_words;

    double frequency(int word, int doc) const;  // X_{ji} = Y_{ji} / N_i
};

/// Builds CountData from per-document (word, count) lists, validating the
/// invariants (counts > 0, N_i >= 2, dimensions). Does not prune.
CountData make_count_data(int p, std::vector<std::vector<std::pair<int, std::int64_t>>> docs);

/// Dense round trips used by tests and the TSV format.
CountData count_data_from_dense(const Matrix& counts);
Matrix dense_counts(const CountData& data);

/// Drops words with zero total count, recording the remap in kept_words.
/// Emits a warning to stderr when anything is pruned.
CountData prune_zero_rows(CountData data);

/// Keeps the listed documents (in the given order); vocabulary unchanged.
CountData subset_documents(const CountData& data, const std::vector<int>& doc_ids);

/// Row masses ||X_{j.}||_1 = sum_i Y_{ji}/N_i, length p.
Vector row_mass(const CountData& data);

/// Estimated anchor structure: disjoint nonempty groups of word indices in
/// discovery order; k_hat() is the estimated number of topics.
struct AnchorPartition {
    std::vector<std::vector<int>> groups;

    int k_hat() const { return static_cast<int>(groups.size()); }
    std::vector<int> anchor_set() const;  // sorted union of all groups
};

/// Ground-truth model (A, W, Pi = A*W) with the anchor partition read off
/// A's support. Columns of A, W, Pi are probability vectors.
struct TopicModel {
    Matrix a;
    Matrix w;
    Matrix pi;
    int p = 0;
    int k = 0;
    int n = 0;
    AnchorPartition anchor_partition;
};

/// Checks nonnegativity and unit column sums (renormalizing deviations up to
/// 1e-9), computes Pi, and extracts the anchor partition. Throws NoAnchorWord
/// if some topic has no row supported on it alone.
TopicModel validate_topic_model(const Matrix& a, const Matrix& w);

struct TuningProfile {
    double c0 = 0.01;
    double c1 = 1.1;
    int t_reps = 1;
    std::uint64_t seed = 0;
};

void validate_tuning(const TuningProfile& tuning);

}  // namespace top
