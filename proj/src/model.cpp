#include "top/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace top {

double CountData::frequency(int word, int doc) const {
    const auto& entries = docs.at(doc);
    auto it = std::lower_bound(entries.begin(), entries.end(), word,
                               [](const auto& e, int w) { return e.first < w; });
    if (it == entries.end() || it->first != word) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(doc_lengths[doc]);
}

CountData make_count_data(int p, std::vector<std::vector<std::pair<int, std::int64_t>>> docs) {
    if (p < 1) throw EmptyCorpus("corpus has no words (p = 0)");
    if (docs.empty()) throw EmptyCorpus("corpus has no documents (n = 0)");

    CountData data;
    data.p = p;
    data.n = static_cast<int>(docs.size());
    data.docs = std::move(docs);
    data.doc_lengths.resize(data.n);
    for (int i = 0; i < data.n; ++i) {
        auto& entries = data.docs[i];
        std::sort(entries.begin(), entries.end());
        std::int64_t total = 0;
        int prev = -1;
        for (const auto& [word, count] : entries) {
            if (word < 0 || word >= p)
                throw ParseError("word index " + std::to_string(word + 1) + " out of range", -1);
            if (word == prev)
                throw ParseError("duplicate word " + std::to_string(word + 1) + " in document " +
                                     std::to_string(i + 1),
                                 -1);
            if (count <= 0) throw NegativeEntry("nonpositive count in document " + std::to_string(i + 1));
            prev = word;
            total += count;
        }
        if (total < 2)
            throw DocumentTooShort(
                "document " + std::to_string(i + 1) + " has fewer than 2 words (N = " + std::to_string(total) + ")",
                i);
        data.doc_lengths[i] = total;
    }
    data.kept_words.resize(p);
    std::iota(data.kept_words.begin(), data.kept_words.end(), 0);
    return data;
}

CountData count_data_from_dense(const Matrix& counts) {
    const int p = static_cast<int>(counts.rows());
    const int n = static_cast<int>(counts.cols());
    std::vector<std::vector<std::pair<int, std::int64_t>>> docs(std::max(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
            const double v = counts(j, i);
            if (v < 0.0) throw NegativeEntry("negative count at word " + std::to_string(j + 1));
            if (v != std::floor(v)) throw ParseError("non-integer count at word " + std::to_string(j + 1), -1);
            if (v > 0.0) docs[i].emplace_back(j, static_cast<std::int64_t>(v));
        }
    }
    return make_count_data(p, std::move(docs));
}

Matrix dense_counts(const CountData& data) {
    Matrix m = Matrix::Zero(data.p, data.n);
    for (int i = 0; i < data.n; ++i)
        for (const auto& [word, count] : data.docs[i]) m(word, i) = static_cast<double>(count);
    return m;
}

CountData prune_zero_rows(CountData data) {
    std::vector<std::int64_t> totals(data.p, 0);
    for (const auto& doc : data.docs)
        for (const auto& [word, count] : doc) totals[word] += count;

    std::vector<int> remap(data.p, -1);
    std::vector<int> kept;
    kept.reserve(data.p);
    for (int j = 0; j < data.p; ++j) {
        if (totals[j] > 0) {
            remap[j] = static_cast<int>(kept.size());
            kept.push_back(data.kept_words[j]);
        }
    }
    if (kept.empty()) throw EmptyCorpus("all words have zero total count");
    if (static_cast<int>(kept.size()) == data.p) return data;

    std::cerr << "warning: pruned " << (data.p - kept.size())
              << " zero-count word(s); index remap retained\n";
    for (auto& doc : data.docs)
        for (auto& entry : doc) entry.first = remap[entry.first];
    data.p = static_cast<int>(kept.size());
    data.kept_words = std::move(kept);
    return data;
}

CountData subset_documents(const CountData& data, const std::vector<int>& doc_ids) {
    if (doc_ids.empty()) throw EmptyCorpus("document subset is empty");
    CountData out;
    out.p = data.p;
    out.n = static_cast<int>(doc_ids.size());
    out.kept_words = data.kept_words;
    out.docs.reserve(doc_ids.size());
    out.doc_lengths.reserve(doc_ids.size());
    for (int id : doc_ids) {
        out.docs.push_back(data.docs.at(id));
        out.doc_lengths.push_back(data.doc_lengths.at(id));
    }
    return out;
}

Vector row_mass(const CountData& data) {
    Vector mass = Vector::Zero(data.p);
    for (int i = 0; i < data.n; ++i) {
        const double inv_len = 1.0 / static_cast<double>(data.doc_lengths[i]);
        for (const auto& [word, count] : data.docs[i]) mass(word) += static_cast<double>(count) * inv_len;
    }
    return mass;
}

std::vector<int> AnchorPartition::anchor_set() const {
    std::vector<int> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    return all;
}

namespace {

constexpr double kColumnSumTol = 1e-9;

void check_columns_stochastic(Matrix& m, const char* name) {
    for (int c = 0; c < m.cols(); ++c) {
        if ((m.col(c).array() < 0.0).any())
            throw NegativeEntry(std::string(name) + " has a negative entry in column " + std::to_string(c + 1));
        const double sum = m.col(c).sum();
        if (std::abs(sum - 1.0) > kColumnSumTol)
            throw ColumnSumViolation(
                std::string(name) + " column " + std::to_string(c + 1) + " sums to " + std::to_string(sum), c, sum);
        m.col(c) /= sum;
    }
}

}  // namespace

TopicModel validate_topic_model(const Matrix& a, const Matrix& w) {
    if (a.cols() != w.rows())
        throw DimensionMismatch("A has " + std::to_string(a.cols()) + " columns but W has " +
                                std::to_string(w.rows()) + " rows");
    TopicModel model;
    model.a = a;
    model.w = w;
    model.p = static_cast<int>(a.rows());
    model.k = static_cast<int>(a.cols());
    model.n = static_cast<int>(w.cols());
    check_columns_stochastic(model.a, "A");
    check_columns_stochastic(model.w, "W");
    model.pi = model.a * model.w;

    model.anchor_partition.groups.assign(model.k, {});
    for (int j = 0; j < model.p; ++j) {
        int support = 0;
        int topic = -1;
        for (int k = 0; k < model.k; ++k) {
            if (model.a(j, k) > 0.0) {
                ++support;
                topic = k;
            }
        }
        if (support == 1) model.anchor_partition.groups[topic].push_back(j);
    }
    for (int k = 0; k < model.k; ++k) {
        if (model.anchor_partition.groups[k].empty())
            throw NoAnchorWord("topic " + std::to_string(k + 1) + " has no anchor word", k);
    }
    return model;
}

void validate_tuning(const TuningProfile& tuning) {
    // Zero is allowed: c1 = 0 degenerates to exact-tie anchor comparison and
    // c0 = 0 to exact interpolation in the LP stage.
    if (!(tuning.c0 >= 0.0)) throw Error("c0 must be nonnegative");
    if (!(tuning.c1 >= 0.0)) throw Error("c1 must be nonnegative");
    if (tuning.t_reps < 1) throw Error("number of representative draws must be at least 1");
}

}  // namespace top
