#include "top/synth.hpp"

#include "top/estimator.hpp"
#include "top/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace top {

Matrix generate_w(int n, int k, std::uint64_t seed) {
    if (n < 1 || k < 1) throw Error("W dimensions must be positive");
    const int max_support = std::max(1, k / 3);
    Matrix w = Matrix::Zero(k, n);
    Rng rng(mix_seed(seed, 0x77ul, 0));
    std::vector<int> topics(k);
    for (int i = 0; i < n; ++i) {
        const int support = 1 + static_cast<int>(rng.uniform_int(max_support));
        std::iota(topics.begin(), topics.end(), 0);
        // Partial Fisher-Yates: the first `support` slots are a uniform draw
        // without replacement.
        for (int s = 0; s < support; ++s)
            std::swap(topics[s], topics[s + rng.uniform_int(k - s)]);
        double sum = 0.0;
        for (int s = 0; s < support; ++s) {
            const double v = rng.uniform_real();
            w(topics[s], i) = v;
            sum += v;
        }
        if (sum > 0.0)
            w.col(i) /= sum;
        else
            w(topics[0], i) = 1.0;
    }
    return w;
}

GeneratedA generate_a(int p, int k, int anchors_per_topic, double xi, std::uint64_t seed) {
    if (p < 1 || k < 1) throw Error("A dimensions must be positive");
    if (anchors_per_topic < 1) throw InfeasibleXi("at least one anchor word per topic is required");
    if (static_cast<std::int64_t>(k) * anchors_per_topic >= p)
        throw InfeasibleXi("anchor rows leave no room for non-anchor words");
    if (!(xi > 0.0) || k * xi * anchors_per_topic >= 1.0)
        throw InfeasibleXi("anchor mass K*xi*|I_k| must lie in (0, 1)");

    const int n_anchor = k * anchors_per_topic;
    Matrix a = Matrix::Zero(p, k);
    GeneratedA out;
    out.partition.groups.assign(k, {});
    for (int t = 0; t < k; ++t) {
        for (int s = 0; s < anchors_per_topic; ++s) {
            const int row = t * anchors_per_topic + s;
            a(row, t) = k * xi;
            out.partition.groups[t].push_back(row);
        }
    }
    Rng rng(mix_seed(seed, 0xa1ul, 0));
    for (int j = n_anchor; j < p; ++j)
        for (int t = 0; t < k; ++t) a(j, t) = rng.uniform_real();
    const double target = 1.0 - anchors_per_topic * k * xi;
    for (int t = 0; t < k; ++t) {
        const double sum = a.col(t).tail(p - n_anchor).sum();
        if (sum > 0.0)
            a.col(t).tail(p - n_anchor) *= target / sum;
        else
            a.col(t).tail(p - n_anchor).setConstant(target / (p - n_anchor));
    }
    out.a = std::move(a);
    return out;
}

CountData sample_corpus(const TopicModel& model, const std::vector<std::int64_t>& doc_lengths,
                        std::uint64_t seed) {
    if (static_cast<int>(doc_lengths.size()) != model.n)
        throw DimensionMismatch("doc_lengths does not match the model");
    std::vector<std::vector<std::pair<int, std::int64_t>>> docs(model.n);
    for (int i = 0; i < model.n; ++i) {
        if (doc_lengths[i] < 2)
            throw DocumentTooShort("requested length below 2 for document " + std::to_string(i + 1), i);
        Rng rng(mix_seed(seed, 0xd0c5ul, static_cast<std::uint64_t>(i)));
        std::int64_t remaining = doc_lengths[i];
        double rest = 1.0;
        int last_positive = -1;
        for (int j = model.p - 1; j >= 0; --j)
            if (model.pi(j, i) > 0.0) {
                last_positive = j;
                break;
            }
        for (int j = 0; j < model.p && remaining > 0; ++j) {
            const double prob = model.pi(j, i);
            if (prob <= 0.0) continue;
            std::int64_t draw;
            if (j == last_positive) {
                draw = remaining;  // conditional mass is 1
            } else {
                draw = rng.binomial(remaining, std::clamp(prob / rest, 0.0, 1.0));
            }
            if (draw > 0) docs[i].emplace_back(j, draw);
            remaining -= draw;
            rest -= prob;
        }
    }
    return make_count_data(model.p, std::move(docs));
}

Matrix generate_w_dirichlet(int n, int k, const Vector& alpha, std::uint64_t seed) {
    if (alpha.size() != k) throw DimensionMismatch("alpha length must equal K");
    if ((alpha.array() <= 0.0).any()) throw Error("Dirichlet parameters must be positive");
    Matrix w(k, n);
    Rng rng(mix_seed(seed, 0xd1ul, 0));
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int t = 0; t < k; ++t) {
            const double g = rng.gamma(alpha(t));
            w(t, i) = g;
            sum += g;
        }
        if (sum > 0.0)
            w.col(i) /= sum;
        else
            w.col(i).setConstant(1.0 / k);
    }
    return w;
}

Matrix generate_w_lowerbound(int n, int k, std::int64_t total_words) {
    if (k < 1 || n < k) throw Error("need at least one document per topic");
    if (total_words < 1) throw Error("total_words must be positive");
    const double nn = static_cast<double>(n) * static_cast<double>(total_words);
    const double diag = 1.0 - static_cast<double>(k - 1) / nn;
    if (diag < 0.0)
        throw NegativeEntry("n*N too small: the block entry 1 - (K-1)/(nN) is negative");

    Matrix w = Matrix::Constant(k, n, 1.0 / nn);
    // Balanced blocks: the first n % k blocks get one extra document.
    int doc = 0;
    for (int t = 0; t < k; ++t) {
        const int size = n / k + (t < n % k ? 1 : 0);
        for (int s = 0; s < size; ++s) w(t, doc++) = diag;
    }
    return w;
}

Matrix generate_w_logistic_normal(int n, int k, double rho, int n_blocks, std::uint64_t seed) {
    if (n_blocks < 1 || k % n_blocks != 0)
        throw Error("number of blocks must divide K");
    if (rho < 0.0 || rho >= 1.0) throw Error("rho must lie in [0, 1)");
    const int block = k / n_blocks;
    Matrix w(k, n);
    Rng rng(mix_seed(seed, 0x10ul, 0));
    const double shared = std::sqrt(rho), own = std::sqrt(1.0 - rho);
    for (int i = 0; i < n; ++i) {
        double max_z = -std::numeric_limits<double>::infinity();
        Vector z(k);
        for (int b = 0; b < n_blocks; ++b) {
            const double g = rng.normal();
            for (int s = 0; s < block; ++s) {
                const int t = b * block + s;
                z(t) = shared * g + own * rng.normal();
                max_z = std::max(max_z, z(t));
            }
        }
        const Vector e = (z.array() - max_z).exp();
        w.col(i) = e / e.sum();
    }
    return w;
}

TopicModel toy_model() {
    Matrix a(6, 3);
    a << 0.3, 0.0, 0.0,
         0.2, 0.0, 0.0,
         0.0, 0.5, 0.0,
         0.0, 0.0, 0.4,
         0.2, 0.5, 0.3,
         0.3, 0.0, 0.3;
    Matrix w(3, 3);
    w << 0.6, 0.2, 0.2,
         0.3, 0.7, 0.0,
         0.1, 0.1, 0.8;
    return validate_topic_model(a, w);
}

TopicModel random_identifiable_model(int p, int k, int n, std::uint64_t seed) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const std::uint64_t s = mix_seed(seed, 0x1dul, static_cast<std::uint64_t>(attempt));
        Rng rng(mix_seed(s, 0x2ul, 0));
        const int max_anchors = std::max(1, (p - 1) / (2 * k));
        const int anchors = 1 + static_cast<int>(rng.uniform_int(std::min(max_anchors, 2)));
        const double xi = (0.2 + 0.6 * rng.uniform_real()) / (k * anchors);
        GeneratedA gen = generate_a(p, k, anchors, xi, mix_seed(s, 0x3ul, 0));

        // Alternate between sparse-support and Dirichlet topic weights.
        Matrix w;
        if (attempt % 2 == 0) {
            w = generate_w(n, k, mix_seed(s, 0x4ul, 0));
        } else {
            w = generate_w_dirichlet(n, k, Vector::Constant(k, 0.3), mix_seed(s, 0x4ul, 0));
        }
        if (Eigen::ColPivHouseholderQR<Matrix>(w).rank() < k) continue;
        bool zero_row = false;
        for (int t = 0; t < k && !zero_row; ++t) zero_row = w.row(t).sum() <= 0.0;
        if (zero_row) continue;
        if (check_assumption3(w).nu < 0.02) continue;
        return validate_topic_model(gen.a, w);
    }
    throw AssumptionViolated("could not sample an identifiable model after 1000 attempts", 3);
}

}  // namespace top
