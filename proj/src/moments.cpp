#include "top/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace top {

namespace {

void require_lengths(const CountData& data) {
    for (int i = 0; i < data.n; ++i)
        if (data.doc_lengths[i] < 2)
            throw DocumentTooShort("document " + std::to_string(i + 1) + " is too short for the moment estimator",
                                   i);
}

Vector checked_row_sums(const CountData& data) {
    Vector sums = row_mass(data);
    for (int j = 0; j < data.p; ++j)
        if (!(sums(j) > 0.0)) throw ZeroRow("word " + std::to_string(j + 1) + " has zero total count", j);
    return sums;
}

// Accumulates sum_i w_i * X_i X_i^T over the sparse per-document support
// into the upper triangle, then mirrors. Entry order is fixed, so the
// result does not depend on threading and is exactly symmetric.
Matrix weighted_gram(const CountData& data, const Vector& weights) {
    Matrix acc = Matrix::Zero(data.p, data.p);
    for (int i = 0; i < data.n; ++i) {
        const double inv_len = 1.0 / static_cast<double>(data.doc_lengths[i]);
        const double w = weights(i);
        const auto& doc = data.docs[i];
        for (std::size_t a = 0; a < doc.size(); ++a) {
            const double xa = static_cast<double>(doc[a].second) * inv_len;
            for (std::size_t b = a; b < doc.size(); ++b) {
                const double xb = static_cast<double>(doc[b].second) * inv_len;
                acc(doc[a].first, doc[b].first) += w * xa * xb;
            }
        }
    }
    for (int j = 0; j < data.p; ++j)
        for (int l = j + 1; l < data.p; ++l) acc(l, j) = acc(j, l);
    return acc;
}

double log_m(const CountData& data) {
    std::int64_t max_len = 0;
    for (auto len : data.doc_lengths) max_len = std::max(max_len, len);
    const double m = std::max<double>({static_cast<double>(max_len), static_cast<double>(data.n),
                                       static_cast<double>(data.p)});
    return std::log(m);
}

}  // namespace

Matrix theta_hat(const CountData& data, int max_p) {
    if (data.p > max_p)
        throw DimensionLimit("vocabulary size " + std::to_string(data.p) + " exceeds the dense moment limit " +
                             std::to_string(max_p));
    require_lengths(data);

    Vector weights(data.n);
    for (int i = 0; i < data.n; ++i) {
        const double len = static_cast<double>(data.doc_lengths[i]);
        weights(i) = len / (len - 1.0);
    }
    Matrix theta = weighted_gram(data, weights);
    for (int i = 0; i < data.n; ++i) {
        const double len = static_cast<double>(data.doc_lengths[i]);
        const double scale = 1.0 / (len - 1.0) / len;
        for (const auto& [word, count] : data.docs[i]) theta(word, word) -= scale * static_cast<double>(count);
    }
    theta /= static_cast<double>(data.n);
    return theta;
}

Matrix r_hat(const CountData& data, const Matrix& theta) {
    const Vector sums = checked_row_sums(data);
    const double n = static_cast<double>(data.n);
    Matrix r(data.p, data.p);
    for (int j = 0; j < data.p; ++j)
        for (int l = 0; l < data.p; ++l) r(j, l) = n * n * theta(j, l) / (sums(j) * sums(l));
    return r;
}

namespace {

// Shared margin recipe; `use_counts` switches the observation scale between
// X_{ji} (frequencies) and Y_{ji} = N_i X_{ji} (raw counts). Document
// lengths N_i stay in the inner sums either way.
std::pair<Matrix, Matrix> margins_impl(const CountData& data, const Matrix& theta, bool use_counts) {
    require_lengths(data);
    const int p = data.p;
    const double n = static_cast<double>(data.n);
    const double lm = log_m(data);

    Vector row_sums = Vector::Zero(p);        // sum_i x_{ji}
    Vector x_inf = Vector::Zero(p);           // max_i x_{ji}
    Vector mean_x_over_n = Vector::Zero(p);   // n^-1 sum_i x_{ji} / N_i
    Vector mean_x_over_n3 = Vector::Zero(p);  // n^-1 sum_i x_{ji} / N_i^3
    double mean_inv_len = 0.0;                // n^-1 sum_i 1 / N_i
    for (int i = 0; i < data.n; ++i) {
        const double len = static_cast<double>(data.doc_lengths[i]);
        mean_inv_len += 1.0 / len;
        for (const auto& [word, count] : data.docs[i]) {
            const double x = use_counts ? static_cast<double>(count) : static_cast<double>(count) / len;
            row_sums(word) += x;
            x_inf(word) = std::max(x_inf(word), x);
            mean_x_over_n(word) += x / len;
            mean_x_over_n3(word) += x / (len * len * len);
        }
    }
    mean_inv_len /= n;
    mean_x_over_n /= n;
    mean_x_over_n3 /= n;
    for (int j = 0; j < p; ++j)
        if (!(row_sums(j) > 0.0)) throw ZeroRow("word " + std::to_string(j + 1) + " has zero total count", j);

    // cross(j,l) = n^-1 sum_i x_{ji} x_{li} / N_i
    Vector weights(data.n);
    for (int i = 0; i < data.n; ++i) {
        const double len = static_cast<double>(data.doc_lengths[i]);
        weights(i) = use_counts ? len : 1.0 / len;  // (len * x)(len * x) / len vs x * x / len
    }
    Matrix cross = weighted_gram(data, weights);
    cross /= n;

    const double c1 = 3.0 * std::sqrt(6.0);
    const double root_lm_n = std::sqrt(lm / n);
    const double c3 = 31.0 * std::sqrt(lm * lm * lm * lm / n);

    Matrix eta(p, p);
    Matrix delta(p, p);
    for (int j = 0; j < p; ++j) {
        for (int l = j; l < p; ++l) {
            const double e = c1 * (std::sqrt(x_inf(j)) + std::sqrt(x_inf(l))) * root_lm_n * std::sqrt(cross(j, l)) +
                             (2.0 * lm / n) * (x_inf(j) + x_inf(l)) * mean_inv_len +
                             c3 * std::sqrt(mean_x_over_n3(j) + mean_x_over_n3(l));
            eta(j, l) = e;
            eta(l, j) = e;
            const double d = n * n / (row_sums(j) * row_sums(l)) *
                             (e + 2.0 * theta(j, l) * root_lm_n *
                                      (n / row_sums(j) * std::sqrt(mean_x_over_n(j)) +
                                       n / row_sums(l) * std::sqrt(mean_x_over_n(l))));
            delta(j, l) = d;
            delta(l, j) = d;
        }
    }
    return {std::move(eta), std::move(delta)};
}

}  // namespace

std::pair<Matrix, Matrix> margins(const CountData& data, const Matrix& theta) {
    return margins_impl(data, theta, false);
}

std::pair<Matrix, Matrix> margins_count_scale(const CountData& data, const Matrix& theta) {
    return margins_impl(data, theta, true);
}

MomentSet compute_moments(const CountData& data, int max_p) {
    MomentSet ms;
    ms.theta_hat = theta_hat(data, max_p);
    ms.r_hat = r_hat(data, ms.theta_hat);
    std::tie(ms.eta_hat, ms.delta_hat) = margins(data, ms.theta_hat);
    ms.delta_anchor = margins_count_scale(data, ms.theta_hat).second;
    ms.row_sums = row_mass(data);
    return ms;
}

PopulationMoments population_moments(const TopicModel& model) {
    const double n = static_cast<double>(model.n);
    Vector pi_rows = model.pi.rowwise().sum();
    for (int j = 0; j < model.p; ++j)
        if (!(pi_rows(j) > 0.0))
            throw ZeroRow("word " + std::to_string(j + 1) + " has zero probability in every document", j);

    PopulationMoments pm;
    pm.theta = model.pi * model.pi.transpose() / n;
    Matrix pi_tilde = pi_rows.cwiseInverse().asDiagonal() * model.pi;
    for (int j = 0; j < model.p; ++j) {
        const double s = pi_tilde.row(j).sum();
        if (std::abs(s - 1.0) > 1e-9)
            throw Error("row " + std::to_string(j + 1) + " of the normalized probability matrix does not sum to 1");
    }
    pm.r = n * pi_tilde * pi_tilde.transpose();
    return pm;
}

std::uint64_t count_data_hash(const CountData& data) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(data.p));
    mix(static_cast<std::uint64_t>(data.n));
    for (int i = 0; i < data.n; ++i) {
        mix(static_cast<std::uint64_t>(data.doc_lengths[i]));
        for (const auto& [word, count] : data.docs[i]) {
            mix(static_cast<std::uint64_t>(word));
            mix(static_cast<std::uint64_t>(count));
        }
    }
    return h;
}

namespace {

constexpr char kCacheMagic[4] = {'T', 'O', 'P', 'M'};
constexpr std::uint32_t kCacheVersion = 2;

void write_matrix(std::ofstream& out, const Matrix& m) {
    const std::uint64_t rows = m.rows(), cols = m.cols();
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
}

bool read_matrix(std::ifstream& in, Matrix& m) {
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in || rows > (1u << 20) || cols > (1u << 20)) return false;
    m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
    return static_cast<bool>(in);
}

}  // namespace

bool save_moment_cache(const std::string& path, const CountData& data, const MomentSet& moments) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(kCacheMagic, sizeof kCacheMagic);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
    const std::uint64_t hash = count_data_hash(data);
    out.write(reinterpret_cast<const char*>(&hash), sizeof hash);
    write_matrix(out, moments.theta_hat);
    write_matrix(out, moments.r_hat);
    write_matrix(out, moments.eta_hat);
    write_matrix(out, moments.delta_hat);
    write_matrix(out, moments.delta_anchor);
    write_matrix(out, moments.row_sums);
    return static_cast<bool>(out);
}

std::optional<MomentSet> load_moment_cache(const std::string& path, const CountData& data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t hash = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&hash), sizeof hash);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0 || version != kCacheVersion ||
        hash != count_data_hash(data))
        return std::nullopt;
    MomentSet ms;
    Matrix row_sums;
    if (!read_matrix(in, ms.theta_hat) || !read_matrix(in, ms.r_hat) || !read_matrix(in, ms.eta_hat) ||
        !read_matrix(in, ms.delta_hat) || !read_matrix(in, ms.delta_anchor) || !read_matrix(in, row_sums))
        return std::nullopt;
    ms.row_sums = row_sums.col(0);
    return ms;
}

}  // namespace top
