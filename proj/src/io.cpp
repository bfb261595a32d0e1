#include "top/io.hpp"

#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace top {

namespace {

std::int64_t parse_int(const std::string& token, long line) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("expected integer, got '" + token + "' at line " + std::to_string(line), line);
    return value;
}

CountData load_uci(std::istream& in) {
    std::string token;
    long line = 0;
    auto next_int = [&](const char* what) {
        if (!(in >> token)) throw ParseError(std::string("unexpected end of input reading ") + what, line);
        ++line;
        return parse_int(token, line);
    };

    const std::int64_t n_docs = next_int("document count");
    const std::int64_t n_words = next_int("vocabulary size");
    const std::int64_t nnz = next_int("nonzero count");
    if (n_docs < 1) throw EmptyCorpus("corpus has no documents (n = 0)");
    if (n_words < 1) throw EmptyCorpus("corpus has no words (p = 0)");
    if (nnz < 0) throw ParseError("negative nonzero count", line);

    std::vector<std::vector<std::pair<int, std::int64_t>>> docs(n_docs);
    for (std::int64_t e = 0; e < nnz; ++e) {
        const std::int64_t doc = next_int("docID");
        const std::int64_t word = next_int("wordID");
        const std::int64_t count = next_int("count");
        if (doc < 1 || doc > n_docs) throw ParseError("docID " + std::to_string(doc) + " out of range", line);
        if (word < 1 || word > n_words) throw ParseError("wordID " + std::to_string(word) + " out of range", line);
        if (count < 0) throw NegativeEntry("negative count at line " + std::to_string(line));
        if (count > 0) docs[doc - 1].emplace_back(static_cast<int>(word - 1), count);
    }
    return make_count_data(static_cast<int>(n_words), std::move(docs));
}

CountData load_tsv(std::istream& in) {
    std::vector<std::vector<std::int64_t>> rows;
    std::string text;
    long line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.empty()) continue;
        std::istringstream fields(text);
        std::vector<std::int64_t> row;
        std::string token;
        while (fields >> token) row.push_back(parse_int(token, line_no));
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row with " + std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(rows.front().size()),
                             line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyCorpus("empty matrix");

    const int p = static_cast<int>(rows.size());
    const int n = static_cast<int>(rows.front().size());
    std::vector<std::vector<std::pair<int, std::int64_t>>> docs(n);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::int64_t v = rows[j][i];
            if (v < 0) throw NegativeEntry("negative count at word " + std::to_string(j + 1));
            if (v > 0) docs[i].emplace_back(j, v);
        }
    }
    return make_count_data(p, std::move(docs));
}

}  // namespace

CountData load_counts(std::istream& in, CountFormat format) {
    CountData data = format == CountFormat::uci_bow ? load_uci(in) : load_tsv(in);
    return prune_zero_rows(std::move(data));
}

void serialize_counts(const CountData& data, std::ostream& out, CountFormat format) {
    if (format == CountFormat::uci_bow) {
        std::int64_t nnz = 0;
        for (const auto& doc : data.docs) nnz += static_cast<std::int64_t>(doc.size());
        out << data.n << '\n' << data.p << '\n' << nnz << '\n';
        for (int i = 0; i < data.n; ++i)
            for (const auto& [word, count] : data.docs[i])
                out << (i + 1) << ' ' << (word + 1) << ' ' << count << '\n';
    } else {
        Matrix m = dense_counts(data);
        for (int j = 0; j < data.p; ++j) {
            for (int i = 0; i < data.n; ++i) {
                if (i) out << '\t';
                out << static_cast<std::int64_t>(m(j, i));
            }
            out << '\n';
        }
    }
}

Matrix read_matrix_tsv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string text;
    long line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.empty() || text[0] == '#') continue;
        std::istringstream fields(text);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            try {
                row.push_back(std::stod(token));
            } catch (const std::exception&) {
                throw ParseError("expected number, got '" + token + "'", line_no);
            }
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged row", line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix", 0);
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    return m;
}

void write_matrix_tsv(const Matrix& m, std::ostream& out) {
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            if (c) out << '\t';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shortest representation that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::stod(shorter) == v) return shorter;
    }
    return buf;
}

}  // namespace top
