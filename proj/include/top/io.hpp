#pragma once

#include "top/model.hpp"

#include <iosfwd>
#include <string>

namespace top {

enum class CountFormat { uci_bow, tsv_dense };

/// Parses a corpus. UCI bag-of-words: three header lines (documents, vocab
/// size, nonzero entries) followed by "docID wordID count" triples, 1-based.
/// TSV dense: p rows of n tab-separated nonnegative integers. Zero-count
/// words are pruned (remap kept in CountData); documents shorter than two
/// words are rejected.
CountData load_counts(std::istream& in, CountFormat format);

/// Inverse of load_counts for the retained vocabulary.
void serialize_counts(const CountData& data, std::ostream& out, CountFormat format);

/// Dense TSV matrix helpers (used for A-hat output and W/A inputs).
Matrix read_matrix_tsv(std::istream& in);
void write_matrix_tsv(const Matrix& m, std::ostream& out);

std::string format_double(double v);  // shortest round-trip representation

}  // namespace top
