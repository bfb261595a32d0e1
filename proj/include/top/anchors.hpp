#pragma once

#include "top/model.hpp"

#include <iosfwd>
#include <utility>

namespace top {

/// Entry-wise comparison margins Q[j,l] for row-maximum comparisons in R.
/// Zero margins give the exact population rule.
struct MarginOracle {
    Matrix q;

    static MarginOracle zero(int p) { return {Matrix::Zero(p, p)}; }
    static MarginOracle scaled(const Matrix& delta, double c1) { return {c1 * delta}; }
};

/// Scans every row of r: takes the row argmax (ties broken by smallest
/// index), collects the indices within margin of the row maximum, and
/// accepts the row as an anchor only if each collected index j has its own
/// row maximum within margin of r[i,j]. Accepted sets are merged by
/// intersecting with the first overlapping group, else appended. Groups are
/// returned in first-discovery order.
AnchorPartition find_anchor_words(const Matrix& r, const MarginOracle& margins);

/// Uniform margin just large enough to absorb floating-point rounding in an
/// exactly computed R; used by the population (noiseless) paths.
MarginOracle population_margin(const Matrix& r);

/// (|estimated ∩ true| / |true|, |estimated^c ∩ true^c| / |true^c|) over the
/// anchor sets; the second ratio is 1 when every word is a true anchor.
std::pair<double, double> sensitivity_specificity(const AnchorPartition& estimated, const TopicModel& truth);

/// One line per group, whitespace-separated 1-based word indices, in
/// discovery order.
void write_partition(const AnchorPartition& partition, std::ostream& out);

}  // namespace top
