#pragma once

#include "top/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace top {

/// Second-moment estimates for a corpus. theta_hat is the unbiased
/// co-occurrence estimator, r_hat its row-mass rescaling, and eta_hat /
/// delta_hat the entry-wise noise margins for theta_hat and r_hat
/// respectively. delta_anchor is the same margin recipe evaluated on the
/// count parameterization; it tracks the practical fluctuation scale of
/// r_hat and drives anchor selection (the frequency form is a conservative
/// large-deviation bound, orders of magnitude above the observed noise).
/// row_sums holds ||X_{j.}||_1.
struct MomentSet {
    Matrix theta_hat;
    Matrix r_hat;
    Matrix eta_hat;
    Matrix delta_hat;
    Matrix delta_anchor;
    Vector row_sums;
};

/// Theta-hat = n^-1 sum_i [ N_i/(N_i-1) X_i X_i^T - (N_i-1)^-1 diag(X_i) ],
/// accumulated per document over the sparse support and mirrored, so the
/// result is symmetric bitwise. Dense p x p output; p above max_p is a hard
/// error rather than silent memory exhaustion.
Matrix theta_hat(const CountData& data, int max_p = 20000);

/// R-hat_{jl} = n^2 theta_{jl} / (||X_{j.}||_1 ||X_{l.}||_1).
Matrix r_hat(const CountData& data, const Matrix& theta);

/// Entry-wise margins (eta_hat, delta_hat) with M = max_i N_i v n v p and
/// natural logs. Both matrices are symmetric.
std::pair<Matrix, Matrix> margins(const CountData& data, const Matrix& theta);

/// The same margin recipe evaluated on raw counts instead of frequencies
/// (row masses, maxima, and inner sums use Y_{ji} = N_i X_{ji}). This is the
/// scale at which R-hat actually fluctuates; anchor selection uses it.
std::pair<Matrix, Matrix> margins_count_scale(const CountData& data, const Matrix& theta);

MomentSet compute_moments(const CountData& data, int max_p = 20000);

/// Noiseless counterparts: Theta = n^-1 Pi Pi^T and R = (n D_Pi^-1) Theta
/// (n D_Pi^-1).
struct PopulationMoments {
    Matrix theta;
    Matrix r;
};

PopulationMoments population_moments(const TopicModel& model);

/// Content hash of a corpus (dimensions, lengths, counts); keys the cache.
std::uint64_t count_data_hash(const CountData& data);

/// Binary MomentSet cache. Load returns nullopt when the file is missing,
/// has a different version, or was written for a different corpus.
bool save_moment_cache(const std::string& path, const CountData& data, const MomentSet& moments);
std::optional<MomentSet> load_moment_cache(const std::string& path, const CountData& data);

}  // namespace top
