#pragma once

#include "top/anchors.hpp"
#include "top/lp.hpp"
#include "top/model.hpp"
#include "top/moments.hpp"

#include <optional>
#include <vector>

namespace top {

/// One representative anchor word per group, aligned with the partition.
struct RepresentativeSet {
    std::vector<int> indices;
};

struct LpDiagnostic {
    int topic = 0;
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    int iterations = 0;
};

struct FitResult {
    Matrix a_hat;  // p x k_hat, column-stochastic
    AnchorPartition partition;
    std::vector<RepresentativeSet> rep_sets;           // one per draw
    std::vector<double> lambdas;                       // one per draw
    std::vector<std::vector<LpDiagnostic>> lp_diagnostics;  // per draw, per topic
    std::vector<int> degenerate_columns;               // columns that hit the zero-column fallback
};

struct LpFailed : Error {
    LpFailed(std::string what, int topic, LpStatus status)
        : Error(std::move(what)), topic(topic), status(status) {}
    int topic;
    LpStatus status;
};

/// Full estimation pipeline: moments, margin-based anchor finding, and the
/// averaged per-draw estimates of A.
FitResult fit(const CountData& data, const TuningProfile& tuning);

/// Same pipeline starting from precomputed moments and an explicit margin
/// matrix; lambda_override skips the eta-based tuning (0 gives exact
/// interpolation). Used for noiseless injections and cross-validation.
FitResult fit_from_moments(const MomentSet& moments, const Matrix& q,
                           std::optional<double> lambda_override, const TuningProfile& tuning);

/// Anchor block of B: ratios of row masses against the representative of
/// each group, zero off-group.
Matrix estimate_b_i(const Vector& row_sums, const AnchorPartition& partition, const RepresentativeSet& reps);

/// Non-anchor block of B: (theta[J, L] * omega) clipped at zero, where J is
/// the complement of the anchor set.
Matrix estimate_b_j(const Matrix& theta, const AnchorPartition& partition, const RepresentativeSet& reps,
                    const Matrix& omega);

/// Divides each column by its l1 norm. All-zero columns fall back to a point
/// mass on that topic's representative and are reported in `degenerate`.
Matrix normalize_columns(Matrix b, const RepresentativeSet& reps, std::vector<int>* degenerate = nullptr);

/// One draw of the pipeline for a fixed representative set: solves the
/// omega programs at the given lambda, assembles B, and normalizes.
Matrix estimate_a_for_reps(const MomentSet& moments, const AnchorPartition& partition,
                           const RepresentativeSet& reps, double lambda,
                           std::vector<int>* degenerate = nullptr,
                           std::vector<LpDiagnostic>* diagnostics = nullptr);

struct PopulationFit {
    Matrix a_hat;
    AnchorPartition partition;
    RepresentativeSet reps;
    Matrix b_j;  // |J| x K, rows in ascending non-anchor order
};

/// Noiseless recovery of A from the model's Pi: population moments,
/// zero-margin anchor finding, and direct inversion of theta[L, L].
PopulationFit population_fit(const TopicModel& model);

struct Assumption3Result {
    bool holds = false;
    double nu = 0.0;
    Matrix c_tilde;  // n * W-tilde W-tilde^T
};

/// nu = min over topic pairs of (Ctt ^ Css) - Cts for the row-normalized
/// topic Gram matrix; the separation assumption holds iff nu > 0.
Assumption3Result check_assumption3(const Matrix& w);

struct CvReport {
    std::vector<double> grid;
    std::vector<double> losses;  // NaN where the fit failed or the Gram was singular
    double selected = 0.0;
};

/// Selects c1 by a random document split: fits on the training half with
/// each grid value (t_reps forced to 1) and scores the implied co-occurrence
/// reconstruction against the held-out moment estimate.
CvReport cross_validate_c1_report(const CountData& data, const std::vector<double>& grid,
                                  double split_fraction, const TuningProfile& tuning);
double cross_validate_c1(const CountData& data, const std::vector<double>& grid, double split_fraction,
                         const TuningProfile& tuning);

}  // namespace top
