#include "top/estimator.hpp"

#include "top/rng.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace top {

namespace {

std::vector<int> non_anchor_indices(int p, const AnchorPartition& partition) {
    std::vector<char> is_anchor(p, 0);
    for (const auto& group : partition.groups)
        for (int j : group) is_anchor[j] = 1;
    std::vector<int> rest;
    for (int j = 0; j < p; ++j)
        if (!is_anchor[j]) rest.push_back(j);
    return rest;
}

Matrix theta_block(const Matrix& theta, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix block(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) block(r, c) = theta(rows[r], cols[c]);
    return block;
}

// Solves the K decoupled l1 programs for the columns of Omega.
Matrix solve_omega(const Matrix& theta_ll, double lambda, std::vector<LpDiagnostic>& diagnostics) {
    const int k_dim = static_cast<int>(theta_ll.rows());
    Matrix omega(k_dim, k_dim);
    diagnostics.clear();
    for (int k = 0; k < k_dim; ++k) {
        const LinearProgram lp = omega_program(theta_ll, k, lambda);
        const LpSolution sol = solve(lp);
        diagnostics.push_back({k, sol.status, sol.objective_value, sol.iterations});
        if (sol.status != LpStatus::optimal)
            throw LpFailed("omega program for topic " + std::to_string(k + 1) + " ended " +
                               to_string(sol.status),
                           k, sol.status);
        const Vector w = decode_omega(sol.z, k_dim);
        for (int a = 0; a < k_dim; ++a)
            if (std::min(sol.z(a), sol.z(k_dim + a)) > 1e-7)
                std::cerr << "warning: omega split not complementary for topic " << k + 1 << "\n";
        omega.col(k) = w;
    }
    return omega;
}

}  // namespace

Matrix estimate_b_i(const Vector& row_sums, const AnchorPartition& partition, const RepresentativeSet& reps) {
    const int k_hat = partition.k_hat();
    if (static_cast<int>(reps.indices.size()) != k_hat)
        throw DimensionMismatch("representative set does not match the partition");
    const auto anchors = partition.anchor_set();
    Matrix b = Matrix::Zero(anchors.size(), k_hat);
    std::vector<int> slot(row_sums.size(), -1);
    for (std::size_t a = 0; a < anchors.size(); ++a) slot[anchors[a]] = static_cast<int>(a);
    for (int k = 0; k < k_hat; ++k) {
        const double rep_mass = row_sums(reps.indices[k]);
        if (!(rep_mass > 0.0)) throw ZeroRow("representative word has zero mass", reps.indices[k]);
        for (int j : partition.groups[k]) b(slot[j], k) = row_sums(j) / rep_mass;
    }
    return b;
}

Matrix estimate_b_j(const Matrix& theta, const AnchorPartition& partition, const RepresentativeSet& reps,
                    const Matrix& omega) {
    const auto rest = non_anchor_indices(static_cast<int>(theta.rows()), partition);
    if (rest.empty()) return Matrix::Zero(0, partition.k_hat());
    return (theta_block(theta, rest, reps.indices) * omega).cwiseMax(0.0);
}

Matrix normalize_columns(Matrix b, const RepresentativeSet& reps, std::vector<int>* degenerate) {
    for (int k = 0; k < b.cols(); ++k) {
        const double norm = b.col(k).cwiseAbs().sum();
        if (norm > 0.0) {
            b.col(k) /= norm;
        } else {
            b.col(k).setZero();
            b(reps.indices.at(k), k) = 1.0;
            if (degenerate) degenerate->push_back(k);
        }
    }
    return b;
}

namespace {

// Assembles one estimate of A for a fixed representative set.
Matrix assemble_a(const MomentSet& moments, const AnchorPartition& partition, const RepresentativeSet& reps,
                  const Matrix& omega, std::vector<int>* degenerate) {
    const int p = static_cast<int>(moments.row_sums.size());
    const int k_hat = partition.k_hat();
    const Matrix b_anchor = estimate_b_i(moments.row_sums, partition, reps);
    const Matrix b_rest = estimate_b_j(moments.theta_hat, partition, reps, omega);

    Matrix b = Matrix::Zero(p, k_hat);
    const auto anchors = partition.anchor_set();
    for (std::size_t a = 0; a < anchors.size(); ++a) b.row(anchors[a]) = b_anchor.row(a);
    const auto rest = non_anchor_indices(p, partition);
    for (std::size_t r = 0; r < rest.size(); ++r) b.row(rest[r]) = b_rest.row(r);
    return normalize_columns(std::move(b), reps, degenerate);
}

}  // namespace

Matrix estimate_a_for_reps(const MomentSet& moments, const AnchorPartition& partition,
                           const RepresentativeSet& reps, double lambda, std::vector<int>* degenerate,
                           std::vector<LpDiagnostic>* diagnostics) {
    const Matrix theta_ll = theta_block(moments.theta_hat, reps.indices, reps.indices);
    std::vector<LpDiagnostic> local;
    const Matrix omega = solve_omega(theta_ll, lambda, local);
    if (diagnostics) *diagnostics = std::move(local);
    return assemble_a(moments, partition, reps, omega, degenerate);
}

FitResult fit_from_moments(const MomentSet& moments, const Matrix& q,
                           std::optional<double> lambda_override, const TuningProfile& tuning) {
    validate_tuning(tuning);
    const int p = static_cast<int>(moments.r_hat.rows());

    FitResult result;
    result.partition = find_anchor_words(moments.r_hat, MarginOracle{q});
    const int k_hat = result.partition.k_hat();

    Matrix sum_a = Matrix::Zero(p, k_hat);
    std::vector<int> degenerate;
    for (int t = 0; t < tuning.t_reps; ++t) {
        Rng rng(mix_seed(tuning.seed, 0x5eaful, static_cast<std::uint64_t>(t)));
        RepresentativeSet reps;
        reps.indices.reserve(k_hat);
        for (const auto& group : result.partition.groups)
            reps.indices.push_back(group[rng.uniform_int(group.size())]);

        double lambda;
        if (lambda_override) {
            lambda = *lambda_override;
        } else {
            lambda = 0.0;
            for (int i : reps.indices) {
                double row = 0.0;
                for (int j : reps.indices) row += moments.eta_hat(i, j);
                lambda = std::max(lambda, row);
            }
            lambda *= tuning.c0;
        }

        std::vector<LpDiagnostic> diagnostics;
        degenerate.clear();
        sum_a += estimate_a_for_reps(moments, result.partition, reps, lambda, &degenerate, &diagnostics);
        for (int col : degenerate)
            if (std::find(result.degenerate_columns.begin(), result.degenerate_columns.end(), col) ==
                result.degenerate_columns.end())
                result.degenerate_columns.push_back(col);

        result.rep_sets.push_back(std::move(reps));
        result.lambdas.push_back(lambda);
        result.lp_diagnostics.push_back(std::move(diagnostics));
    }
    std::sort(result.degenerate_columns.begin(), result.degenerate_columns.end());
    result.a_hat = sum_a / static_cast<double>(tuning.t_reps);
    return result;
}

FitResult fit(const CountData& data, const TuningProfile& tuning) {
    validate_tuning(tuning);
    const MomentSet moments = compute_moments(data);
    return fit_from_moments(moments, tuning.c1 * moments.delta_anchor, std::nullopt, tuning);
}

PopulationFit population_fit(const TopicModel& model) {
    if (Eigen::ColPivHouseholderQR<Matrix>(model.w).rank() < model.k)
        throw AssumptionViolated("assumption 2 violated: W does not have full rank K", 2);
    const Assumption3Result sep = check_assumption3(model.w);
    if (!sep.holds)
        throw AssumptionViolated(
            "assumption 3 violated: rows of W are not separated (nu = " + std::to_string(sep.nu) + ")", 3);

    const PopulationMoments pm = population_moments(model);

    PopulationFit result;
    result.partition = find_anchor_words(pm.r, population_margin(pm.r));
    for (const auto& group : result.partition.groups) result.reps.indices.push_back(group.front());

    const Matrix theta_ll = theta_block(pm.theta, result.reps.indices, result.reps.indices);
    Eigen::PartialPivLU<Matrix> lu(theta_ll);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > 1e12)
        std::cerr << "warning: theta[L,L] condition number above 1e12; recovery may be inaccurate\n";

    const auto rest = non_anchor_indices(model.p, result.partition);
    // B_J = Theta_JL Theta_LL^-1, via the transposed solve.
    result.b_j = lu.solve(theta_block(pm.theta, result.reps.indices, rest)).transpose();

    const Vector pi_rows = model.pi.rowwise().sum();
    const Matrix b_anchor = estimate_b_i(pi_rows, result.partition, result.reps);

    Matrix b = Matrix::Zero(model.p, result.partition.k_hat());
    const auto anchors = result.partition.anchor_set();
    for (std::size_t a = 0; a < anchors.size(); ++a) b.row(anchors[a]) = b_anchor.row(a);
    for (std::size_t r = 0; r < rest.size(); ++r) b.row(rest[r]) = result.b_j.row(r);
    result.a_hat = normalize_columns(std::move(b), result.reps);
    return result;
}

Assumption3Result check_assumption3(const Matrix& w) {
    const int k = static_cast<int>(w.rows());
    const double n = static_cast<double>(w.cols());
    Vector row_sums = w.cwiseAbs().rowwise().sum();
    for (int i = 0; i < k; ++i)
        if (!(row_sums(i) > 0.0)) throw ZeroRow("row " + std::to_string(i + 1) + " of W is zero", i);

    Assumption3Result result;
    const Matrix w_tilde = row_sums.cwiseInverse().asDiagonal() * w;
    result.c_tilde = n * w_tilde * w_tilde.transpose();
    result.nu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            result.nu = std::min(result.nu,
                                 std::min(result.c_tilde(i, i), result.c_tilde(j, j)) - result.c_tilde(i, j));
    result.holds = result.nu > 0.0;
    return result;
}

CvReport cross_validate_c1_report(const CountData& data, const std::vector<double>& grid,
                                  double split_fraction, const TuningProfile& tuning) {
    if (grid.empty()) throw Error("cross-validation grid is empty");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw Error("split fraction must be in (0, 1)");

    std::vector<int> order(data.n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(tuning.seed, 0xc1ul, 0));
    rng.shuffle(order);
    const int n_train = std::max(1, static_cast<int>(std::ceil(split_fraction * data.n)));
    if (n_train >= data.n) throw Error("split leaves no validation documents");
    const std::vector<int> train_ids(order.begin(), order.begin() + n_train);
    const std::vector<int> valid_ids(order.begin() + n_train, order.end());

    const CountData train = prune_zero_rows(subset_documents(data, train_ids));
    const CountData valid = subset_documents(data, valid_ids);
    const MomentSet train_moments = compute_moments(train);
    const Matrix theta_valid = theta_hat(valid);

    // Map the (possibly pruned) training vocabulary back into full indices.
    std::vector<int> to_full(train.p);
    for (int j = 0; j < train.p; ++j) to_full[j] = train.kept_words[j];

    CvReport report;
    report.grid = grid;
    report.losses.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());

    TuningProfile fold = tuning;
    fold.t_reps = 1;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double c = grid[g];
        if (!(c > 0.0)) continue;
        try {
            fold.c1 = c;
            const FitResult fitted =
                fit_from_moments(train_moments, c * train_moments.delta_anchor, std::nullopt, fold);
            const auto anchors = fitted.partition.anchor_set();
            Matrix a_i(anchors.size(), fitted.partition.k_hat());
            for (std::size_t a = 0; a < anchors.size(); ++a) a_i.row(a) = fitted.a_hat.row(anchors[a]);

            const Matrix gram = a_i.transpose() * a_i;
            Eigen::FullPivLU<Matrix> lu(gram);
            if (!lu.isInvertible()) throw SingularGram("anchor Gram matrix is singular");
            const Matrix gram_inv = lu.inverse();
            const Matrix theta_ii = theta_block(train_moments.theta_hat, anchors, anchors);
            const Matrix c_hat = gram_inv * a_i.transpose() * theta_ii * a_i * gram_inv;

            Matrix a_full = Matrix::Zero(data.p, fitted.partition.k_hat());
            for (int j = 0; j < train.p; ++j) a_full.row(to_full[j]) = fitted.a_hat.row(j);
            report.losses[g] = (theta_valid - a_full * c_hat * a_full.transpose()).cwiseAbs().sum();
        } catch (const SingularGram& e) {
            std::cerr << "warning: c1 = " << c << " skipped: " << e.what() << "\n";
        } catch (const NoAnchorsFound& e) {
            std::cerr << "warning: c1 = " << c << " skipped: " << e.what() << "\n";
        } catch (const LpFailed& e) {
            std::cerr << "warning: c1 = " << c << " skipped: " << e.what() << "\n";
        }
    }

    int best = -1;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (std::isnan(report.losses[g])) continue;
        if (best < 0 || report.losses[g] < report.losses[best]) best = static_cast<int>(g);
    }
    if (best < 0) throw SingularGram("cross-validation failed for every grid value");
    report.selected = grid[best];
    return report;
}

double cross_validate_c1(const CountData& data, const std::vector<double>& grid, double split_fraction,
                         const TuningProfile& tuning) {
    return cross_validate_c1_report(data, grid, split_fraction, tuning).selected;
}

}  // namespace top
