#include "doctest.h"

#include "top/estimator.hpp"
#include "top/io.hpp"
#include "top/rng.hpp"
#include "top/synth.hpp"

#include <cmath>

using namespace top;

namespace {

// Noiseless moment set for a model: population Theta/R, Pi row sums, zero
// noise margins.
MomentSet noiseless_moments(const TopicModel& model) {
    const PopulationMoments pm = population_moments(model);
    MomentSet ms;
    ms.theta_hat = pm.theta;
    ms.r_hat = pm.r;
    ms.eta_hat = Matrix::Zero(model.p, model.p);
    ms.delta_hat = Matrix::Zero(model.p, model.p);
    ms.delta_anchor = Matrix::Zero(model.p, model.p);
    ms.row_sums = model.pi.rowwise().sum();
    return ms;
}

Matrix expected_toy_b_j() {
    Matrix b(2, 3);
    b << 2.0 / 3.0, 1.0, 0.75,
         1.0, 0.0, 0.75;
    return b;
}

}  // namespace

TEST_CASE("noiseless injection reproduces the toy A through the LP route") {
    const TopicModel model = toy_model();
    const MomentSet ms = noiseless_moments(model);
    const Matrix q = population_margin(ms.r_hat).q;

    TuningProfile tuning;
    tuning.t_reps = 1;
    tuning.seed = 5;
    const FitResult result = fit_from_moments(ms, q, 0.0, tuning);
    REQUIRE(result.partition.k_hat() == 3);
    CHECK(result.partition.groups == std::vector<std::vector<int>>{{0, 1}, {2}, {3}});
    CHECK((result.a_hat - model.a).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(result.lambdas == std::vector<double>{0.0});

    // Intermediate B_J for the canonical representative set {1, 3, 4}.
    RepresentativeSet reps{{0, 2, 3}};
    Matrix omega(3, 3);
    {
        const auto idx = reps.indices;
        Matrix theta_ll(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) theta_ll(a, b) = ms.theta_hat(idx[a], idx[b]);
        omega = theta_ll.inverse();
    }
    const Matrix b_j = estimate_b_j(ms.theta_hat, result.partition, reps, omega);
    CHECK((b_j - expected_toy_b_j()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("estimate_b_i ratios against the representative") {
    const TopicModel model = toy_model();
    const Vector pi_rows = model.pi.rowwise().sum();
    AnchorPartition partition;
    partition.groups = {{0, 1}, {2}, {3}};

    SUBCASE("canonical representative set") {
        const Matrix b = estimate_b_i(pi_rows, partition, RepresentativeSet{{0, 2, 3}});
        REQUIRE(b.rows() == 4);
        CHECK(b(0, 0) == doctest::Approx(1.0));
        CHECK(b(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(b(2, 1) == doctest::Approx(1.0));
        CHECK(b(3, 2) == doctest::Approx(1.0));
        CHECK(b(2, 0) == 0.0);  // off-group entries stay zero
    }
    SUBCASE("swapping the representative inverts the ratio") {
        const Matrix b = estimate_b_i(pi_rows, partition, RepresentativeSet{{1, 2, 3}});
        CHECK(b(1, 0) == doctest::Approx(1.0));
        CHECK(b(0, 0) == doctest::Approx(3.0 / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("estimate_b_j clips negatives to exactly zero") {
    AnchorPartition partition;
    partition.groups = {{0}, {1}};
    RepresentativeSet reps{{0, 1}};
    Matrix theta(3, 3);
    theta << 1.0, 0.0, -0.4,
             0.0, 1.0, 0.2,
             -0.4, 0.2, 1.0;
    SUBCASE("omega zero gives a zero matrix") {
        const Matrix b = estimate_b_j(theta, partition, reps, Matrix::Zero(2, 2));
        CHECK(b.rows() == 1);
        CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("negative products clip") {
        const Matrix b = estimate_b_j(theta, partition, reps, Matrix::Identity(2, 2));
        CHECK(b(0, 0) == 0.0);  // theta(2,0) = -0.4 clipped
        CHECK(b(0, 1) == doctest::Approx(0.2));
    }
}

TEST_CASE("normalize_columns") {
    SUBCASE("toy stacked B yields the printed A") {
        const TopicModel model = toy_model();
        Matrix b(6, 3);
        b << 1.0, 0, 0,
             2.0 / 3.0, 0, 0,
             0, 1.0, 0,
             0, 0, 1.0,
             2.0 / 3.0, 1.0, 0.75,
             1.0, 0.0, 0.75;
        const Matrix a = normalize_columns(b, RepresentativeSet{{0, 2, 3}});
        CHECK((a - model.a).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(a(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(a(1, 0) == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("column-stochastic input is unchanged") {
        const Matrix a = toy_model().a;
        const Matrix again = normalize_columns(a, RepresentativeSet{{0, 2, 3}});
        CHECK((again - a).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("zero column falls back to the representative point mass") {
        Matrix b = Matrix::Zero(4, 2);
        b.col(0) << 1, 2, 3, 4;
        std::vector<int> degenerate;
        const Matrix a = normalize_columns(b, RepresentativeSet{{0, 2}}, &degenerate);
        CHECK(degenerate == std::vector<int>{1});
        CHECK(a(2, 1) == 1.0);
        CHECK(a.col(1).sum() == 1.0);
    }
}

TEST_CASE("single group: A-hat is the vector of row-mass shares") {
    MomentSet ms;
    const int p = 4;
    ms.r_hat = Matrix::Constant(p, p, 3.0);
    ms.theta_hat = Matrix::Identity(p, p);
    ms.eta_hat = Matrix::Zero(p, p);
    ms.delta_hat = Matrix::Zero(p, p);
    ms.row_sums.resize(p);
    ms.row_sums << 1.0, 2.0, 3.0, 4.0;
    const FitResult result = fit_from_moments(ms, Matrix::Zero(p, p), 0.0, TuningProfile{});
    REQUIRE(result.partition.k_hat() == 1);
    for (int j = 0; j < p; ++j)
        CHECK(result.a_hat(j, 0) == doctest::Approx(ms.row_sums(j) / 10.0).epsilon(1e-12));
}

TEST_CASE("fit propagates anchor and LP failures") {
    SUBCASE("NoAnchorsFound") {
        MomentSet ms;
        ms.r_hat.resize(2, 2);
        ms.r_hat << 0.0, 1.0,
                    2.0, 0.5;
        ms.theta_hat = Matrix::Identity(2, 2);
        ms.eta_hat = Matrix::Zero(2, 2);
        ms.delta_hat = Matrix::Zero(2, 2);
        ms.row_sums = Vector::Ones(2);
        CHECK_THROWS_AS(fit_from_moments(ms, Matrix::Zero(2, 2), 0.0, TuningProfile{}), NoAnchorsFound);
    }
    SUBCASE("LpFailed on an unreachable interpolation") {
        MomentSet ms;
        ms.r_hat.resize(2, 2);
        ms.r_hat << 2.0, 0.1,
                    0.1, 2.0;
        ms.theta_hat.resize(2, 2);
        ms.theta_hat << 1.0, 1.0,
                        1.0, 1.0;  // singular: lambda = 0 cannot interpolate
        ms.eta_hat = Matrix::Zero(2, 2);
        ms.delta_hat = Matrix::Zero(2, 2);
        ms.row_sums = Vector::Ones(2);
        CHECK_THROWS_AS(fit_from_moments(ms, Matrix::Zero(2, 2), 0.0, TuningProfile{}), LpFailed);
    }
}

TEST_CASE("lambda follows the representative-set eta sums") {
    const TopicModel model = random_identifiable_model(12, 3, 30, 3);
    const CountData data = sample_corpus(model, std::vector<std::int64_t>(30, 60), 17);
    const CountData pruned = prune_zero_rows(data);
    const MomentSet ms = compute_moments(pruned);

    TuningProfile tuning;
    tuning.c0 = 0.02;
    tuning.t_reps = 3;
    tuning.seed = 9;
    const FitResult result = fit(pruned, tuning);
    REQUIRE(result.rep_sets.size() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
        double expected = 0.0;
        for (int i : result.rep_sets[t].indices) {
            double row = 0.0;
            for (int j : result.rep_sets[t].indices) row += ms.eta_hat(i, j);
            expected = std::max(expected, row);
        }
        CHECK(result.lambdas[t] == 0.02 * expected);
    }
}

TEST_CASE("fit output is column-stochastic and seed-deterministic") {
    const TopicModel model = random_identifiable_model(20, 4, 40, 21);
    const CountData data = prune_zero_rows(sample_corpus(model, std::vector<std::int64_t>(40, 80), 4));
    TuningProfile tuning;
    tuning.t_reps = 2;
    tuning.seed = 77;
    const FitResult a = fit(data, tuning);
    const FitResult b = fit(data, tuning);
    CHECK((a.a_hat - b.a_hat).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.rep_sets.size() == b.rep_sets.size());
    for (std::size_t t = 0; t < a.rep_sets.size(); ++t)
        CHECK(a.rep_sets[t].indices == b.rep_sets[t].indices);
    for (int c = 0; c < a.a_hat.cols(); ++c) {
        CHECK(a.a_hat.col(c).sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK((a.a_hat.col(c).array() >= 0.0).all());
    }
}

TEST_CASE("averaged A-hat is the exact mean of the per-draw estimates") {
    const TopicModel model = random_identifiable_model(16, 3, 30, 8);
    const CountData data = prune_zero_rows(sample_corpus(model, std::vector<std::int64_t>(30, 70), 12));
    const MomentSet ms = compute_moments(data);
    TuningProfile tuning;
    tuning.t_reps = 4;
    tuning.seed = 1;
    const FitResult result = fit(data, tuning);
    REQUIRE(result.rep_sets.size() == 4);

    Matrix mean = Matrix::Zero(result.a_hat.rows(), result.a_hat.cols());
    for (std::size_t t = 0; t < 4; ++t)
        mean += estimate_a_for_reps(ms, result.partition, result.rep_sets[t], result.lambdas[t]);
    mean /= 4.0;
    CHECK((result.a_hat - mean).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 0; c < result.a_hat.cols(); ++c)
        CHECK(result.a_hat.col(c).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit handles unequal document lengths") {
    const TopicModel model = random_identifiable_model(18, 3, 36, 44);
    Rng rng(6);
    std::vector<std::int64_t> lengths(36);
    for (auto& len : lengths) len = 20 + static_cast<std::int64_t>(rng.uniform_int(120));
    const CountData data = prune_zero_rows(sample_corpus(model, lengths, 15));
    TuningProfile tuning;
    tuning.seed = 3;
    const FitResult a = fit(data, tuning);
    const FitResult b = fit(data, tuning);
    CHECK((a.a_hat - b.a_hat).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 0; c < a.a_hat.cols(); ++c)
        CHECK(a.a_hat.col(c).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("population_fit recovers the toy model") {
    const TopicModel model = toy_model();
    const PopulationFit result = population_fit(model);
    REQUIRE(result.partition.k_hat() == 3);
    CHECK(result.reps.indices == std::vector<int>{0, 2, 3});
    CHECK((result.b_j - expected_toy_b_j()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((result.a_hat - model.a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("population_fit on an all-anchor model skips the B_J block") {
    Matrix a(3, 3);
    a << 1, 0, 0,
         0, 1, 0,
         0, 0, 1;
    Matrix w(3, 4);
    w << 0.6, 0.2, 0.1, 0.3,
         0.3, 0.2, 0.8, 0.3,
         0.1, 0.6, 0.1, 0.4;
    const TopicModel model = validate_topic_model(a, w);
    const PopulationFit result = population_fit(model);
    CHECK(result.b_j.rows() == 0);
    CHECK((result.a_hat - model.a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("population_fit is exact on random identifiable models") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const TopicModel model = random_identifiable_model(10 + static_cast<int>(seed * 2), 2 + seed % 4,
                                                           20 + static_cast<int>(seed), seed);
        const PopulationFit result = population_fit(model);
        REQUIRE(result.partition.k_hat() == model.k);
        // Align columns: match each true topic to the estimated column with
        // the smallest l1 distance.
        double worst = 0.0;
        for (int k = 0; k < model.k; ++k) {
            double best = 1e9;
            for (int c = 0; c < model.k; ++c)
                best = std::min(best, (result.a_hat.col(c) - model.a.col(k)).cwiseAbs().sum());
            worst = std::max(worst, best);
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("population_fit validates assumptions") {
    Matrix a(4, 2);
    a << 0.5, 0.0,
         0.0, 0.5,
         0.3, 0.2,
         0.2, 0.3;
    SUBCASE("rank-deficient W") {
        Matrix w(2, 3);
        w << 0.5, 0.5, 0.5,
             0.5, 0.5, 0.5;
        const TopicModel model = validate_topic_model(a, w);
        CHECK_THROWS_AS(population_fit(model), AssumptionViolated);
    }
    SUBCASE("row-separation failure") {
        Matrix w(4, 5);
        w << 0.5, 0.4, 0.0, 0.0, 0.9,
             0.2, 0.6, 0.5, 0.5, 0.0,
             0.3, 0.0, 0.5, 0.5, 0.0,
             0.0, 0.0, 0.0, 0.0, 0.1;
        Matrix a4(5, 4);
        a4 << 0.5, 0.0, 0.0, 0.0,
              0.0, 0.5, 0.0, 0.0,
              0.0, 0.0, 0.5, 0.0,
              0.0, 0.0, 0.0, 0.5,
              0.5, 0.5, 0.5, 0.5;
        const TopicModel model = validate_topic_model(a4, w);
        try {
            population_fit(model);
            FAIL("expected AssumptionViolated");
        } catch (const AssumptionViolated& e) {
            CHECK(e.which == 3);
        }
    }
}

TEST_CASE("check_assumption3 matches the worked examples") {
    SUBCASE("rare but pronounced topic") {
        Matrix w(4, 5);
        w << 0.5, 0.4, 0.0, 0.0, 0.4,
             0.2, 0.6, 0.5, 0.5, 0.0,
             0.3, 0.0, 0.5, 0.5, 0.1,
             0.0, 0.0, 0.0, 0.0, 0.5;
        const Assumption3Result res = check_assumption3(w);
        CHECK(res.holds);
        // Printed values are C-tilde without the document-count factor.
        const Matrix scaled = res.c_tilde / 5.0;
        CHECK(scaled(0, 0) == doctest::Approx(0.34).epsilon(0.02));
        CHECK(scaled(0, 3) == doctest::Approx(0.31).epsilon(0.02));
    }
    SUBCASE("rare topic with small probability") {
        Matrix w(4, 5);
        w << 0.5, 0.4, 0.0, 0.0, 0.3,
             0.2, 0.6, 0.5, 0.5, 0.2,
             0.3, 0.0, 0.5, 0.5, 0.4,
             0.0, 0.0, 0.0, 0.0, 0.1;
        CHECK(check_assumption3(w).holds);
    }
    SUBCASE("dominating co-occurrence breaks separation") {
        Matrix w(4, 5);
        w << 0.5, 0.4, 0.0, 0.0, 0.9,
             0.2, 0.6, 0.5, 0.5, 0.0,
             0.3, 0.0, 0.5, 0.5, 0.0,
             0.0, 0.0, 0.0, 0.0, 0.1;
        const Assumption3Result res = check_assumption3(w);
        CHECK_FALSE(res.holds);
        const Matrix scaled = res.c_tilde / 5.0;
        CHECK(scaled(0, 3) == doctest::Approx(0.5).epsilon(0.02));
        CHECK(scaled(0, 0) == doctest::Approx(0.38).epsilon(0.02));
    }
    SUBCASE("orthogonal rows") {
        Matrix w(3, 4);
        w << 0.5, 0.5, 0.0, 0.0,
             0.0, 0.0, 1.0, 0.0,
             0.0, 0.0, 0.0, 1.0;
        const Assumption3Result res = check_assumption3(w);
        CHECK(res.holds);
        CHECK(res.nu > 0.0);
    }
    SUBCASE("zero row") {
        Matrix w(2, 2);
        w << 1.0, 1.0,
             0.0, 0.0;
        CHECK_THROWS_AS(check_assumption3(w), ZeroRow);
    }
}

TEST_CASE("cross-validation basics") {
    const TopicModel model = random_identifiable_model(20, 3, 60, 31);
    const CountData data = prune_zero_rows(sample_corpus(model, std::vector<std::int64_t>(60, 100), 2));
    TuningProfile tuning;
    tuning.seed = 5;
    SUBCASE("singleton grid returns its value") {
        CHECK(cross_validate_c1(data, {1.1}, 0.5, tuning) == 1.1);
    }
    SUBCASE("duplicate grid values tie-break to the first") {
        const CvReport report = cross_validate_c1_report(data, {1.1, 1.1}, 0.5, tuning);
        CHECK(report.selected == report.grid[0]);
        CHECK(report.losses[0] == report.losses[1]);
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(cross_validate_c1(data, {}, 0.5, tuning), Error);
        CHECK_THROWS_AS(cross_validate_c1(data, {1.0}, 0.0, tuning), Error);
        CHECK_THROWS_AS(cross_validate_c1(data, {1.0}, 1.0, tuning), Error);
    }
}

TEST_CASE("cross-validation avoids a grid value that destroys the partition") {
    // An over-wide margin (c1 = 60) merges everything; CV should select a
    // sane value more often than the worst grid point across replicate splits.
    const std::vector<double> grid = {0.5, 1.1, 60.0};
    int selected_correct = 0, worst_correct = 0;
    for (std::uint64_t rep = 0; rep < 6; ++rep) {
        const TopicModel model = random_identifiable_model(30, 3, 80, 100 + rep);
        const CountData data =
            prune_zero_rows(sample_corpus(model, std::vector<std::int64_t>(80, 150), 200 + rep));
        TuningProfile tuning;
        tuning.seed = rep;
        const double chosen = cross_validate_c1(data, grid, 0.5, tuning);

        auto k_hat_with = [&](double c1) {
            TuningProfile full = tuning;
            full.c1 = c1;
            try {
                return fit(data, full).partition.k_hat();
            } catch (const Error&) {
                return 0;
            }
        };
        if (k_hat_with(chosen) == model.k) ++selected_correct;
        if (k_hat_with(60.0) == model.k) ++worst_correct;
    }
    CHECK(selected_correct > worst_correct);
}
