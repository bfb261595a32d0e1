#include "doctest.h"

#include "oracles.hpp"
#include "top/eval.hpp"
#include "top/rng.hpp"
#include "top/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace top;
using top::testing::brute_force_l1;

namespace {

Matrix random_stochastic(int p, int k, Rng& rng) {
    Matrix m(p, k);
    for (int c = 0; c < k; ++c) {
        double sum = 0.0;
        for (int r = 0; r < p; ++r) {
            m(r, c) = rng.uniform_real() + 1e-3;
            sum += m(r, c);
        }
        m.col(c) /= sum;
    }
    return m;
}

}  // namespace

TEST_CASE("aligned_losses: permuted copies have zero loss") {
    Rng rng(4);
    const Matrix a = random_stochastic(8, 4, rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
    perm.indices() << 2, 0, 3, 1;
    const AlignedLoss loss = aligned_losses(a * perm, a);
    CHECK(loss.l1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(loss.l1_inf == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(loss.matched == 4);
}

TEST_CASE("aligned_losses: disjoint support costs full mass") {
    Matrix a(4, 2);
    a << 1, 0,
         0, 1,
         0, 0,
         0, 0;
    Matrix b = a;
    b.col(1) << 0, 0, 0, 1;  // moved to disjoint support
    const AlignedLoss loss = aligned_losses(b, a);
    CHECK(loss.l1 == doctest::Approx(2.0));
    CHECK(loss.l1_inf == doctest::Approx(2.0));
}

TEST_CASE("aligned_losses equals factorial brute force") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 2 + static_cast<int>(rng.uniform_int(4));  // up to 5
        const int p = k + 1 + static_cast<int>(rng.uniform_int(6));
        const Matrix a_hat = random_stochastic(p, k, rng);
        const Matrix a_true = random_stochastic(p, k, rng);
        const AlignedLoss loss = aligned_losses(a_hat, a_true);
        CHECK(loss.l1 == brute_force_l1(a_hat, a_true));
    }
}

TEST_CASE("aligned_losses charges unmatched columns their mass") {
    Rng rng(3);
    const Matrix a_true = random_stochastic(6, 3, rng);
    SUBCASE("estimated side smaller") {
        const Matrix a_hat = a_true.leftCols(2);
        const AlignedLoss loss = aligned_losses(a_hat, a_true);
        CHECK(loss.matched == 2);
        CHECK(loss.l1 == doctest::Approx(1.0));      // one unmatched true column
        CHECK(loss.l1_inf == doctest::Approx(1.0));  // its full mass dominates
    }
    SUBCASE("estimated side larger") {
        Matrix a_hat(6, 4);
        a_hat.leftCols(3) = a_true;
        a_hat.col(3) = a_true.col(0);
        const AlignedLoss loss = aligned_losses(a_hat, a_true);
        CHECK(loss.matched == 3);
        CHECK(loss.l1 == doctest::Approx(1.0));
    }
}

TEST_CASE("aligned_losses: symmetry and permutation invariance") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix a = random_stochastic(7, 3, rng);
        const Matrix b = random_stochastic(7, 3, rng);
        CHECK(aligned_losses(a, b).l1 == doctest::Approx(aligned_losses(b, a).l1).epsilon(1e-12));
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(3);
        perm.indices() << 1, 2, 0;
        CHECK(aligned_losses(a * perm, b).l1 == doctest::Approx(aligned_losses(a, b).l1).epsilon(1e-12));
    }
}

TEST_CASE("l1_inf satisfies the triangle inequality") {
    Rng rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix a = random_stochastic(6, 3, rng);
        const Matrix b = random_stochastic(6, 3, rng);
        const Matrix c = random_stochastic(6, 3, rng);
        const double ab = aligned_losses(a, b).l1_inf;
        const double bc = aligned_losses(b, c).l1_inf;
        const double ac = aligned_losses(a, c).l1_inf;
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("aligned_losses rejects mismatched vocabularies") {
    Rng rng(1);
    CHECK_THROWS_AS(aligned_losses(random_stochastic(5, 2, rng), random_stochastic(6, 2, rng)),
                    DimensionMismatch);
}

TEST_CASE("coherence") {
    SUBCASE("perfect co-occurrence is near zero") {
        Matrix counts(2, 4);
        counts << 1, 2, 3, 4,
                  4, 3, 2, 1;
        const CountData data = count_data_from_dense(counts);
        const double eps = 0.01;
        const double value = coherence(data, {0, 1}, eps);
        // Two ordered pairs, each log((4 + eps) / 4).
        CHECK(value == doctest::Approx(2.0 * std::log((4.0 + eps) / 4.0)).epsilon(1e-12));
        CHECK(value == doctest::Approx(2.0 * eps / 4.0).epsilon(0.01));
    }
    SUBCASE("never co-occurring words score negatively") {
        Matrix counts(2, 4);
        counts << 2, 2, 0, 0,
                  0, 0, 2, 2;
        const CountData data = count_data_from_dense(counts);
        CHECK(coherence(data, {0, 1}) < 0.0);
    }
    SUBCASE("single word gives the empty sum") {
        Matrix counts(2, 2);
        counts << 2, 2,
                  1, 1;
        CHECK(coherence(count_data_from_dense(counts), {0}) == 0.0);
    }
    SUBCASE("missing word in a denominator") {
        Matrix counts(2, 2);
        counts << 2, 2,
                  1, 1;
        CountData data = count_data_from_dense(counts);
        // Make word 2 vanish without pruning.
        data.docs[0][1].second = 1;
        data.docs[1][1].second = 1;
        data.docs[0].erase(data.docs[0].begin() + 1);
        data.docs[1].erase(data.docs[1].begin() + 1);
        CHECK_THROWS_AS(coherence(data, {0, 1}), WordNeverOccurs);
    }
}

TEST_CASE("unique_words") {
    SUBCASE("single topic counts everything") {
        Matrix a(5, 1);
        a << 0.4, 0.3, 0.2, 0.08, 0.02;
        CHECK(unique_words(a, 3) == std::vector<int>{3});
    }
    SUBCASE("identical columns overlap fully") {
        Matrix a(4, 3);
        for (int c = 0; c < 3; ++c) a.col(c) << 0.4, 0.3, 0.2, 0.1;
        CHECK(unique_words(a, 2) == std::vector<int>{0, 0, 0});
    }
    SUBCASE("disjoint supports are fully unique") {
        Matrix a = Matrix::Zero(6, 2);
        a.col(0) << 0.5, 0.5, 0, 0, 0, 0;
        a.col(1) << 0, 0, 0.5, 0.5, 0, 0;
        CHECK(unique_words(a, 2) == std::vector<int>{2, 2});
    }
    SUBCASE("ties break to the smaller index") {
        Matrix a(3, 2);
        a.col(0) << 0.5, 0.25, 0.25;  // tie between rows 1 and 2
        a.col(1) << 0.0, 0.0, 1.0;
        const auto counts = unique_words(a, 2);
        // Topic 1 top-2 = {0, 1} by the tie rule; topic 2 top-2 = {2, 0}.
        CHECK(counts == std::vector<int>{1, 1});
    }
    SUBCASE("bad t") {
        Matrix a = Matrix::Constant(3, 1, 1.0 / 3.0);
        CHECK_THROWS_AS(unique_words(a, 0), DimensionMismatch);
        CHECK_THROWS_AS(unique_words(a, 4), DimensionMismatch);
    }
}
