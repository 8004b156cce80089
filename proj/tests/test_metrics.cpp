#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rtkm/error.hpp"
#include "rtkm/metrics.hpp"

using namespace rtkm;

namespace {

Clustering make(std::size_t n, std::vector<std::vector<int>> clusters, std::vector<int> outliers = {}) {
    return Clustering{n, std::move(clusters), std::move(outliers)};
}

}  // namespace

TEST_CASE("single F1") {
    CHECK(f1_single(1, 0, 0) == 1.0);
    CHECK(f1_single(2, 1, 1) == 2.0 / 3.0);
    CHECK(f1_single(0, 3, 2) == 0.0);
    CHECK(f1_single(0, 0, 0) == 1.0);
}

TEST_CASE("set F1 counts overlap") {
    CHECK(f1_sets({0, 1, 2}, {1, 2, 3}, 4) == doctest::Approx(2.0 / 3.0));
    CHECK(f1_sets({3, 1, 1}, {1, 3}, 4) == 1.0);
    CHECK_THROWS_AS(f1_sets({5}, {1}, 4), InvalidArgument);
}

TEST_CASE("average F1 of a clustering against itself is one") {
    const auto x = make(6, {{0, 1}, {2, 3, 4}, {4, 5}}, {});
    CHECK(average_f1(x, x) == 1.0);
    const auto with_outliers = make(6, {{0, 1}, {2, 3}}, {4, 5});
    CHECK(average_f1(with_outliers, with_outliers) == 1.0);
}

TEST_CASE("average F1 ignores label permutation") {
    const auto truth = make(6, {{0, 1, 2}, {3, 4, 5}});
    const auto predicted = make(6, {{0, 1}, {2, 3, 4, 5}});
    const auto swapped = make(6, {{2, 3, 4, 5}, {0, 1}});
    CHECK(average_f1(predicted, truth) == average_f1(swapped, truth));
    // matched pairs: {0,1} vs {0,1,2} -> 0.8, {2,3,4,5} vs {3,4,5} -> 6/7
    CHECK(average_f1(predicted, truth) == doctest::Approx((0.8 + 6.0 / 7.0) / 2.0));
}

TEST_CASE("outliers form an extra cluster when truth has them") {
    const auto truth = make(5, {{0, 1}, {2, 3}}, {4});
    const auto no_outliers = make(5, {{0, 1, 4}, {2, 3}});
    // truth outlier cluster {4} meets an empty predicted outlier set: F1 = 0
    CHECK(average_f1(no_outliers, truth) == doctest::Approx((0.8 + 1.0 + 0.0) / 3.0));
    const auto exact = make(5, {{2, 3}, {0, 1}}, {4});
    CHECK(average_f1(exact, truth) == 1.0);
}

TEST_CASE("unmatched truth clusters score zero") {
    const auto truth = make(4, {{0}, {1}, {2}, {3}});
    const auto predicted = make(4, {{0, 1, 2, 3}});
    CHECK(average_f1(predicted, truth) == doctest::Approx(0.4 / 4.0));
}

TEST_CASE("average F1 errors") {
    CHECK_THROWS_AS(average_f1(make(3, {{0}}), make(3, {})), InvalidArgument);
    CHECK_THROWS_AS(average_f1(make(3, {{0}}), make(4, {{0}})), InvalidArgument);
}

TEST_CASE("from_assignments") {
    const auto c = Clustering::from_assignments({{0}, {1, 0}, {}, {1}}, {false, false, true, false});
    CHECK(c.size == 4);
    CHECK(c.clusters == std::vector<std::vector<int>>{{0, 1}, {1, 3}});
    CHECK(c.outliers == std::vector<int>{2});
}

TEST_CASE("assignment solver matches exhaustive search") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> size(1, 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int rows = size(rng), cols = size(rng);
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = trial % 4 == 0 ? std::round(unit(rng) * 3) : unit(rng);
        const auto match = max_weight_assignment(w);
        double total = 0.0;
        std::vector<bool> used(static_cast<std::size_t>(cols), false);
        for (int r = 0; r < rows; ++r) {
            const auto c = match[static_cast<std::size_t>(r)];
            if (c < cols) {
                CHECK_FALSE(used[static_cast<std::size_t>(c)]);
                used[static_cast<std::size_t>(c)] = true;
                total += w(r, c);
            }
        }
        CHECK(total == doctest::Approx(oracle::best_matching_score(w)).epsilon(1e-12));
    }
}

TEST_CASE("M_e") {
    const std::vector<bool> truth{true, false, false, true, false};
    CHECK(me_score(truth, truth) == 0.0);
    CHECK(me_score(std::vector<bool>(5, false), truth) == 1.0);
    CHECK(me_score(std::vector<bool>(5, true), truth) == 1.0);
    // one of two outliers found, one of three inliers misflagged
    const std::vector<bool> half{true, true, false, false, false};
    CHECK(me_score(half, truth) == doctest::Approx(std::sqrt(1.0 / 9.0 + 0.25)));
}

TEST_CASE("M_e is not symmetric") {
    const std::vector<bool> a{true, false, false, false};
    const std::vector<bool> b{true, true, false, false};
    // truth a: TP=1 FN=0 FP=1 TN=2 -> 1/3 ; truth b: TP=1 FN=1 FP=0 TN=2 -> 1/2
    CHECK(me_score(b, a) == doctest::Approx(1.0 / 3.0));
    CHECK(me_score(a, b) == doctest::Approx(0.5));
}

TEST_CASE("M_e errors") {
    CHECK_THROWS_AS(me_score({true, false}, {false, false}), InvalidArgument);
    CHECK_THROWS_AS(me_score({true, false}, {true, true}), InvalidArgument);
    CHECK_THROWS_AS(me_score({true}, {true, false}), InvalidArgument);
}

TEST_CASE("metric bounds on random clusterings") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> label(0, 3);
    std::bernoulli_distribution coin(0.2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 12;
        std::vector<std::vector<int>> pa(n), ta(n);
        std::vector<bool> pf(n), tf(n);
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = {label(rng)};
            if (coin(rng)) pa[i].push_back(label(rng));
            pf[i] = coin(rng);
            tf[i] = i < 2 || (i > 2 && coin(rng));
            if (!tf[i]) ta[i] = {label(rng)};
        }
        tf[2] = false;
        const auto p = Clustering::from_assignments(pa, pf);
        const auto t = Clustering::from_assignments(ta, tf);
        const double f1 = average_f1(p, t);
        CHECK(f1 >= 0.0);
        CHECK(f1 <= 1.0);
        const double me = me_score(pf, tf);
        CHECK(me >= 0.0);
        CHECK(me <= std::sqrt(2.0));
        CHECK(average_f1(t, t) == 1.0);
    }
}
