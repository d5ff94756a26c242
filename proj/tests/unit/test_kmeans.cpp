#include <cmath>
#include <random>
#include <vector>

#include "brute_force.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "kmissing/kmeans.hpp"

using namespace kmissing;

namespace {

FitOptions options(std::size_t k, std::uint64_t seed, std::size_t restarts = 10) {
    FitOptions o;
    o.k = k;
    o.restarts = restarts;
    o.seed = Seed(seed);
    return o;
}

void check_descent(const std::vector<RestartTrace>& traces) {
    for (const auto& t : traces) {
        for (std::size_t it = 1; it < t.losses.size(); ++it) {
            const bool repaired =
                std::find(t.repair_iterations.begin(), t.repair_iterations.end(), it) != t.repair_iterations.end();
            if (!repaired) CHECK(t.losses[it] <= t.losses[it - 1] + 1e-12);
        }
    }
}

}  // namespace

TEST_CASE("km_loss hand-evaluated values") {
    const DataMatrix x(2, 2, {0, 0, 2, 0});
    CHECK(km_loss(x, CenterMatrix(2, 2, {0, 0, 2, 0})) == 0.0);
    CHECK(km_loss(x, CenterMatrix(1, 2, {1, 0})) == 1.0);
    std::mt19937_64 rng(1);
    const auto y = testing::random_data(30, 3, rng);
    const auto m = testing::random_centers(2, 3, rng);
    std::vector<double> dup = m.values();
    dup.insert(dup.end(), m.values().begin(), m.values().begin() + 3);
    CHECK(km_loss(y, CenterMatrix(3, 3, dup)) == km_loss(y, m));
    CHECK_THROWS_AS(km_loss(x, CenterMatrix(1, 3, {0, 0, 0})), DimensionError);
}

TEST_CASE("km_assign hand-evaluated values") {
    CHECK(km_assign(DataMatrix(1, 2, {0, 0}), CenterMatrix(2, 2, {0, 0, 5, 5})).labels() == std::vector<int>{0});
    CHECK(km_assign(DataMatrix(1, 1, {1}), CenterMatrix(2, 1, {0, 2})).labels() == std::vector<int>{0});
    CHECK(km_assign(DataMatrix(3, 1, {0, 1, 10}), CenterMatrix(2, 1, {0, 10})).labels() ==
          std::vector<int>{0, 0, 1});
}

TEST_CASE("km_update hand-evaluated values") {
    const DataMatrix x(2, 2, {0, 0, 2, 0});
    CHECK(km_update(x, Assignment({0, 0}, 1), 1, CenterMatrix(1, 2, {9, 9})) == CenterMatrix(1, 2, {1, 0}));
    CHECK(km_update(x, Assignment({1, 0}, 2), 2, CenterMatrix(2, 2, {9, 9, 9, 9})) ==
          CenterMatrix(2, 2, {2, 0, 0, 0}));
    CHECK(km_update(x, Assignment({0, 0}, 2), 2, CenterMatrix(2, 2, {0, 0, 7, 7})) ==
          CenterMatrix(2, 2, {1, 0, 7, 7}));
}

TEST_CASE("km_fit recovers two well-separated clusters, confirmed by enumeration") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> v;
    for (int i = 0; i < 8; ++i) {
        v.push_back((i < 4 ? 0.0 : 100.0) + z(rng));
        v.push_back(z(rng));
    }
    const DataMatrix x(8, 2, v);
    const auto fit = km_fit(x, options(2, 9));
    const auto truth = testing::brute_force_masked(v, std::vector<std::uint8_t>(16, 1), 8, 2, 2);
    CHECK(fit.loss == doctest::Approx(truth.loss).epsilon(1e-12));
    for (std::size_t l = 0; l < 2; ++l) {
        const double mean_x = fit.centers(l, 0) < 50 ? 0.0 : 100.0;
        CHECK(std::abs(fit.centers(l, 0) - mean_x) < 1.5);
        CHECK(std::abs(fit.centers(l, 1)) < 1.5);
    }
    // within 0.5 of the sample means of the two groups
    for (std::size_t l = 0; l < 2; ++l) {
        const std::size_t first = fit.centers(l, 0) < 50 ? 0 : 4;
        double mx = 0, my = 0;
        for (std::size_t i = first; i < first + 4; ++i) {
            mx += x(i, 0) / 4;
            my += x(i, 1) / 4;
        }
        CHECK(std::abs(fit.centers(l, 0) - mx) < 0.5);
        CHECK(std::abs(fit.centers(l, 1) - my) < 0.5);
    }
}

TEST_CASE("km_fit with k = n puts every point on its own center") {
    std::mt19937_64 rng(2);
    const auto x = testing::random_data(6, 2, rng);
    const auto fit = km_fit(x, options(6, 1));
    CHECK(fit.loss == 0.0);
    auto sizes = fit.assignment.cluster_sizes();
    for (auto s : sizes) CHECK(s == 1);
}

TEST_CASE("km_fit is deterministic and validates options") {
    std::mt19937_64 rng(3);
    const auto x = testing::random_data(200, 3, rng);
    const auto a = km_fit(x, options(3, 7));
    const auto b = km_fit(x, options(3, 7));
    CHECK(a.centers == b.centers);
    CHECK(a.assignment == b.assignment);
    CHECK(a.loss == b.loss);
    CHECK(a.iterations == b.iterations);
    CHECK(a.best_restart == b.best_restart);
    CHECK(a.restarts_run == 10);

    CHECK_THROWS_AS(km_fit(x, options(201, 1)), InsufficientDataError);
    CHECK_THROWS_AS(km_fit(x, options(0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(km_fit(x, options(2, 1, 0)), std::invalid_argument);
    auto bad = options(2, 1);
    bad.rel_tol = -1;
    CHECK_THROWS_AS(km_fit(x, bad), std::invalid_argument);
    bad = options(2, 1);
    bad.max_iters = 0;
    CHECK_THROWS_AS(km_fit(x, bad), std::invalid_argument);
}

TEST_CASE("km_fit result invariants on random instances") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> nd(10, 300), pd(1, 5), kd(1, 5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = nd(rng), p = pd(rng), k = kd(rng);
        const auto x = testing::random_data(n, p, rng);
        const auto fit = km_fit(x, options(k, trial, 4));
        CAPTURE(trial);

        CHECK(fit.loss == doctest::Approx(km_loss(x, fit.centers)).epsilon(1e-12));
        check_descent(fit.traces);

        // pointwise optimality of the assignment
        for (std::size_t i = 0; i < n; ++i) {
            const double own = sq_dist(x.row(i), fit.centers.row(static_cast<std::size_t>(fit.assignment[i])));
            for (std::size_t l = 0; l < k; ++l) CHECK(own <= sq_dist(x.row(i), fit.centers.row(l)));
        }
        // centers are the means of their clusters
        const auto sizes = fit.assignment.cluster_sizes();
        for (std::size_t l = 0; l < k; ++l) {
            if (sizes[l] == 0) continue;
            for (std::size_t j = 0; j < p; ++j) {
                double s = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (static_cast<std::size_t>(fit.assignment[i]) == l) s += x(i, j);
                }
                CHECK(fit.centers(l, j) == doctest::Approx(s / static_cast<double>(sizes[l])).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("km_fit matches exhaustive enumeration on tiny instances") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> nd(3, 8), pd(1, 3), kd(1, 3);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = nd(rng), p = pd(rng), k = std::min(kd(rng), n);
        const auto x = testing::random_data(n, p, rng);
        const auto fit = km_fit(x, options(k, 100 + trial, 50));
        const auto truth = testing::brute_force_masked(x.values(), std::vector<std::uint8_t>(n * p, 1), n, p, k);
        CAPTURE(trial);
        CHECK(std::abs(fit.loss - truth.loss) <= 1e-9 * std::max(1.0, truth.loss));
    }
}

TEST_CASE("translating the data translates the centers") {
    std::mt19937_64 rng(6);
    const std::size_t n = 120, p = 3;
    const auto x = testing::random_data(n, p, rng);
    const std::vector<double> shift{0.5, -2.0, 3.0};
    std::vector<double> moved = x.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) moved[i * p + j] += shift[j];
    }
    const auto a = km_fit(x, options(3, 8));
    const auto b = km_fit(DataMatrix(n, p, moved), options(3, 8));
    CHECK(a.assignment == b.assignment);
    for (std::size_t l = 0; l < 3; ++l) {
        for (std::size_t j = 0; j < p; ++j) CHECK(b.centers(l, j) == doctest::Approx(a.centers(l, j) + shift[j]));
    }
}

TEST_CASE("heavily duplicated data still yields a consistent fit") {
    const DataMatrix x(6, 1, {0, 0, 0, 0, 0, 10});
    const auto fit = km_fit(x, options(3, 1, 20));
    CHECK(fit.loss == doctest::Approx(km_loss(x, fit.centers)));
    CHECK(fit.loss == 0.0);
    check_descent(fit.traces);
}
