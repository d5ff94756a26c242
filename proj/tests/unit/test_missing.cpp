#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "kmissing/missing.hpp"

using namespace kmissing;

TEST_CASE("McarSpec validation") {
    CHECK_THROWS_AS(McarSpec({0.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(McarSpec({1.1}), std::invalid_argument);
    CHECK_THROWS_AS(McarSpec({-0.2}), std::invalid_argument);
    CHECK_THROWS_AS(McarSpec(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(McarSpec::uniform_rate(2, 1.0), std::invalid_argument);
    CHECK(McarSpec::uniform_rate(3, 0.25).q() == std::vector<double>{0.75, 0.75, 0.75});
    const McarSpec q({1.0 / 3, 2.0 / 3});
    CHECK(q.complete_probability() == doctest::Approx(2.0 / 9));
    CHECK(q.pattern_probability(0b01) == doctest::Approx(1.0 / 9));
    CHECK(q.pattern_probability(0b00) == doctest::Approx(2.0 / 9));
}

TEST_CASE("gen_mask with q = 1 observes everything") {
    CHECK(gen_mask(1000, McarSpec({1, 1, 1}), Seed(4)).all_observed());
}

TEST_CASE("gen_mask column frequencies match q") {
    const std::size_t n = 100000;
    const auto r = gen_mask(n, McarSpec({2.0 / 3, 2.0 / 3}), Seed(17));
    for (std::size_t j = 0; j < 2; ++j) {
        double count = 0;
        for (std::size_t i = 0; i < n; ++i) count += r(i, j);
        const double q = 2.0 / 3;
        CHECK(std::abs(count / n - q) <= 3 * std::sqrt(q * (1 - q) / n));
    }
}

TEST_CASE("gen_mask complete-case count near n * 2/9") {
    const std::size_t n = 10000;
    const double pc = 2.0 / 9;
    const auto r = gen_mask(n, McarSpec({1.0 / 3, 2.0 / 3}), Seed(5));
    const double cc = static_cast<double>(complete_case_count(r));
    CHECK(std::abs(cc - n * pc) <= 3 * std::sqrt(n * pc * (1 - pc)));
}

TEST_CASE("gen_mask is a function of (n, q, seed) only") {
    const McarSpec q({0.5, 0.9, 0.7});
    CHECK(gen_mask(500, q, Seed(1)) == gen_mask(500, q, Seed(1)));
    CHECK_FALSE(gen_mask(500, q, Seed(1)) == gen_mask(500, q, Seed(2)));
}

TEST_CASE("complete_cases filters rows") {
    std::mt19937_64 rng(1);
    const auto x = testing::random_data(3, 2, rng);
    CHECK(complete_cases(x, MaskMatrix::ones(3, 2)) == x);
    const auto cc = complete_cases(x, MaskMatrix(3, 2, {1, 1, 1, 0, 1, 1}));
    REQUIRE(cc.rows() == 2);
    CHECK(cc.values() == std::vector<double>{x(0, 0), x(0, 1), x(2, 0), x(2, 1)});
    const auto none = complete_cases(x, MaskMatrix(3, 2, {0, 1, 1, 0, 0, 0}));
    CHECK(none.rows() == 0);
    CHECK(none.cols() == 2);
}

TEST_CASE("group_patterns hand example") {
    const auto g = group_patterns(MaskMatrix(3, 2, {1, 0, 0, 1, 1, 0}));
    REQUIRE(g.size() == 2);
    CHECK(g.at(pattern_key(std::vector<std::uint8_t>{1, 0})) == std::vector<std::size_t>{0, 2});
    CHECK(g.at(pattern_key(std::vector<std::uint8_t>{0, 1})) == std::vector<std::size_t>{1});
    const auto full = group_patterns(MaskMatrix::ones(5, 3));
    REQUIRE(full.size() == 1);
    CHECK(full.begin()->second.size() == 5);
    CHECK(pattern_bits(pattern_key(std::vector<std::uint8_t>{1, 0, 1}), 3) == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("group_patterns partitions the rows") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial * 9, p = 1 + trial % 6;
        const auto r = testing::random_mask(n, p, rng);
        const auto g = group_patterns(r);
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (const auto& [key, rows] : g) {
            total += rows.size();
            for (auto i : rows) {
                CHECK(pattern_key(r.row(i)) == key);
                seen.insert(i);
            }
        }
        CHECK(total == n);
        CHECK(seen.size() == n);
        const PatternKey full = p == 64 ? ~0ULL : ((1ULL << p) - 1);
        const std::size_t bucket = g.count(full) ? g.at(full).size() : 0;
        CHECK(complete_case_count(r) == bucket);
    }
}

TEST_CASE("group_patterns rejects more than 64 columns") {
    CHECK_THROWS(group_patterns(MaskMatrix::ones(2, 65)));
}
