#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "kmissing/csv.hpp"

using namespace kmissing;

TEST_CASE("data CSV round trip is lossless") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = testing::random_data(1 + trial, 1 + trial % 5, rng, 1e3);
        std::stringstream buf;
        write_matrix_csv(buf, x.view());
        CHECK(read_data_csv(buf) == x);
    }
}

TEST_CASE("loaders validate shape and content") {
    std::stringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_data_csv(ragged), CsvError);
    std::stringstream word("1,abc\n");
    CHECK_THROWS_AS(read_data_csv(word), CsvError);
    std::stringstream nan("1,nan\n");
    CHECK_THROWS(read_data_csv(nan));
    std::stringstream two("0,2\n");
    CHECK_THROWS_AS(read_mask_csv(two), CsvError);
    std::stringstream mask("1,0\n0,1\n");
    CHECK(read_mask_csv(mask) == MaskMatrix(2, 2, {1, 0, 0, 1}));
    CHECK_THROWS_AS(read_data_csv(std::filesystem::path("/nonexistent/x.csv")), CsvError);
}

TEST_CASE("file writers and readers agree") {
    const auto dir = std::filesystem::temp_directory_path() / "kmissing_test_csv";
    std::filesystem::create_directories(dir);
    const MaskMatrix r(2, 3, {1, 0, 1, 0, 0, 1});
    write_mask_csv(dir / "mask.csv", r);
    CHECK(read_mask_csv(dir / "mask.csv") == r);
    const CenterMatrix m(2, 2, {0.1, -3.25, 1e-300, 7});
    write_matrix_csv(dir / "centers.csv", m.view());
    CHECK(read_centers_csv(dir / "centers.csv") == m);
    std::filesystem::remove_all(dir);
}
