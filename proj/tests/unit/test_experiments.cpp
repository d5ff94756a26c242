#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "kmissing/experiments.hpp"

using namespace kmissing;

namespace {

const char* kSmall = R"({
  "name": "small",
  "master_seed": 11,
  "repetitions": 4,
  "reference": {"n": 20000, "restarts": 3},
  "fit": {"restarts": 4},
  "settings": [
    {"id": "s1", "preset": "s1", "n": 300, "missing_rates": [0.1, 0.4]},
    {"id": "g", "gmm": {"weights": [0.5, 0.5], "means": [[-2, 0], [2, 0]]}, "k": 2, "n": 30, "q": [0.2, 0.3]}
  ]
})";

std::string records_text(const ExperimentResult& r) {
    std::ostringstream out;
    write_records_csv(out, r.records);
    write_aggregate_csv(out, r.aggregates);
    return out.str();
}

}  // namespace

TEST_CASE("config parsing fills defaults and per-setting values") {
    const auto cfg = parse_config(kSmall);
    CHECK(cfg.name == "small");
    CHECK(cfg.mode == ExperimentConfig::Mode::table);
    CHECK(cfg.master_seed == 11);
    CHECK(cfg.repetitions == 4);
    CHECK(cfg.reference_n == 20000);
    CHECK(cfg.reference.restarts == 3);
    CHECK(cfg.kpod.restarts == 4);
    CHECK(cfg.kpod.max_iters == 200);
    REQUIRE(cfg.settings.size() == 2);
    CHECK(cfg.settings[0].k == 3);
    CHECK(cfg.settings[0].mcar.size() == 2);
    CHECK(cfg.settings[0].mcar[1].q() == std::vector<double>{0.6, 0.6});
    CHECK(cfg.settings[1].k == 2);
    CHECK(cfg.settings[1].mcar[0].q() == std::vector<double>{0.2, 0.3});

    const auto defaults = parse_config(R"({"settings": [{"preset": "a"}]})");
    CHECK(defaults.repetitions == 100);
    CHECK(defaults.reference_n == 100000);
    CHECK(defaults.kpod.restarts == 30);
    CHECK(defaults.settings[0].id == "a");
    CHECK(defaults.settings[0].n == std::vector<std::size_t>{10000});
}

TEST_CASE("config parsing rejects bad input") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "a"}], "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "a", "bogus": 1}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "zz"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "a", "missing_rate": 1.0}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "a", "missing_rate": 0.1, "q": [1, 1]}]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repetitions": 0, "settings": [{"preset": "a"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"mode": "sideways", "settings": [{"preset": "a"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "a"}, {"preset": "a"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"settings": [{"preset": "a", "n": 2}]})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("run_table records and aggregates every repetition") {
    const auto cfg = parse_config(kSmall);
    const auto res = run_table(cfg);
    // s1: 2 rates x 4 reps, g: 1 x 4, three methods each
    CHECK(res.records.size() == (8 + 4) * 3);
    CHECK(res.aggregates.size() == 3 * 3);
    for (const auto& r : res.records) {
        if (r.status == "ok") {
            REQUIRE(r.mse.has_value());
            CHECK(*r.mse >= 0.0);
        } else {
            CHECK(r.status == "insufficient_complete_cases");
            CHECK(r.method == Method::complete_case);
            CHECK_FALSE(r.mse.has_value());
        }
        CHECK_FALSE(r.wall_time_ms.has_value());
    }
    // the tiny setting keeps about 6% complete rows of 30: mostly insufficient
    bool saw_failure = false;
    for (const auto& a : res.aggregates) {
        if (a.setting == "g" && a.method == Method::complete_case) saw_failure = a.fail_frac > 0.0;
    }
    CHECK(saw_failure);
}

TEST_CASE("run_table output does not depend on the worker count") {
    const auto cfg = parse_config(kSmall);
    const auto one = records_text(run_table(cfg, RunOptions{1, {}, false}));
    const auto four = records_text(run_table(cfg, RunOptions{4, {}, false}));
    CHECK(one == four);
    CHECK(one.rfind(std::string(kRecordHeader), 0) == 0);
}

TEST_CASE("without missingness the three methods agree") {
    const auto cfg = parse_config(R"({
      "master_seed": 3, "repetitions": 10, "reference": {"n": 20000, "restarts": 3}, "fit": {"restarts": 5},
      "settings": [{"preset": "s1", "n": 500, "missing_rate": 0.0}]
    })");
    const auto res = run_table(cfg);
    for (const auto& r : res.records) CHECK(r.complete_case_count == 500);
    // with a full mask the complete cases are the data, so every method sees X
    std::vector<double> means;
    for (const auto& a : res.aggregates) {
        REQUIRE(a.mse_mean.has_value());
        means.push_back(*a.mse_mean);
    }
    REQUIRE(means.size() == 3);
    CHECK(std::abs(means[0] - means[1]) < 0.02);
    CHECK(std::abs(means[0] - means[2]) < 0.02);
}

TEST_CASE("run_trend wants ascending n") {
    auto cfg = parse_config(R"({"mode": "trend", "repetitions": 1, "reference": {"n": 5000, "restarts": 2},
      "fit": {"restarts": 2}, "settings": [{"preset": "a", "n": [300, 200]}]})");
    CHECK_THROWS_AS(run_trend(cfg), ConfigError);
    cfg.settings[0].n = {100, 200};
    const auto res = run_experiment(cfg);
    CHECK(res.aggregates.size() == 2 * 3);
    CHECK(res.aggregates[0].n == 100);
    CHECK(res.aggregates.back().n == 200);
}

TEST_CASE("aggregate uses the n - 1 denominator and counts failures") {
    std::vector<RunRecord> recs;
    for (double v : {1.0, 2.0, 3.0, 6.0}) {
        RunRecord r;
        r.setting = "x";
        r.n = 10;
        r.method = Method::kpod;
        r.mse = v;
        recs.push_back(r);
    }
    RunRecord bad;
    bad.setting = "x";
    bad.n = 10;
    bad.method = Method::kpod;
    bad.status = "insufficient_complete_cases";
    recs.push_back(bad);
    const auto rows = aggregate(recs);
    REQUIRE(rows.size() == 1);
    CHECK(*rows[0].mse_mean == doctest::Approx(3.0));
    CHECK(*rows[0].mse_std == doctest::Approx(std::sqrt(14.0 / 3.0)));
    CHECK(rows[0].fail_frac == doctest::Approx(0.2));
    CHECK(rows[0].runs == 5);

    std::ostringstream out;
    write_aggregate_csv(out, rows);
    CHECK(out.str().rfind(std::string(kAggregateHeader), 0) == 0);
    std::ostringstream table;
    print_aggregate_table(table, rows);
    CHECK(table.str().find("n-1") != std::string::npos);
}

TEST_CASE("reference cache directory is populated once per mixture") {
    const auto dir = std::filesystem::temp_directory_path() / "kmissing_test_exp_cache";
    std::filesystem::remove_all(dir);
    const auto cfg = parse_config(kSmall);
    const auto a = records_text(run_table(cfg, RunOptions{2, dir, false}));
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
    CHECK(files == 2);
    CHECK(records_text(run_table(cfg, RunOptions{1, dir, false})) == a);
    std::filesystem::remove_all(dir);
}
