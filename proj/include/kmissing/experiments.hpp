#ifndef KMISSING_EXPERIMENTS_HPP
#define KMISSING_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmissing/missing.hpp"
#include "kmissing/synthetic.hpp"

namespace kmissing {

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MethodOptions {
    std::size_t restarts = 30;
    std::size_t max_iters = 200;
    double rel_tol = 1e-8;
};

struct SettingConfig {
    std::string id;
    std::optional<PresetName> preset;
    GmmSpec gmm;
    std::size_t k = 3;
    std::vector<std::size_t> n;
    /// One MCAR spec per missing-rate cell.
    std::vector<McarSpec> mcar;
    std::optional<std::size_t> repetitions;
};

struct ExperimentConfig {
    enum class Mode { table, trend };

    std::string name = "experiment";
    Mode mode = Mode::table;
    std::uint64_t master_seed = 0;
    std::size_t repetitions = 100;
    std::size_t reference_n = 100000;
    MethodOptions reference{10, 200, 1e-8};
    MethodOptions oracle;
    MethodOptions complete_case;
    MethodOptions kpod;
    std::vector<SettingConfig> settings;
    std::string output;
};

/// Parses the JSON experiment description; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

enum class Method { oracle, complete_case, kpod };
const char* to_string(Method method);

struct RunRecord {
    std::string setting;
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t k = 0;
    double missing_rate = 0.0;
    std::size_t rep = 0;
    Method method = Method::oracle;
    std::optional<double> mse;
    std::optional<double> loss;
    std::size_t iterations = 0;
    std::size_t complete_case_count = 0;
    std::string status = "ok";
    std::optional<double> wall_time_ms;
};

struct AggregateRow {
    std::string setting;
    std::size_t n = 0;
    double missing_rate = 0.0;
    Method method = Method::oracle;
    std::optional<double> mse_mean;
    std::optional<double> mse_std;  // sample standard deviation, n - 1 denominator
    double fail_frac = 0.0;
    std::size_t runs = 0;
};

struct RunOptions {
    int jobs = 1;
    std::filesystem::path cache_dir;  // empty: in-memory only
    bool record_timing = false;       // wall times make the output nondeterministic
};

struct ExperimentResult {
    std::vector<RunRecord> records;  // ordered by (setting, n, missing rate, rep, method)
    std::vector<AggregateRow> aggregates;
};

/// One repetition per (setting, n, missing rate, rep): sample complete data,
/// fit k-means on it (oracle), draw an MCAR mask, fit k-means on the complete
/// cases and k-POD on the masked data, score each against the cached
/// large-sample reference. Failures are recorded, never thrown.
ExperimentResult run_table(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// As run_table; every setting's n-list must be strictly ascending.
ExperimentResult run_trend(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Dispatches on cfg.mode.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records);

inline constexpr std::string_view kRecordHeader =
    "setting,n,p,k,missing_rate,rep,method,mse,loss,iterations,complete_case_count,status,wall_time_ms";
inline constexpr std::string_view kAggregateHeader = "setting,n,missing_rate,method,mse_mean,mse_std,fail_frac";

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void print_aggregate_table(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace kmissing

#endif  // KMISSING_EXPERIMENTS_HPP
