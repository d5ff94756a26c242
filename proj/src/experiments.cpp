#include "kmissing/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <omp.h>

#include "json.hpp"
#include "kmissing/kmeans.hpp"
#include "kmissing/kpod.hpp"
#include "kmissing/metrics.hpp"
#include "kmissing/oracle.hpp"

namespace kmissing {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
        }
    }
}

template <class T>
T get_as(const json& value, std::string_view what) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}: wrong type", what));
    }
}

std::size_t get_count(const json& value, std::string_view what) {
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw ConfigError(fmt::format("{}: expected a nonnegative integer", what));
    }
    return value.get<std::size_t>();
}

MethodOptions parse_method(const json& obj, std::string_view where, MethodOptions base) {
    reject_unknown(obj, where, {"restarts", "max_iters", "rel_tol"});
    if (obj.contains("restarts")) base.restarts = get_count(obj["restarts"], fmt::format("{}.restarts", where));
    if (obj.contains("max_iters")) base.max_iters = get_count(obj["max_iters"], fmt::format("{}.max_iters", where));
    if (obj.contains("rel_tol")) base.rel_tol = get_as<double>(obj["rel_tol"], fmt::format("{}.rel_tol", where));
    if (base.restarts == 0) throw ConfigError(fmt::format("{}.restarts must be at least 1", where));
    if (base.max_iters == 0) throw ConfigError(fmt::format("{}.max_iters must be at least 1", where));
    if (!(base.rel_tol >= 0.0)) throw ConfigError(fmt::format("{}.rel_tol must be nonnegative", where));
    return base;
}

GmmSpec parse_gmm(const json& obj, std::string_view where) {
    reject_unknown(obj, where, {"weights", "means", "covariances"});
    if (!obj.contains("weights") || !obj.contains("means")) {
        throw ConfigError(fmt::format("{}: needs 'weights' and 'means'", where));
    }
    const auto weights = get_as<std::vector<double>>(obj["weights"], fmt::format("{}.weights", where));
    const auto means = get_as<std::vector<std::vector<double>>>(obj["means"], fmt::format("{}.means", where));
    if (means.empty() || means.front().empty()) throw ConfigError(fmt::format("{}.means is empty", where));
    const std::size_t p = means.front().size();
    std::vector<double> flat;
    for (const auto& row : means) {
        if (row.size() != p) throw ConfigError(fmt::format("{}.means: ragged rows", where));
        flat.insert(flat.end(), row.begin(), row.end());
    }
    std::vector<double> cov;
    if (obj.contains("covariances")) {
        const auto blocks = get_as<std::vector<std::vector<std::vector<double>>>>(
            obj["covariances"], fmt::format("{}.covariances", where));
        for (const auto& block : blocks) {
            for (const auto& row : block) cov.insert(cov.end(), row.begin(), row.end());
        }
    }
    try {
        return GmmSpec(weights, CenterMatrix(means.size(), p, std::move(flat)), std::move(cov));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", where, e.what()));
    }
}

SettingConfig parse_setting(const json& obj, std::size_t index) {
    const std::string where = fmt::format("settings[{}]", index);
    reject_unknown(obj, where,
                   {"id", "preset", "gmm", "k", "n", "missing_rate", "missing_rates", "q", "repetitions"});
    if (obj.contains("preset") == obj.contains("gmm")) {
        throw ConfigError(fmt::format("{}: give exactly one of 'preset' or 'gmm'", where));
    }
    std::optional<Preset> base;
    if (obj.contains("preset")) {
        try {
            base = preset(parse_preset_name(get_as<std::string>(obj["preset"], where + ".preset")));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: {}", where, e.what()));
        }
    }
    GmmSpec gmm = base ? base->gmm : parse_gmm(obj["gmm"], where + ".gmm");
    const std::size_t p = gmm.cols();

    std::string id;
    if (obj.contains("id")) {
        id = get_as<std::string>(obj["id"], where + ".id");
    } else if (base) {
        id = to_string(base->name);
    } else {
        id = fmt::format("setting{}", index);
    }
    if (id.empty() || id.find_first_of(",\"\n") != std::string::npos) {
        throw ConfigError(fmt::format("{}: id must be nonempty and free of commas, quotes and newlines", where));
    }

    std::size_t k = base ? base->k : gmm.k();
    if (obj.contains("k")) k = get_count(obj["k"], where + ".k");
    if (k == 0) throw ConfigError(fmt::format("{}.k must be at least 1", where));

    std::vector<std::size_t> ns;
    if (obj.contains("n")) {
        const auto& n = obj["n"];
        if (n.is_array()) {
            for (const auto& v : n) ns.push_back(get_count(v, where + ".n"));
        } else {
            ns.push_back(get_count(n, where + ".n"));
        }
    } else if (base) {
        ns.push_back(base->n);
    }
    if (ns.empty()) throw ConfigError(fmt::format("{}: needs 'n'", where));
    for (auto n : ns) {
        if (n < k) throw ConfigError(fmt::format("{}: n = {} is smaller than k = {}", where, n, k));
    }

    const int given = int(obj.contains("missing_rate")) + int(obj.contains("missing_rates")) + int(obj.contains("q"));
    if (given > 1) throw ConfigError(fmt::format("{}: give at most one of missing_rate, missing_rates, q", where));
    std::vector<McarSpec> mcar;
    try {
        if (obj.contains("missing_rate")) {
            mcar.push_back(McarSpec::uniform_rate(p, get_as<double>(obj["missing_rate"], where + ".missing_rate")));
        } else if (obj.contains("missing_rates")) {
            for (double rate : get_as<std::vector<double>>(obj["missing_rates"], where + ".missing_rates")) {
                mcar.push_back(McarSpec::uniform_rate(p, rate));
            }
        } else if (obj.contains("q")) {
            auto q = get_as<std::vector<double>>(obj["q"], where + ".q");
            if (q.size() != p) throw ConfigError(fmt::format("{}.q has {} entries for p = {}", where, q.size(), p));
            mcar.emplace_back(std::move(q));
        } else if (base) {
            mcar.push_back(base->mcar);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", where, e.what()));
    }
    if (mcar.empty()) throw ConfigError(fmt::format("{}: needs a missing rate or q", where));

    std::optional<std::size_t> reps;
    if (obj.contains("repetitions")) {
        reps = get_count(obj["repetitions"], where + ".repetitions");
        if (*reps == 0) throw ConfigError(fmt::format("{}.repetitions must be at least 1", where));
    }
    return SettingConfig{std::move(id), base ? std::optional(base->name) : std::nullopt, std::move(gmm), k,
                         std::move(ns), std::move(mcar), reps};
}

double missing_rate_of(const McarSpec& spec) {
    double sum = 0.0;
    for (double q : spec.q()) sum += q;
    // Rounded so that a uniform rate prints as given (1 - 0.9 is 0.0999...).
    const double rate = 1.0 - sum / static_cast<double>(spec.cols());
    return std::round(rate * 1e12) / 1e12;
}

FitOptions fit_options(const MethodOptions& m, std::size_t k, Seed seed) {
    return {k, m.restarts, m.max_iters, m.rel_tol, seed};
}

struct Task {
    std::size_t setting;
    std::size_t n;
    std::size_t cell;
    std::size_t rep;
};

std::array<RunRecord, 3> run_repetition(const ExperimentConfig& cfg, const SettingConfig& s, const Task& t,
                                        const CenterMatrix& reference, bool timing) {
    using clock = std::chrono::steady_clock;
    const McarSpec& mcar = s.mcar[t.cell];
    const std::size_t p = s.gmm.cols();

    std::array<RunRecord, 3> out;
    const Method methods[3] = {Method::oracle, Method::complete_case, Method::kpod};
    for (std::size_t m = 0; m < 3; ++m) {
        out[m].setting = s.id;
        out[m].n = t.n;
        out[m].p = p;
        out[m].k = s.k;
        out[m].missing_rate = missing_rate_of(mcar);
        out[m].rep = t.rep;
        out[m].method = methods[m];
    }

    const Seed base = Seed(cfg.master_seed)
                          .derive(s.id)
                          .derive(static_cast<std::uint64_t>(t.n))
                          .derive(static_cast<std::uint64_t>(t.cell))
                          .derive(static_cast<std::uint64_t>(t.rep));

    auto elapsed_ms = [](clock::time_point start) {
        return std::chrono::duration<double, std::milli>(clock::now() - start).count();
    };

    std::optional<GmmSample> sample;
    std::optional<MaskMatrix> mask;
    try {
        sample = sample_gmm(s.gmm, t.n, base.derive("data"));
        mask = gen_mask(t.n, mcar, base.derive("mask"));
    } catch (const std::exception& e) {
        for (auto& r : out) r.status = fmt::format("error: {}", e.what());
        return out;
    }
    const std::size_t cc_count = complete_case_count(*mask);
    for (auto& r : out) r.complete_case_count = cc_count;

    // Oracle: k-means on the complete data.
    try {
        const auto start = clock::now();
        const auto fit = km_fit(sample->data, fit_options(cfg.oracle, s.k, base.derive("oracle-fit")));
        out[0].mse = mse_centers(fit.centers, reference);
        out[0].loss = fit.loss;
        out[0].iterations = fit.iterations;
        if (timing) out[0].wall_time_ms = elapsed_ms(start);
    } catch (const std::exception& e) {
        out[0].status = fmt::format("error: {}", e.what());
    }

    // Complete-case k-means.
    if (cc_count < s.k) {
        out[1].status = "insufficient_complete_cases";
    } else {
        try {
            const auto start = clock::now();
            const auto cc = complete_cases(sample->data, *mask);
            const auto fit = km_fit(cc, fit_options(cfg.complete_case, s.k, base.derive("complete-case-fit")));
            out[1].mse = mse_centers(fit.centers, reference);
            out[1].loss = fit.loss;
            out[1].iterations = fit.iterations;
            if (timing) out[1].wall_time_ms = elapsed_ms(start);
        } catch (const std::exception& e) {
            out[1].status = fmt::format("error: {}", e.what());
        }
    }

    // k-POD on the masked data.
    try {
        const auto start = clock::now();
        const auto masked = apply_mask(sample->data, *mask);
        const auto fit = kpod_fit(masked, *mask, fit_options(cfg.kpod, s.k, base.derive("kpod-fit")));
        out[2].mse = mse_centers(fit.centers, reference);
        out[2].loss = fit.loss;
        out[2].iterations = fit.iterations;
        if (timing) out[2].wall_time_ms = elapsed_ms(start);
        if (!decomposition_check(masked, *mask, fit.centers).holds()) out[2].status = "decomposition_mismatch";
    } catch (const std::exception& e) {
        out[2].status = fmt::format("error: {}", e.what());
    }
    return out;
}

ExperimentResult run_all(const ExperimentConfig& cfg, const RunOptions& opts) {
    if (cfg.settings.empty()) throw ConfigError("config has no settings");
    if (opts.jobs < 1) throw ConfigError("jobs must be at least 1");

    // References first, serially: every repetition of a setting shares one.
    ReferenceCache cache(opts.cache_dir);
    std::vector<CenterMatrix> references;
    references.reserve(cfg.settings.size());
    for (const auto& s : cfg.settings) {
        const FitOptions ref_opts = fit_options(cfg.reference, s.k,
                                                Seed(cfg.master_seed).derive("reference").derive(s.gmm.hash()));
        references.push_back(cache.get_or_compute(s.gmm, s.k, cfg.reference_n, ref_opts));
    }

    std::vector<Task> tasks;
    for (std::size_t si = 0; si < cfg.settings.size(); ++si) {
        const auto& s = cfg.settings[si];
        const std::size_t reps = s.repetitions.value_or(cfg.repetitions);
        for (std::size_t n : s.n) {
            for (std::size_t cell = 0; cell < s.mcar.size(); ++cell) {
                for (std::size_t rep = 0; rep < reps; ++rep) tasks.push_back({si, n, cell, rep});
            }
        }
    }

    std::vector<std::array<RunRecord, 3>> results(tasks.size());
    const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(opts.jobs)
    for (std::int64_t tt = 0; tt < count; ++tt) {
        const auto& t = tasks[static_cast<std::size_t>(tt)];
        results[static_cast<std::size_t>(tt)] =
            run_repetition(cfg, cfg.settings[t.setting], t, references[t.setting], opts.record_timing);
    }

    ExperimentResult out;
    out.records.reserve(results.size() * 3);
    for (auto& triple : results) {
        for (auto& r : triple) out.records.push_back(std::move(r));
    }
    out.aggregates = aggregate(out.records);
    return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    reject_unknown(root, "config",
                   {"name", "mode", "master_seed", "repetitions", "reference", "fit", "methods", "settings", "output"});
    ExperimentConfig cfg;
    if (root.contains("name")) cfg.name = get_as<std::string>(root["name"], "name");
    if (root.contains("mode")) {
        const auto mode = get_as<std::string>(root["mode"], "mode");
        if (mode == "table") {
            cfg.mode = ExperimentConfig::Mode::table;
        } else if (mode == "trend") {
            cfg.mode = ExperimentConfig::Mode::trend;
        } else {
            throw ConfigError(fmt::format("mode must be 'table' or 'trend', not '{}'", mode));
        }
    }
    if (root.contains("master_seed")) {
        if (!root["master_seed"].is_number_unsigned()) throw ConfigError("master_seed: expected an unsigned integer");
        cfg.master_seed = root["master_seed"].get<std::uint64_t>();
    }
    if (root.contains("repetitions")) cfg.repetitions = get_count(root["repetitions"], "repetitions");
    if (cfg.repetitions == 0) throw ConfigError("repetitions must be at least 1");

    if (root.contains("reference")) {
        const auto& ref = root["reference"];
        reject_unknown(ref, "reference", {"n", "restarts", "max_iters", "rel_tol"});
        if (ref.contains("n")) cfg.reference_n = get_count(ref["n"], "reference.n");
        json rest = ref;
        rest.erase("n");
        cfg.reference = parse_method(rest, "reference", cfg.reference);
    }
    MethodOptions shared;
    if (root.contains("fit")) shared = parse_method(root["fit"], "fit", shared);
    cfg.oracle = cfg.complete_case = cfg.kpod = shared;
    if (root.contains("methods")) {
        const auto& methods = root["methods"];
        reject_unknown(methods, "methods", {"oracle", "complete_case", "kpod"});
        if (methods.contains("oracle")) cfg.oracle = parse_method(methods["oracle"], "methods.oracle", shared);
        if (methods.contains("complete_case")) {
            cfg.complete_case = parse_method(methods["complete_case"], "methods.complete_case", shared);
        }
        if (methods.contains("kpod")) cfg.kpod = parse_method(methods["kpod"], "methods.kpod", shared);
    }

    if (!root.contains("settings") || !root["settings"].is_array() || root["settings"].empty()) {
        throw ConfigError("settings: expected a nonempty array");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < root["settings"].size(); ++i) {
        auto s = parse_setting(root["settings"][i], i);
        if (!ids.insert(s.id).second) throw ConfigError(fmt::format("duplicate setting id '{}'", s.id));
        if (cfg.reference_n < s.k) throw ConfigError("reference.n is smaller than k");
        cfg.settings.push_back(std::move(s));
    }
    if (root.contains("output")) cfg.output = get_as<std::string>(root["output"], "output");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

const char* to_string(Method method) {
    switch (method) {
        case Method::oracle: return "oracle";
        case Method::complete_case: return "complete_case";
        case Method::kpod: return "kpod";
    }
    return "unknown";
}

ExperimentResult run_table(const ExperimentConfig& cfg, const RunOptions& opts) { return run_all(cfg, opts); }

ExperimentResult run_trend(const ExperimentConfig& cfg, const RunOptions& opts) {
    for (const auto& s : cfg.settings) {
        for (std::size_t i = 1; i < s.n.size(); ++i) {
            if (s.n[i] <= s.n[i - 1]) {
                throw ConfigError(fmt::format("setting '{}': trend n-list must be strictly ascending", s.id));
            }
        }
    }
    return run_all(cfg, opts);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    return cfg.mode == ExperimentConfig::Mode::trend ? run_trend(cfg, opts) : run_table(cfg, opts);
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
    // Group in first-appearance order so aggregates follow the record order.
    std::vector<AggregateRow> rows;
    std::map<std::tuple<std::string, std::size_t, double, Method>, std::size_t> index;
    std::vector<std::vector<double>> mses;
    std::vector<std::size_t> failures;
    for (const auto& r : records) {
        const auto key = std::make_tuple(r.setting, r.n, r.missing_rate, r.method);
        auto [it, inserted] = index.emplace(key, rows.size());
        if (inserted) {
            rows.push_back({r.setting, r.n, r.missing_rate, r.method, std::nullopt, std::nullopt, 0.0, 0});
            mses.emplace_back();
            failures.push_back(0);
        }
        const std::size_t g = it->second;
        ++rows[g].runs;
        if (r.status == "ok" && r.mse) {
            mses[g].push_back(*r.mse);
        } else {
            ++failures[g];
        }
    }
    for (std::size_t g = 0; g < rows.size(); ++g) {
        const auto& v = mses[g];
        rows[g].fail_frac = static_cast<double>(failures[g]) / static_cast<double>(rows[g].runs);
        if (v.empty()) continue;
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        rows[g].mse_mean = mean;
        if (v.size() > 1) {
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            rows[g].mse_std = std::sqrt(ss / static_cast<double>(v.size() - 1));
        }
    }
    return rows;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kRecordHeader << '\n';
    for (const auto& r : records) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.setting, r.n, r.p, r.k, r.missing_rate, r.rep,
                           to_string(r.method), fmt_opt(r.mse), fmt_opt(r.loss), r.iterations,
                           r.complete_case_count, r.status, fmt_opt(r.wall_time_ms));
    }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << kAggregateHeader << '\n';
    for (const auto& a : rows) {
        out << fmt::format("{},{},{},{},{},{},{}\n", a.setting, a.n, a.missing_rate, to_string(a.method),
                           fmt_opt(a.mse_mean), fmt_opt(a.mse_std), a.fail_frac);
    }
}

void print_aggregate_table(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << fmt::format("{:<10} {:>7} {:>8}  {:<14} {:>18} {:>9}\n", "setting", "n", "missing", "method",
                       "mse mean (sd)", "fail");
    for (const auto& a : rows) {
        const std::string cell = a.mse_mean ? fmt::format("{:.3f} ({:.2f})", *a.mse_mean, a.mse_std.value_or(0.0))
                                            : std::string("-");
        out << fmt::format("{:<10} {:>7} {:>7.0f}%  {:<14} {:>18} {:>9.2f}\n", a.setting, a.n, a.missing_rate * 100.0,
                           to_string(a.method), cell, a.fail_frac);
    }
    out << "(sd: sample standard deviation, n-1 denominator)\n";
}

}  // namespace kmissing
