#include "kmissing/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "kmissing/csv.hpp"
#include "kmissing/experiments.hpp"
#include "kmissing/kmeans.hpp"
#include "kmissing/kpod.hpp"
#include "kmissing/metrics.hpp"
#include "kmissing/missing.hpp"
#include "kmissing/synthetic.hpp"

namespace kmissing {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Carries an exit code out of a command body.
struct CommandError : std::runtime_error {
    CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw CommandError(kExitInvalid, fmt::format("cannot write '{}'", path.string()));
    out << doc.dump(2) << '\n';
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CommandError(kExitInvalid, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

json cells_json(const std::vector<Cell>& cells) {
    json arr = json::array();
    for (const auto& [l, j] : cells) arr.push_back({l, j});
    return arr;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string data;
    std::string mask;
    std::size_t k = 0;
    std::string method = "kpod";
    std::size_t restarts = 30;
    std::size_t max_iters = 200;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const auto data = read_data_csv(fs::path(a.data));
    const auto mask = a.mask.empty() ? MaskMatrix::ones(data.rows(), data.cols()) : read_mask_csv(fs::path(a.mask));
    require_same_shape(data, mask);
    const FitOptions opts{a.k, a.restarts, a.max_iters, a.rel_tol, Seed(a.seed)};

    const fs::path dir(a.out);
    ensure_dir(dir);
    json summary{{"method", a.method}, {"n", data.rows()}, {"p", data.cols()}, {"k", a.k}, {"seed", a.seed}};
    summary["complete_case_count"] = complete_case_count(mask);

    if (a.method == "kmeans") {
        if (!mask.all_observed()) {
            throw CommandError(kExitInvalid, "kmeans needs complete data; use --method kpod or complete-case");
        }
        const auto fit = km_fit(data, opts);
        write_matrix_csv(dir / "centers.csv", fit.centers.view());
        write_labels_csv(dir / "labels.csv", fit.assignment.labels());
        summary.update({{"loss", fit.loss},
                        {"iterations", fit.iterations},
                        {"restarts_run", fit.restarts_run},
                        {"best_restart", fit.best_restart},
                        {"stop", to_string(fit.traces[fit.best_restart].stop)},
                        {"degenerate_cells", json::array()},
                        {"all_missing_rows", json::array()}});
    } else if (a.method == "kpod") {
        const auto fit = kpod_fit(apply_mask(data, mask), mask, opts);
        write_matrix_csv(dir / "centers.csv", fit.centers.view());
        write_labels_csv(dir / "labels.csv", fit.assignment.labels());
        summary.update({{"loss", fit.loss},
                        {"iterations", fit.iterations},
                        {"restarts_run", fit.restarts_run},
                        {"best_restart", fit.best_restart},
                        {"stop", to_string(fit.traces[fit.best_restart].stop)},
                        {"degenerate_cells", cells_json(fit.degenerate_cells)},
                        {"all_missing_rows", fit.all_missing_rows}});
    } else if (a.method == "complete-case") {
        const auto cc = complete_cases(data, mask);
        if (cc.rows() < a.k) {
            throw CommandError(kExitInsufficient,
                               fmt::format("only {} complete rows for k = {}", cc.rows(), a.k));
        }
        const auto fit = km_fit(cc, opts);
        // Rows dropped by complete-case deletion are labelled -1.
        std::vector<int> labels(data.rows(), -1);
        for (std::size_t i = 0, c = 0; i < data.rows(); ++i) {
            if (mask.row_complete(i)) labels[i] = fit.assignment[c++];
        }
        write_matrix_csv(dir / "centers.csv", fit.centers.view());
        write_labels_csv(dir / "labels.csv", labels);
        summary.update({{"loss", fit.loss},
                        {"iterations", fit.iterations},
                        {"restarts_run", fit.restarts_run},
                        {"best_restart", fit.best_restart},
                        {"stop", to_string(fit.traces[fit.best_restart].stop)},
                        {"degenerate_cells", json::array()},
                        {"all_missing_rows", json::array()}});
    } else {
        throw CommandError(kExitInvalid, fmt::format("unknown method '{}'", a.method));
    }
    write_json(dir / "summary.json", summary);
    out << fmt::format("{}: loss {:.10g} after {} iterations; wrote {}\n", a.method, summary["loss"].get<double>(),
                       summary["iterations"].get<std::size_t>(), dir.string());
    return kExitOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::string config;
    std::string out;
    int jobs = 1;
    std::string cache_dir;
    bool timing = false;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
    const auto cfg = load_config(fs::path(a.config));
    const fs::path dir = !a.out.empty() ? fs::path(a.out) : fs::path(cfg.output);
    if (dir.empty()) throw CommandError(kExitInvalid, "no output directory: pass --out or set 'output'");
    ensure_dir(dir);
    RunOptions opts;
    opts.jobs = a.jobs;
    opts.cache_dir = a.cache_dir.empty() ? dir / "reference_cache" : fs::path(a.cache_dir);
    opts.record_timing = a.timing;

    const auto result = run_experiment(cfg, opts);
    {
        std::ofstream records(dir / "records.csv");
        write_records_csv(records, result.records);
        std::ofstream agg(dir / "aggregate.csv");
        write_aggregate_csv(agg, result.aggregates);
        if (!records || !agg) throw CommandError(kExitInvalid, "failed writing experiment CSVs");
    }
    out << fmt::format("{} ({} records)\n", cfg.name, result.records.size());
    print_aggregate_table(out, result.aggregates);
    return kExitOk;
}

// ---------------------------------------------------------------- check-decomposition

struct DecompArgs {
    std::size_t n = 200;
    std::size_t p = 3;
    std::size_t k = 3;
    std::vector<double> q;
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::size_t mc_draws = 0;
};

std::vector<double> pick_q(const DecompArgs& a, std::mt19937_64& engine) {
    if (!a.q.empty()) return a.q;
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::vector<double> q(a.p);
    for (auto& v : q) v = u(engine);
    return q;
}

CenterMatrix random_centers(std::size_t k, std::size_t p, std::mt19937_64& engine, double scale) {
    std::normal_distribution<double> z(0.0, scale);
    std::vector<double> v(k * p);
    for (auto& x : v) x = z(engine);
    return CenterMatrix(k, p, std::move(v));
}

int cmd_check_decomposition(const DecompArgs& a, std::ostream& out) {
    if (!a.q.empty() && a.q.size() != a.p) {
        throw CommandError(kExitInvalid, fmt::format("--q has {} values for p = {}", a.q.size(), a.p));
    }
    if (a.n == 0 || a.p == 0 || a.k == 0 || a.trials == 0) {
        throw CommandError(kExitInvalid, "--n, --p, --k and --trials must be positive");
    }
    const Seed root(a.seed);

    if (a.mc_draws > 0) {
        bool ok = true;
        for (std::size_t t = 0; t < a.trials; ++t) {
            const Seed s = root.derive("mc-trial").derive(static_cast<std::uint64_t>(t));
            auto engine = s.derive("params").engine();
            const McarSpec q(pick_q(a, engine));
            const GmmSpec gmm(std::vector<double>(a.k, 1.0 / static_cast<double>(a.k)),
                              random_centers(a.k, a.p, engine, 2.0));
            const auto m = random_centers(a.k, a.p, engine, 2.0);
            const auto est = mc_decomposition(gmm, q, m, a.mc_draws, s.derive("draws"));
            const double z = est.difference.std_error > 0 ? std::abs(est.difference.mean) / est.difference.std_error
                                                           : 0.0;
            const bool pass = z <= 4.0;
            ok = ok && pass;
            out << fmt::format("trial {}: L_kpod {:.6f} (se {:.2g})  sum_r P(r) L_km(.|r) {:.6f} (se {:.2g})  "
                               "paired diff {:.3g} = {:.2f} se  {}\n",
                               t, est.kpod.mean, est.kpod.std_error, est.weighted.mean, est.weighted.std_error,
                               est.difference.mean, z, pass ? "OK" : "FAIL");
            if (a.p == 1) {
                const auto losses = mc_expected_loss(gmm, q, m, a.mc_draws, s.derive("draws"));
                out << fmt::format("  p=1: L_kpod {:.6f} vs q*L_km {:.6f}\n", losses.kpod.mean,
                                   q.q()[0] * losses.kmeans.mean);
            }
        }
        return ok ? kExitOk : kExitCheckFailed;
    }

    double max_diff = 0.0;
    double max_ratio = 0.0;
    std::size_t violations = 0;
    bool full_mask_exact = true;
    for (std::size_t t = 0; t < a.trials; ++t) {
        const Seed s = root.derive("trial").derive(static_cast<std::uint64_t>(t));
        auto engine = s.derive("params").engine();
        const McarSpec q(pick_q(a, engine));
        const auto x = sample_gmm(GmmSpec(std::vector<double>(a.k, 1.0 / static_cast<double>(a.k)),
                                          random_centers(a.k, a.p, engine, 3.0)),
                                  a.n, s.derive("data"))
                           .data;
        const auto r = gen_mask(a.n, q, s.derive("mask"));
        const auto m = random_centers(a.k, a.p, engine, 3.0);
        const auto report = decomposition_check(x, r, m);
        max_diff = std::max(max_diff, report.abs_diff);
        max_ratio = std::max(max_ratio, report.abs_diff / report.tolerance());
        if (!report.holds()) ++violations;
        if (r.all_observed() && report.lhs != km_loss(x, m)) full_mask_exact = false;
    }
    out << fmt::format("trials {}  n {}  p {}  k {}\n", a.trials, a.n, a.p, a.k);
    out << fmt::format("max abs_diff {:.3e}  (max abs_diff / tolerance {:.3e}, tolerance 1e-10*(1+|lhs|))\n", max_diff,
                       max_ratio);
    if (!full_mask_exact) out << "full-mask trial where lhs != km_loss\n";
    out << (violations == 0 && full_mask_exact ? "OK\n" : fmt::format("FAILED in {} trials\n", violations));
    return violations == 0 && full_mask_exact ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- generate / illustrate

struct GenerateArgs {
    std::string preset;
    std::size_t n = 0;
    double missing_rate = -1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    const auto p = preset(parse_preset_name(a.preset));
    const std::size_t n = a.n ? a.n : p.n;
    const McarSpec mcar = a.missing_rate >= 0.0 ? McarSpec::uniform_rate(p.gmm.cols(), a.missing_rate) : p.mcar;
    const Seed seed(a.seed);
    const auto sample = sample_gmm(p.gmm, n, seed.derive("data"));
    const auto mask = gen_mask(n, mcar, seed.derive("mask"));

    const fs::path dir(a.out);
    ensure_dir(dir);
    write_matrix_csv(dir / "data.csv", sample.data.view());
    write_matrix_csv(dir / "masked.csv", apply_mask(sample.data, mask).view());
    write_mask_csv(dir / "mask.csv", mask);
    write_labels_csv(dir / "components.csv", sample.labels);
    out << fmt::format("preset {}: n {} p {}; {} complete rows; wrote {}\n", to_string(p.name), n, p.gmm.cols(),
                       complete_case_count(mask), dir.string());
    return kExitOk;
}

struct IllustrateArgs {
    std::string preset = "intro";
    std::size_t n = 0;
    std::size_t restarts = 30;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_illustrate(const IllustrateArgs& a, std::ostream& out) {
    const auto p = preset(parse_preset_name(a.preset));
    const std::size_t n = a.n ? a.n : p.n;
    const Seed seed(a.seed);
    const auto sample = sample_gmm(p.gmm, n, seed.derive("data"));
    const auto mask = gen_mask(n, p.mcar, seed.derive("mask"));
    const auto masked = apply_mask(sample.data, mask);
    auto opts = [&](const char* label) { return FitOptions{p.k, a.restarts, 200, 1e-8, seed.derive(label)}; };

    const auto all = km_fit(sample.data, opts("kmeans"));
    const auto cc_rows = complete_cases(sample.data, mask);
    if (cc_rows.rows() < p.k) throw CommandError(kExitInsufficient, "too few complete cases");
    const auto cc = km_fit(cc_rows, opts("complete-case"));
    const auto kp = kpod_fit(masked, mask, opts("kpod"));

    const fs::path dir(a.out);
    ensure_dir(dir);
    write_matrix_csv(dir / "data.csv", sample.data.view());
    write_mask_csv(dir / "mask.csv", mask);
    write_matrix_csv(dir / "centers_kmeans.csv", all.centers.view());
    write_matrix_csv(dir / "centers_complete_case.csv", cc.centers.view());
    write_matrix_csv(dir / "centers_kpod.csv", kp.centers.view());
    const json summary{{"preset", to_string(p.name)},
                       {"n", n},
                       {"complete_case_count", cc_rows.rows()},
                       {"mse_complete_case_vs_kmeans", mse_centers(cc.centers, all.centers)},
                       {"mse_kpod_vs_kmeans", mse_centers(kp.centers, all.centers)},
                       {"mse_kpod_vs_complete_case", mse_centers(kp.centers, cc.centers)}};
    write_json(dir / "summary.json", summary);
    out << summary.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-means, k-POD and complete-case clustering for incomplete data"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one method to a data CSV");
    fit_cmd->add_option("--data", fit.data, "Headerless data CSV")->required();
    fit_cmd->add_option("--mask", fit.mask, "Headerless 0/1 mask CSV (default: all observed)");
    fit_cmd->add_option("--k", fit.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--method", fit.method, "kmeans | kpod | complete-case")
        ->check(CLI::IsMember({"kmeans", "kpod", "complete-case"}));
    fit_cmd->add_option("--restarts", fit.restarts, "Random restarts")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-iters", fit.max_iters, "Iteration cap per restart")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--rel-tol", fit.rel_tol, "Relative loss-decrease stopping threshold")
        ->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--seed", fit.seed, "Seed");
    fit_cmd->add_option("--out", fit.out, "Output directory")->required();

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a simulation config");
    exp_cmd->add_option("--config", exp.config, "JSON experiment config")->required();
    exp_cmd->add_option("--out", exp.out, "Output directory (overrides the config's 'output')");
    exp_cmd->add_option("--jobs", exp.jobs, "Worker threads")->check(CLI::PositiveNumber);
    exp_cmd->add_option("--cache-dir", exp.cache_dir, "Reference-center cache (default: OUT/reference_cache)");
    exp_cmd->add_flag("--timing", exp.timing, "Fill wall_time_ms (output is then not reproducible)");

    DecompArgs dec;
    auto* dec_cmd = app.add_subcommand("check-decomposition", "Check the pattern decomposition of the k-POD loss");
    dec_cmd->add_option("--n", dec.n, "Rows per instance");
    dec_cmd->add_option("--p", dec.p, "Columns");
    dec_cmd->add_option("--k", dec.k, "Centers");
    dec_cmd->add_option("--q", dec.q, "Observation probabilities, one per column (default: random)")
        ->delimiter(',')
        ->check(CLI::Range(1e-12, 1.0));
    dec_cmd->add_option("--seed", dec.seed, "Seed");
    dec_cmd->add_option("--trials", dec.trials, "Random instances");
    dec_cmd->add_option("--mc-draws", dec.mc_draws, "Monte-Carlo draws per trial (expected-loss mode)");

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate", "Sample a preset and its MCAR mask to CSV");
    gen_cmd->add_option("--preset", gen.preset, "intro | a | b | s1 | s2 | s3")->required();
    gen_cmd->add_option("--n", gen.n, "Rows (default: preset)");
    gen_cmd->add_option("--missing-rate", gen.missing_rate, "Uniform missing rate (default: preset q)")
        ->check(CLI::Range(0.0, 0.999999));
    gen_cmd->add_option("--seed", gen.seed, "Seed");
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    IllustrateArgs ill;
    auto* ill_cmd = app.add_subcommand("illustrate", "Fit all three methods on one preset sample for plotting");
    ill_cmd->add_option("--preset", ill.preset, "Preset (default intro)");
    ill_cmd->add_option("--n", ill.n, "Rows (default: preset)");
    ill_cmd->add_option("--restarts", ill.restarts, "Random restarts")->check(CLI::PositiveNumber);
    ill_cmd->add_option("--seed", ill.seed, "Seed");
    ill_cmd->add_option("--out", ill.out, "Output directory")->required();

    std::vector<std::string> argv_storage{"kmissing"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit, out);
        if (*exp_cmd) return cmd_experiment(exp, out);
        if (*dec_cmd) return cmd_check_decomposition(dec, out);
        if (*gen_cmd) return cmd_generate(gen, out);
        if (*ill_cmd) return cmd_illustrate(ill, out);
    } catch (const CommandError& e) {
        err << "error: " << e.what() << '\n';
        return e.code;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace kmissing
