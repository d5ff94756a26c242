#ifndef KMISSING_SRC_LLOYD_HPP
#define KMISSING_SRC_LLOYD_HPP

// Restart loop and Lloyd iteration shared by k-means and both k-POD forms.
// An Ops type supplies the geometry:
//
//   std::size_t rows() const, cols() const, k() const;
//   void assign(std::span<const double> centers, std::span<int> labels, std::span<double> point_loss);
//   std::vector<std::size_t> update(std::span<const int> labels, std::span<double> centers);   // empty clusters
//   double assigned_loss(std::size_t i, std::size_t l, std::span<const double> centers) const;
//   void row_as_center(std::size_t i, std::size_t l, std::span<const double> centers, std::span<double> out) const;
//   void mark_repaired(std::size_t l);

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include "kmissing/kernels.hpp"
#include "kmissing/kmeans.hpp"

namespace kmissing::detail {

struct RestartOutcome {
    std::vector<double> centers;
    std::vector<int> labels;
    double loss = 0.0;
    RestartTrace trace;
};

/// k distinct indices from [0, n), partial Fisher-Yates.
inline std::vector<std::size_t> sample_distinct_rows(std::size_t n, std::size_t k, std::mt19937_64& engine) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t t = 0; t < k; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, n - 1);
        std::swap(idx[t], idx[pick(engine)]);
    }
    idx.resize(k);
    return idx;
}

inline Seed restart_seed(const FitOptions& opts, std::size_t restart) {
    return opts.seed.derive("restart").derive(static_cast<std::uint64_t>(restart));
}

template <class Ops>
void repair_empty(Ops& ops, const std::vector<std::size_t>& empty, std::span<const int> labels,
                  std::span<double> centers) {
    const std::size_t n = ops.rows();
    const std::size_t p = ops.cols();
    std::vector<double> loss(n);
    for (std::size_t i = 0; i < n; ++i) loss[i] = ops.assigned_loss(i, static_cast<std::size_t>(labels[i]), centers);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return loss[a] > loss[b]; });

    const std::vector<double> snapshot(centers.begin(), centers.end());
    for (std::size_t e = 0; e < empty.size() && e < n; ++e) {
        const std::size_t i = order[e];
        ops.row_as_center(i, static_cast<std::size_t>(labels[i]), snapshot, centers.subspan(empty[e] * p, p));
        ops.mark_repaired(empty[e]);
    }
}

template <class Ops>
RestartOutcome run_lloyd(Ops& ops, std::vector<double> centers, const FitOptions& opts) {
    const std::size_t n = ops.rows();
    RestartOutcome out;
    std::vector<int> labels(n), next(n);
    std::vector<double> point_loss(n);

    ops.assign(centers, labels, point_loss);
    double loss = kernels::ordered_sum(point_loss) / static_cast<double>(n);
    out.trace.losses.push_back(loss);
    out.trace.stop = StopReason::max_iters;

    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        const auto empty = ops.update(labels, centers);
        if (!empty.empty()) {
            repair_empty(ops, empty, labels, centers);
            out.trace.repair_iterations.push_back(it);
        }
        ops.assign(centers, next, point_loss);
        const double next_loss = kernels::ordered_sum(point_loss) / static_cast<double>(n);
        out.trace.losses.push_back(next_loss);
        out.trace.iterations = it;

        const bool unchanged = next == labels;
        const double decrease = loss - next_loss;
        labels.swap(next);
        const double prev = loss;
        loss = next_loss;
        if (unchanged) {
            out.trace.stop = StopReason::fixed_point;
            break;
        }
        if (decrease < opts.rel_tol * prev) {
            out.trace.stop = StopReason::small_decrease;
            break;
        }
    }
    out.centers = std::move(centers);
    out.labels = std::move(labels);
    out.loss = loss;
    return out;
}

/// Runs every restart (concurrently when OpenMP allows) and returns them in
/// restart order. `make` builds a fresh Ops plus its initial centers from a
/// restart's engine: std::pair<Ops, std::vector<double>> make(std::mt19937_64&).
template <class Make>
auto run_restarts(const FitOptions& opts, Make make) {
    using Ops = typename std::invoke_result_t<Make, std::mt19937_64&>::first_type;
    struct Run {
        RestartOutcome outcome;
        Ops ops;
    };
    std::vector<std::optional<Run>> runs(opts.restarts);
    const auto restarts = static_cast<std::int64_t>(opts.restarts);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t rr = 0; rr < restarts; ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        auto engine = restart_seed(opts, r).engine();
        auto [ops, init] = make(engine);
        auto outcome = run_lloyd(ops, std::move(init), opts);
        runs[r].emplace(Run{std::move(outcome), std::move(ops)});
    }
    return runs;
}

template <class Runs>
std::size_t best_restart(const Runs& runs) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r]->outcome.loss < runs[best]->outcome.loss) best = r;
    }
    return best;
}

}  // namespace kmissing::detail

#endif  // KMISSING_SRC_LLOYD_HPP
