// Serial reference kernels against their OpenMP counterparts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "kmissing/kernels.hpp"

namespace {

using namespace kmissing;

struct Problem {
    std::size_t n, p, k;
    std::vector<double> x, centers;
    std::vector<std::uint8_t> mask;
    std::vector<int> labels;

    Problem(std::size_t n_, std::size_t p_, std::size_t k_) : n(n_), p(p_), k(k_) {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> z;
        std::bernoulli_distribution keep(0.8);
        x.resize(n * p);
        mask.resize(n * p);
        centers.resize(k * p);
        labels.resize(n);
        for (auto& v : x) v = z(rng);
        for (auto& b : mask) b = keep(rng) ? 1 : 0;
        for (auto& v : centers) v = z(rng);
        for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);
    }
    MatrixView data() const { return {x, n, p}; }
    MaskView bits() const { return {mask, n, p}; }
    MatrixView cview() const { return {centers, k, p}; }
};

const Problem& problem(std::int64_t p) {
    static const Problem p2(200000, 2, 3);
    static const Problem p50(20000, 50, 3);
    return p == 2 ? p2 : p50;
}

template <auto Fn>
void assign_masked(benchmark::State& state) {
    const auto& pr = problem(state.range(0));
    std::vector<int> labels(pr.n);
    std::vector<double> loss(pr.n);
    for (auto _ : state) {
        Fn(pr.data(), pr.bits(), pr.cview(), labels, loss);
        benchmark::DoNotOptimize(loss.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pr.n));
}

template <auto Fn>
void update_masked(benchmark::State& state) {
    const auto& pr = problem(state.range(0));
    std::vector<double> centers = pr.centers;
    std::vector<std::size_t> cells(pr.k * pr.p);
    for (auto _ : state) {
        Fn(pr.data(), pr.bits(), pr.labels, centers, pr.k, cells);
        benchmark::DoNotOptimize(centers.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pr.n));
}

template <auto Fn>
void assign_full(benchmark::State& state) {
    const auto& pr = problem(state.range(0));
    std::vector<int> labels(pr.n);
    std::vector<double> loss(pr.n);
    for (auto _ : state) {
        Fn(pr.data(), pr.cview(), labels, loss);
        benchmark::DoNotOptimize(loss.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pr.n));
}

}  // namespace

BENCHMARK(assign_full<kernels::serial::assign>)->Name("assign/serial")->Arg(2)->Arg(50);
BENCHMARK(assign_full<kernels::omp::assign>)->Name("assign/omp")->Arg(2)->Arg(50);
BENCHMARK(assign_masked<kernels::serial::assign_masked>)->Name("assign_masked/serial")->Arg(2)->Arg(50);
BENCHMARK(assign_masked<kernels::omp::assign_masked>)->Name("assign_masked/omp")->Arg(2)->Arg(50);
BENCHMARK(update_masked<kernels::serial::update_masked>)->Name("update_masked/serial")->Arg(2)->Arg(50);
BENCHMARK(update_masked<kernels::omp::update_masked>)->Name("update_masked/omp")->Arg(2)->Arg(50);

BENCHMARK_MAIN();
