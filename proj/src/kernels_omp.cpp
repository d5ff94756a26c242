#include "kmissing/kernels.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace kmissing::kernels::omp {

namespace {

// Below this many distance terms the fork/join overhead dominates.
constexpr std::size_t kParallelWork = std::size_t{1} << 15;

}  // namespace

void assign(MatrixView data, MatrixView centers, std::span<int> labels, std::span<double> point_loss) {
    const std::size_t p = data.cols;
    const std::size_t k = centers.rows;
    const auto n = static_cast<std::int64_t>(data.rows);
    const double* xs = data.values.data();
    const double* cs = centers.values.data();
#pragma omp parallel for schedule(static) if (data.rows * p * k >= kParallelWork)
    for (std::int64_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* x = xs + i * p;
        double best = std::numeric_limits<double>::infinity();
        int best_l = 0;
        for (std::size_t l = 0; l < k; ++l) {
            const double* mu = cs + l * p;
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = x[j] - mu[j];
                acc += d * d;
            }
            if (acc < best) {
                best = acc;
                best_l = static_cast<int>(l);
            }
        }
        labels[i] = best_l;
        point_loss[i] = best;
    }
}

void assign_masked(MatrixView data, MaskView mask, MatrixView centers, std::span<int> labels,
                   std::span<double> point_loss) {
    const std::size_t p = data.cols;
    const std::size_t k = centers.rows;
    const auto n = static_cast<std::int64_t>(data.rows);
    const double* xs = data.values.data();
    const std::uint8_t* rs = mask.bits.data();
    const double* cs = centers.values.data();
#pragma omp parallel for schedule(static) if (data.rows * p * k >= kParallelWork)
    for (std::int64_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* x = xs + i * p;
        const std::uint8_t* r = rs + i * p;
        double best = std::numeric_limits<double>::infinity();
        int best_l = 0;
        for (std::size_t l = 0; l < k; ++l) {
            const double* mu = cs + l * p;
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                if (r[j]) {
                    const double d = x[j] - mu[j];
                    acc += d * d;
                }
            }
            if (acc < best) {
                best = acc;
                best_l = static_cast<int>(l);
            }
        }
        labels[i] = best_l;
        point_loss[i] = best;
    }
}

// Column-parallel: each thread owns whole columns and walks rows in order, so
// every cell sum is accumulated exactly as in the serial reference.

void update(MatrixView data, std::span<const int> labels, std::span<double> centers, std::size_t k,
            std::span<std::size_t> counts) {
    const std::size_t n = data.rows;
    const std::size_t p = data.cols;
    std::vector<double> sums(k * p, 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(labels[i])];

    const auto pp = static_cast<std::int64_t>(p);
#pragma omp parallel for schedule(static) if (n * p >= kParallelWork)
    for (std::int64_t jj = 0; jj < pp; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        for (std::size_t i = 0; i < n; ++i) {
            sums[static_cast<std::size_t>(labels[i]) * p + j] += data.values[i * p + j];
        }
        for (std::size_t l = 0; l < k; ++l) {
            if (counts[l] > 0) centers[l * p + j] = sums[l * p + j] / static_cast<double>(counts[l]);
        }
    }
}

void update_masked(MatrixView data, MaskView mask, std::span<const int> labels, std::span<double> centers,
                   std::size_t k, std::span<std::size_t> cell_counts) {
    const std::size_t n = data.rows;
    const std::size_t p = data.cols;
    std::vector<double> sums(k * p, 0.0);
    std::fill(cell_counts.begin(), cell_counts.end(), std::size_t{0});

    const auto pp = static_cast<std::int64_t>(p);
#pragma omp parallel for schedule(static) if (n * p >= kParallelWork)
    for (std::int64_t jj = 0; jj < pp; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        for (std::size_t i = 0; i < n; ++i) {
            if (mask.bits[i * p + j]) {
                const std::size_t c = static_cast<std::size_t>(labels[i]) * p + j;
                sums[c] += data.values[i * p + j];
                ++cell_counts[c];
            }
        }
        for (std::size_t l = 0; l < k; ++l) {
            const std::size_t c = l * p + j;
            if (cell_counts[c] > 0) centers[c] = sums[c] / static_cast<double>(cell_counts[c]);
        }
    }
}

}  // namespace kmissing::kernels::omp
