#include "kmissing/kernels.hpp"

#include <limits>
#include <vector>

namespace kmissing::kernels {

double ordered_sum(std::span<const double> values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
}

namespace serial {

void assign(MatrixView data, MatrixView centers, std::span<int> labels, std::span<double> point_loss) {
    const std::size_t p = data.cols;
    for (std::size_t i = 0; i < data.rows; ++i) {
        const double* x = data.values.data() + i * p;
        double best = std::numeric_limits<double>::infinity();
        int best_l = 0;
        for (std::size_t l = 0; l < centers.rows; ++l) {
            const double* mu = centers.values.data() + l * p;
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
    for (std::size_t i = 0; i < data.rows; ++i) {
        const double* x = data.values.data() + i * p;
        const std::uint8_t* r = mask.bits.data() + i * p;
        double best = std::numeric_limits<double>::infinity();
        int best_l = 0;
        for (std::size_t l = 0; l < centers.rows; ++l) {
            const double* mu = centers.values.data() + l * p;
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

void update(MatrixView data, std::span<const int> labels, std::span<double> centers, std::size_t k,
            std::span<std::size_t> counts) {
    const std::size_t p = data.cols;
    std::vector<double> sums(k * p, 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < data.rows; ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        ++counts[l];
        for (std::size_t j = 0; j < p; ++j) sums[l * p + j] += data.values[i * p + j];
    }
    for (std::size_t l = 0; l < k; ++l) {
        if (counts[l] == 0) continue;
        const auto c = static_cast<double>(counts[l]);
        for (std::size_t j = 0; j < p; ++j) centers[l * p + j] = sums[l * p + j] / c;
    }
}

void update_masked(MatrixView data, MaskView mask, std::span<const int> labels, std::span<double> centers,
                   std::size_t k, std::span<std::size_t> cell_counts) {
    const std::size_t p = data.cols;
    std::vector<double> sums(k * p, 0.0);
    std::fill(cell_counts.begin(), cell_counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < data.rows; ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < p; ++j) {
            if (mask.bits[i * p + j]) {
                sums[l * p + j] += data.values[i * p + j];
                ++cell_counts[l * p + j];
            }
        }
    }
    for (std::size_t c = 0; c < k * p; ++c) {
        if (cell_counts[c] > 0) centers[c] = sums[c] / static_cast<double>(cell_counts[c]);
    }
}

}  // namespace serial
}  // namespace kmissing::kernels
