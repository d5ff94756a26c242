#ifndef KMISSING_KERNELS_HPP
#define KMISSING_KERNELS_HPP

#include <cstddef>
#include <span>

#include "kmissing/model.hpp"

// Inner loops of the Lloyd-type iterations.
//
// Two implementations share one contract: `serial` is the reference kept for
// testing, `omp` is the OpenMP version the fitting code runs. Both produce
// bit-identical output for any thread count: per-row work is independent and
// every accumulation walks rows in ascending order.

namespace kmissing::kernels {

namespace serial {

/// labels[i] = lowest l minimising |x_i - c_l|^2; point_loss[i] = that minimum.
void assign(MatrixView data, MatrixView centers, std::span<int> labels, std::span<double> point_loss);

/// As assign, summing only over the coordinates observed in each row.
void assign_masked(MatrixView data, MaskView mask, MatrixView centers, std::span<int> labels,
                   std::span<double> point_loss);

/// centers holds the previous k×p centers on entry; rows of empty clusters are kept.
void update(MatrixView data, std::span<const int> labels, std::span<double> centers, std::size_t k,
            std::span<std::size_t> counts);

/// Per-cell means of the observed entries; a cell with none keeps its previous value.
void update_masked(MatrixView data, MaskView mask, std::span<const int> labels, std::span<double> centers,
                   std::size_t k, std::span<std::size_t> cell_counts);

}  // namespace serial

namespace omp {

void assign(MatrixView data, MatrixView centers, std::span<int> labels, std::span<double> point_loss);
void assign_masked(MatrixView data, MaskView mask, MatrixView centers, std::span<int> labels,
                   std::span<double> point_loss);
void update(MatrixView data, std::span<const int> labels, std::span<double> centers, std::size_t k,
            std::span<std::size_t> counts);
void update_masked(MatrixView data, MaskView mask, std::span<const int> labels, std::span<double> centers,
                   std::size_t k, std::span<std::size_t> cell_counts);

}  // namespace omp

/// Left-to-right sum; the reduction order every loss in the library uses.
double ordered_sum(std::span<const double> values);

}  // namespace kmissing::kernels

#endif  // KMISSING_KERNELS_HPP
