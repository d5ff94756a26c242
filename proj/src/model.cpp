#include "kmissing/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace kmissing {

namespace {

void check_finite(const std::vector<double>& values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument(fmt::format("{}: non-finite value at flat index {}", what, i));
        }
    }
}

}  // namespace

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (cols_ == 0) throw DimensionError("DataMatrix: need at least one column");
    if (values_.size() != rows_ * cols_) {
        throw DimensionError(fmt::format("DataMatrix: {} values for a {}x{} matrix", values_.size(), rows_, cols_));
    }
    check_finite(values_, "DataMatrix");
}

MaskMatrix::MaskMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits)
    : rows_(rows), cols_(cols), bits_(std::move(bits)) {
    if (cols_ == 0) throw DimensionError("MaskMatrix: need at least one column");
    if (bits_.size() != rows_ * cols_) {
        throw DimensionError(fmt::format("MaskMatrix: {} bits for a {}x{} mask", bits_.size(), rows_, cols_));
    }
    for (auto b : bits_) {
        if (b > 1) throw std::invalid_argument("MaskMatrix: entries must be 0 or 1");
    }
}

MaskMatrix MaskMatrix::ones(std::size_t rows, std::size_t cols) {
    return MaskMatrix(rows, cols, std::vector<std::uint8_t>(rows * cols, 1));
}

bool MaskMatrix::row_complete(std::size_t i) const {
    auto r = row(i);
    return std::all_of(r.begin(), r.end(), [](std::uint8_t b) { return b != 0; });
}

bool MaskMatrix::row_empty(std::size_t i) const {
    auto r = row(i);
    return std::none_of(r.begin(), r.end(), [](std::uint8_t b) { return b != 0; });
}

bool MaskMatrix::all_observed() const {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

std::size_t MaskMatrix::observed_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

CenterMatrix::CenterMatrix(std::size_t k, std::size_t cols, std::vector<double> values)
    : k_(k), cols_(cols), values_(std::move(values)) {
    if (k_ == 0) throw std::invalid_argument("CenterMatrix: need at least one center");
    if (cols_ == 0) throw DimensionError("CenterMatrix: need at least one column");
    if (values_.size() != k_ * cols_) {
        throw DimensionError(fmt::format("CenterMatrix: {} values for a {}x{} matrix", values_.size(), k_, cols_));
    }
    check_finite(values_, "CenterMatrix");
}

Assignment::Assignment(std::vector<int> labels, std::size_t k) : labels_(std::move(labels)), k_(k) {
    if (k_ == 0) throw std::invalid_argument("Assignment: k must be positive");
    for (int l : labels_) {
        if (l < 0 || static_cast<std::size_t>(l) >= k_) {
            throw std::invalid_argument(fmt::format("Assignment: label {} outside [0, {})", l, k_));
        }
    }
}

std::vector<std::size_t> Assignment::cluster_sizes() const {
    std::vector<std::size_t> sizes(k_, 0);
    for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

double masked_sq_dist(std::span<const double> x, std::span<const std::uint8_t> r,
                      std::span<const double> mu) {
    if (x.size() != r.size() || x.size() != mu.size()) {
        throw DimensionError(fmt::format("masked_sq_dist: lengths {}, {}, {}", x.size(), r.size(), mu.size()));
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (r[j]) {
            const double d = x[j] - mu[j];
            acc += d * d;
        }
    }
    return acc;
}

double sq_dist(std::span<const double> x, std::span<const double> mu) {
    if (x.size() != mu.size()) {
        throw DimensionError(fmt::format("sq_dist: lengths {}, {}", x.size(), mu.size()));
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - mu[j];
        acc += d * d;
    }
    return acc;
}

void require_same_shape(const DataMatrix& x, const MaskMatrix& r) {
    if (x.rows() != r.rows() || x.cols() != r.cols()) {
        throw DimensionError(fmt::format("data is {}x{} but mask is {}x{}", x.rows(), x.cols(), r.rows(), r.cols()));
    }
}

DataMatrix apply_mask(const DataMatrix& x, const MaskMatrix& r) {
    require_same_shape(x, r);
    std::vector<double> values = x.values();
    const auto& bits = r.bits();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!bits[i]) values[i] = 0.0;
    }
    return DataMatrix(x.rows(), x.cols(), std::move(values));
}

}  // namespace kmissing
