#ifndef KMISSING_MODEL_HPP
#define KMISSING_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmissing {

/// Shapes of two operands disagree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fewer usable rows than requested clusters (e.g. after complete-case deletion).
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Read-only row-major view used by the kernels.
struct MatrixView {
    std::span<const double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::span<const double> row(std::size_t i) const { return values.subspan(i * cols, cols); }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct MaskView {
    std::span<const std::uint8_t> bits;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::span<const std::uint8_t> row(std::size_t i) const { return bits.subspan(i * cols, cols); }
    bool operator()(std::size_t i, std::size_t j) const { return bits[i * cols + j] != 0; }
};

/// n×p matrix of observations, row-major. Every value is finite; masked
/// entries hold a placeholder (0 by convention).
///
/// A DataMatrix may have zero rows (e.g. the complete cases of a mask with no
/// complete row); every fitting routine rejects such input.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * cols_, cols_);
    }
    const std::vector<double>& values() const { return values_; }
    MatrixView view() const { return {values_, rows_, cols_}; }

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// n×p response indicators; bit (i,j) is 1 when X_ij is observed.
class MaskMatrix {
public:
    MaskMatrix() = default;
    MaskMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits);

    static MaskMatrix ones(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * cols_ + j] != 0; }
    std::span<const std::uint8_t> row(std::size_t i) const {
        return std::span<const std::uint8_t>(bits_).subspan(i * cols_, cols_);
    }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    MaskView view() const { return {bits_, rows_, cols_}; }

    bool row_complete(std::size_t i) const;
    bool row_empty(std::size_t i) const;
    bool all_observed() const;
    std::size_t observed_count() const;

    friend bool operator==(const MaskMatrix&, const MaskMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// k×p matrix of cluster centers; row l is the center of cluster l.
class CenterMatrix {
public:
    CenterMatrix() = default;
    CenterMatrix(std::size_t k, std::size_t cols, std::vector<double> values);

    std::size_t k() const { return k_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t l, std::size_t j) const { return values_[l * cols_ + j]; }
    std::span<const double> row(std::size_t l) const {
        return std::span<const double>(values_).subspan(l * cols_, cols_);
    }
    const std::vector<double>& values() const { return values_; }
    MatrixView view() const { return {values_, k_, cols_}; }

    friend bool operator==(const CenterMatrix&, const CenterMatrix&) = default;

private:
    std::size_t k_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Cluster label per row, each in [0, k).
class Assignment {
public:
    Assignment() = default;
    Assignment(std::vector<int> labels, std::size_t k);

    std::size_t size() const { return labels_.size(); }
    std::size_t k() const { return k_; }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }

    std::vector<std::size_t> cluster_sizes() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<int> labels_;
    std::size_t k_ = 0;
};

/// Squared distance over the observed coordinates: sum_j r_j (x_j - mu_j)^2.
double masked_sq_dist(std::span<const double> x, std::span<const std::uint8_t> r,
                      std::span<const double> mu);

/// Plain squared Euclidean distance.
double sq_dist(std::span<const double> x, std::span<const double> mu);

/// P_Omega(X): copy of X with every unobserved entry replaced by 0.
DataMatrix apply_mask(const DataMatrix& x, const MaskMatrix& r);

void require_same_shape(const DataMatrix& x, const MaskMatrix& r);

}  // namespace kmissing

#endif  // KMISSING_MODEL_HPP
