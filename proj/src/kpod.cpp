#include "kmissing/kpod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kmissing/kernels.hpp"
#include "lloyd.hpp"

namespace kmissing {

namespace {

void require_shapes(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m) {
    require_same_shape(x, r);
    if (x.cols() != m.cols()) {
        throw DimensionError(fmt::format("data has {} columns, centers have {}", x.cols(), m.cols()));
    }
}

std::vector<std::size_t> empty_rows(const MaskMatrix& r) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < r.rows(); ++i) {
        if (r.row_empty(i)) rows.push_back(i);
    }
    return rows;
}

/// Observed column means; 0 for a column with no observed entry.
std::vector<double> observed_column_means(MatrixView x, MaskView r) {
    std::vector<double> sums(x.cols, 0.0);
    std::vector<std::size_t> counts(x.cols, 0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            if (r(i, j)) {
                sums[j] += x(i, j);
                ++counts[j];
            }
        }
    }
    for (std::size_t j = 0; j < x.cols; ++j) {
        sums[j] = counts[j] ? sums[j] / static_cast<double>(counts[j]) : 0.0;
    }
    return sums;
}

std::vector<double> initial_centers(MatrixView x, MaskView r, std::span<const double> col_means, std::size_t k,
                                    std::mt19937_64& engine) {
    const std::size_t p = x.cols;
    std::vector<double> init(k * p);
    const auto rows = detail::sample_distinct_rows(x.rows, k, engine);
    for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t j = 0; j < p; ++j) {
            init[l * p + j] = r(rows[l], j) ? x(rows[l], j) : col_means[j];
        }
    }
    return init;
}

/// Tracks which center cells ever received a value from data.
class CellLedger {
public:
    CellLedger(std::size_t k, std::size_t p) : p_(p), touched_(k * p, 0) {}

    void record(std::span<const std::size_t> cell_counts) {
        for (std::size_t c = 0; c < touched_.size(); ++c) {
            if (cell_counts[c]) touched_[c] = 1;
        }
    }
    void touch_row(std::size_t l) { std::fill_n(touched_.begin() + static_cast<std::ptrdiff_t>(l * p_), p_, 1); }

    std::vector<Cell> untouched() const {
        std::vector<Cell> cells;
        for (std::size_t c = 0; c < touched_.size(); ++c) {
            if (!touched_[c]) cells.emplace_back(c / p_, c % p_);
        }
        return cells;
    }

private:
    std::size_t p_;
    std::vector<std::uint8_t> touched_;
};

std::vector<std::size_t> empty_clusters(std::span<const int> labels, std::size_t k) {
    std::vector<std::size_t> sizes(k, 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    std::vector<std::size_t> empty;
    for (std::size_t l = 0; l < k; ++l) {
        if (sizes[l] == 0) empty.push_back(l);
    }
    return empty;
}

class MaskedOps {
public:
    MaskedOps(MatrixView data, MaskView mask, std::size_t k)
        : data_(data), mask_(mask), k_(k), cell_counts_(k * data.cols), ledger_(k, data.cols) {}

    std::size_t rows() const { return data_.rows; }
    std::size_t cols() const { return data_.cols; }
    std::size_t k() const { return k_; }
    const CellLedger& ledger() const { return ledger_; }

    void assign(std::span<const double> centers, std::span<int> labels, std::span<double> point_loss) {
        kernels::omp::assign_masked(data_, mask_, {centers, k_, data_.cols}, labels, point_loss);
    }

    std::vector<std::size_t> update(std::span<const int> labels, std::span<double> centers) {
        kernels::omp::update_masked(data_, mask_, labels, centers, k_, cell_counts_);
        ledger_.record(cell_counts_);
        return empty_clusters(labels, k_);
    }

    double assigned_loss(std::size_t i, std::size_t l, std::span<const double> centers) const {
        return masked_sq_dist(data_.row(i), mask_.row(i), centers.subspan(l * data_.cols, data_.cols));
    }

    // Observed coordinates of row i; the rest from the row's current center.
    void row_as_center(std::size_t i, std::size_t l, std::span<const double> centers, std::span<double> out) const {
        const std::size_t p = data_.cols;
        for (std::size_t j = 0; j < p; ++j) out[j] = mask_(i, j) ? data_(i, j) : centers[l * p + j];
    }

    void mark_repaired(std::size_t l) { ledger_.touch_row(l); }

private:
    MatrixView data_;
    MaskView mask_;
    std::size_t k_;
    std::vector<std::size_t> cell_counts_;
    CellLedger ledger_;
};

/// Works on an explicit completed matrix Y; never evaluates a masked sum.
class ImputedOps {
public:
    ImputedOps(MatrixView data, MaskView mask, std::size_t k)
        : data_(data),
          mask_(mask),
          k_(k),
          y_(data.values.begin(), data.values.end()),
          counts_(k),
          ledger_(k, data.cols) {}

    std::size_t rows() const { return data_.rows; }
    std::size_t cols() const { return data_.cols; }
    std::size_t k() const { return k_; }
    const CellLedger& ledger() const { return ledger_; }

    // Joint minimisation over (U, Y): complete row i with each candidate
    // center in turn and keep the closest completion.
    void assign(std::span<const double> centers, std::span<int> labels, std::span<double> point_loss) {
        const std::size_t p = data_.cols;
        std::vector<double> candidate(p);
        for (std::size_t i = 0; i < data_.rows; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_l = 0;
            for (std::size_t l = 0; l < k_; ++l) {
                const auto mu = centers.subspan(l * p, p);
                complete_row(i, mu, candidate);
                const double d = sq_dist(candidate, mu);
                if (d < best) {
                    best = d;
                    best_l = static_cast<int>(l);
                }
            }
            labels[i] = best_l;
            point_loss[i] = best;
            complete_row(i, centers.subspan(static_cast<std::size_t>(best_l) * p, p),
                         std::span<double>(y_).subspan(i * p, p));
        }
    }

    // Joint minimisation over (M, Y) for fixed U: re-impute Y from UM and
    // take plain cluster means of Y until the centers stop moving.
    std::vector<std::size_t> update(std::span<const int> labels, std::span<double> centers) {
        const std::size_t n = data_.rows;
        const std::size_t p = data_.cols;
        const MatrixView y_view{y_, n, p};
        std::vector<double> next(centers.begin(), centers.end());
        for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
            impute(labels, centers);
            kernels::serial::update(y_view, labels, next, k_, counts_);
            double delta = 0.0;
            double scale = 1.0;
            for (std::size_t c = 0; c < next.size(); ++c) {
                delta = std::max(delta, std::abs(next[c] - centers[c]));
                scale = std::max(scale, std::abs(next[c]));
            }
            std::copy(next.begin(), next.end(), centers.begin());
            if (delta <= kSweepTol * scale) break;
        }
        impute(labels, centers);
        record_observed(labels);

        std::vector<std::size_t> empty;
        for (std::size_t l = 0; l < k_; ++l) {
            if (counts_[l] == 0) empty.push_back(l);
        }
        return empty;
    }

    double assigned_loss(std::size_t i, std::size_t l, std::span<const double> centers) const {
        const std::size_t p = data_.cols;
        std::vector<double> completed(p);
        const auto mu = centers.subspan(l * p, p);
        complete_row(i, mu, completed);
        return sq_dist(completed, mu);
    }

    void row_as_center(std::size_t i, std::size_t l, std::span<const double> centers, std::span<double> out) const {
        complete_row(i, centers.subspan(l * data_.cols, data_.cols), out);
    }

    void mark_repaired(std::size_t l) { ledger_.touch_row(l); }

    DataMatrix completed() const { return DataMatrix(data_.rows, data_.cols, y_); }

private:
    static constexpr std::size_t kMaxSweeps = 200000;
    static constexpr double kSweepTol = 1e-15;

    void complete_row(std::size_t i, std::span<const double> mu, std::span<double> out) const {
        for (std::size_t j = 0; j < data_.cols; ++j) out[j] = mask_(i, j) ? data_(i, j) : mu[j];
    }

    void impute(std::span<const int> labels, std::span<const double> centers) {
        const std::size_t p = data_.cols;
        for (std::size_t i = 0; i < data_.rows; ++i) {
            const std::size_t l = static_cast<std::size_t>(labels[i]);
            for (std::size_t j = 0; j < p; ++j) {
                if (!mask_(i, j)) y_[i * p + j] = centers[l * p + j];
            }
        }
    }

    void record_observed(std::span<const int> labels) {
        const std::size_t p = data_.cols;
        std::vector<std::size_t> cells(k_ * p, 0);
        for (std::size_t i = 0; i < data_.rows; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                if (mask_(i, j)) ++cells[static_cast<std::size_t>(labels[i]) * p + j];
            }
        }
        ledger_.record(cells);
    }

    MatrixView data_;
    MaskView mask_;
    std::size_t k_;
    std::vector<double> y_;
    std::vector<std::size_t> counts_;
    CellLedger ledger_;
};

template <class Ops>
KpodFitResult fit_with(const DataMatrix& x, const MaskMatrix& r, const FitOptions& opts) {
    require_same_shape(x, r);
    validate_fit_options(opts, x.rows());
    const auto xv = x.view();
    const auto rv = r.view();
    const auto col_means = observed_column_means(xv, rv);

    auto runs = detail::run_restarts(opts, [&](std::mt19937_64& engine) {
        auto init = initial_centers(xv, rv, col_means, opts.k, engine);
        return std::pair{Ops(xv, rv, opts.k), std::move(init)};
    });

    const std::size_t best = detail::best_restart(runs);
    auto& win = *runs[best];

    KpodFitResult result;
    result.centers = CenterMatrix(opts.k, x.cols(), std::move(win.outcome.centers));
    result.assignment = Assignment(std::move(win.outcome.labels), opts.k);
    result.loss = win.outcome.loss;
    result.iterations = win.outcome.trace.iterations;
    result.restarts_run = runs.size();
    result.best_restart = best;
    result.degenerate_cells = win.ops.ledger().untouched();
    result.all_missing_rows = empty_rows(r);
    if constexpr (requires { win.ops.completed(); }) result.completed = win.ops.completed();
    result.traces.reserve(runs.size());
    for (auto& run : runs) result.traces.push_back(std::move(run->outcome.trace));
    return result;
}

}  // namespace

double kpod_loss(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m) {
    require_shapes(x, r, m);
    if (x.empty()) return 0.0;
    std::vector<int> labels(x.rows());
    std::vector<double> point_loss(x.rows());
    kernels::omp::assign_masked(x.view(), r.view(), m.view(), labels, point_loss);
    return kernels::ordered_sum(point_loss) / static_cast<double>(x.rows());
}

KpodAssignment kpod_assign(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m) {
    require_shapes(x, r, m);
    std::vector<int> labels(x.rows());
    std::vector<double> point_loss(x.rows());
    kernels::omp::assign_masked(x.view(), r.view(), m.view(), labels, point_loss);
    return {Assignment(std::move(labels), m.k()), empty_rows(r)};
}

KpodUpdate kpod_update(const DataMatrix& x, const MaskMatrix& r, const Assignment& a, const CenterMatrix& prev) {
    require_shapes(x, r, prev);
    if (a.size() != x.rows()) throw DimensionError("kpod_update: assignment length differs from row count");
    if (a.k() != prev.k()) throw DimensionError("kpod_update: assignment k differs from prev");
    const std::size_t k = prev.k();
    const std::size_t p = x.cols();
    std::vector<double> centers = prev.values();
    std::vector<std::size_t> cell_counts(k * p);
    kernels::omp::update_masked(x.view(), r.view(), a.labels(), centers, k, cell_counts);
    KpodUpdate out{CenterMatrix(k, p, std::move(centers)), {}};
    for (std::size_t c = 0; c < cell_counts.size(); ++c) {
        if (cell_counts[c] == 0) out.degenerate_cells.emplace_back(c / p, c % p);
    }
    return out;
}

DataMatrix complete_matrix(const DataMatrix& x, const MaskMatrix& r, const Assignment& a, const CenterMatrix& m) {
    require_shapes(x, r, m);
    if (a.size() != x.rows() || a.k() != m.k()) throw DimensionError("complete_matrix: assignment does not fit");
    std::vector<double> y = x.values();
    const std::size_t p = x.cols();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (!r(i, j)) y[i * p + j] = m(static_cast<std::size_t>(a[i]), j);
        }
    }
    return DataMatrix(x.rows(), p, std::move(y));
}

KpodFitResult kpod_fit(const DataMatrix& x, const MaskMatrix& r, const FitOptions& opts) {
    return fit_with<MaskedOps>(x, r, opts);
}

KpodFitResult kpod_fit_imputed_form(const DataMatrix& x, const MaskMatrix& r, const FitOptions& opts) {
    return fit_with<ImputedOps>(x, r, opts);
}

}  // namespace kmissing
