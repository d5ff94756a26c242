#include "kmissing/kmeans.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "kmissing/kernels.hpp"
#include "lloyd.hpp"

namespace kmissing {

namespace {

void require_cols(const DataMatrix& x, const CenterMatrix& m) {
    if (x.cols() != m.cols()) {
        throw DimensionError(fmt::format("data has {} columns, centers have {}", x.cols(), m.cols()));
    }
}

class FullOps {
public:
    FullOps(MatrixView data, std::size_t k) : data_(data), k_(k), counts_(k) {}

    std::size_t rows() const { return data_.rows; }
    std::size_t cols() const { return data_.cols; }
    std::size_t k() const { return k_; }

    void assign(std::span<const double> centers, std::span<int> labels, std::span<double> point_loss) {
        kernels::omp::assign(data_, {centers, k_, data_.cols}, labels, point_loss);
    }

    std::vector<std::size_t> update(std::span<const int> labels, std::span<double> centers) {
        kernels::omp::update(data_, labels, centers, k_, counts_);
        std::vector<std::size_t> empty;
        for (std::size_t l = 0; l < k_; ++l) {
            if (counts_[l] == 0) empty.push_back(l);
        }
        return empty;
    }

    double assigned_loss(std::size_t i, std::size_t l, std::span<const double> centers) const {
        return sq_dist(data_.row(i), centers.subspan(l * data_.cols, data_.cols));
    }

    void row_as_center(std::size_t i, std::size_t, std::span<const double>, std::span<double> out) const {
        const auto x = data_.row(i);
        std::copy(x.begin(), x.end(), out.begin());
    }

    void mark_repaired(std::size_t) {}

private:
    MatrixView data_;
    std::size_t k_;
    std::vector<std::size_t> counts_;
};

}  // namespace

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::fixed_point: return "fixed_point";
        case StopReason::small_decrease: return "small_decrease";
        case StopReason::max_iters: return "max_iters";
    }
    return "unknown";
}

void validate_fit_options(const FitOptions& opts, std::size_t rows) {
    if (opts.k == 0) throw std::invalid_argument("k must be at least 1");
    if (opts.restarts == 0) throw std::invalid_argument("restarts must be at least 1");
    if (opts.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
    if (!(opts.rel_tol >= 0.0)) throw std::invalid_argument("rel_tol must be nonnegative");
    if (opts.k > rows) {
        throw InsufficientDataError(fmt::format("k = {} exceeds the {} available rows", opts.k, rows));
    }
}

double km_loss(const DataMatrix& x, const CenterMatrix& m) {
    require_cols(x, m);
    if (x.empty()) return 0.0;
    std::vector<int> labels(x.rows());
    std::vector<double> point_loss(x.rows());
    kernels::omp::assign(x.view(), m.view(), labels, point_loss);
    return kernels::ordered_sum(point_loss) / static_cast<double>(x.rows());
}

Assignment km_assign(const DataMatrix& x, const CenterMatrix& m) {
    require_cols(x, m);
    std::vector<int> labels(x.rows());
    std::vector<double> point_loss(x.rows());
    kernels::omp::assign(x.view(), m.view(), labels, point_loss);
    return Assignment(std::move(labels), m.k());
}

CenterMatrix km_update(const DataMatrix& x, const Assignment& a, std::size_t k, const CenterMatrix& prev) {
    require_cols(x, prev);
    if (prev.k() != k || a.k() != k) throw DimensionError("km_update: k disagrees with prev/assignment");
    if (a.size() != x.rows()) throw DimensionError("km_update: assignment length differs from row count");
    std::vector<double> centers = prev.values();
    std::vector<std::size_t> counts(k);
    kernels::omp::update(x.view(), a.labels(), centers, k, counts);
    return CenterMatrix(k, x.cols(), std::move(centers));
}

FitResult km_fit(const DataMatrix& x, const FitOptions& opts) {
    validate_fit_options(opts, x.rows());
    const auto view = x.view();
    const std::size_t p = x.cols();

    auto runs = detail::run_restarts(opts, [&](std::mt19937_64& engine) {
        std::vector<double> init(opts.k * p);
        const auto rows = detail::sample_distinct_rows(x.rows(), opts.k, engine);
        for (std::size_t l = 0; l < opts.k; ++l) {
            const auto src = x.row(rows[l]);
            std::copy(src.begin(), src.end(), init.begin() + static_cast<std::ptrdiff_t>(l * p));
        }
        return std::pair{FullOps(view, opts.k), std::move(init)};
    });

    const std::size_t best = detail::best_restart(runs);
    auto& win = runs[best]->outcome;

    FitResult result;
    result.centers = CenterMatrix(opts.k, p, std::move(win.centers));
    result.assignment = Assignment(std::move(win.labels), opts.k);
    result.loss = win.loss;
    result.iterations = win.trace.iterations;
    result.restarts_run = runs.size();
    result.best_restart = best;
    result.traces.reserve(runs.size());
    for (auto& run : runs) result.traces.push_back(std::move(run->outcome.trace));
    return result;
}

}  // namespace kmissing
