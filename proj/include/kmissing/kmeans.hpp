#ifndef KMISSING_KMEANS_HPP
#define KMISSING_KMEANS_HPP

#include <cstddef>
#include <vector>

#include "kmissing/model.hpp"
#include "kmissing/rng.hpp"

namespace kmissing {

struct FitOptions {
    std::size_t k = 1;
    std::size_t restarts = 30;
    std::size_t max_iters = 200;
    double rel_tol = 1e-8;
    Seed seed{0};
};

/// Throws std::invalid_argument for bad options and InsufficientDataError when k > rows.
void validate_fit_options(const FitOptions& opts, std::size_t rows);

enum class StopReason { fixed_point, small_decrease, max_iters };

const char* to_string(StopReason reason);

/// What one restart did: the loss after initial assignment followed by the
/// loss after every (update, assign) iteration.
struct RestartTrace {
    std::vector<double> losses;
    /// 1-based iterations in which an empty cluster was re-seeded. The descent
    /// guarantee is not asserted across these iterations.
    std::vector<std::size_t> repair_iterations;
    StopReason stop = StopReason::max_iters;
    std::size_t iterations = 0;
};

struct FitResult {
    CenterMatrix centers;
    Assignment assignment;
    double loss = 0.0;
    std::size_t iterations = 0;
    std::size_t restarts_run = 0;
    std::size_t best_restart = 0;
    std::vector<RestartTrace> traces;
};

/// Mean over rows of the squared distance to the nearest center.
double km_loss(const DataMatrix& x, const CenterMatrix& m);

/// Nearest center per row, ties to the lowest index.
Assignment km_assign(const DataMatrix& x, const CenterMatrix& m);

/// Lloyd mean step. Empty clusters keep their row from `prev`.
CenterMatrix km_update(const DataMatrix& x, const Assignment& a, std::size_t k, const CenterMatrix& prev);

/// Best-of-restarts Lloyd k-means.
///
/// Each restart seeds k distinct rows sampled uniformly, then alternates
/// assignment and mean updates until the assignment stops changing, the
/// relative loss decrease drops below `rel_tol`, or `max_iters` is reached.
/// An update leaving a cluster empty moves that center onto the row with the
/// largest current point loss. Restarts run concurrently with per-restart
/// child seeds; the lowest loss wins, ties to the lowest restart index.
FitResult km_fit(const DataMatrix& x, const FitOptions& opts);

}  // namespace kmissing

#endif  // KMISSING_KMEANS_HPP
