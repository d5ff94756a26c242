#ifndef KMISSING_KPOD_HPP
#define KMISSING_KPOD_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "kmissing/kmeans.hpp"
#include "kmissing/model.hpp"

namespace kmissing {

/// (cluster, column) pair.
using Cell = std::pair<std::size_t, std::size_t>;

struct KpodFitResult {
    CenterMatrix centers;
    Assignment assignment;
    double loss = 0.0;
    std::size_t iterations = 0;
    std::size_t restarts_run = 0;
    std::size_t best_restart = 0;
    /// Cells of the winning restart that never received an observed entry
    /// and so still hold their initial value.
    std::vector<Cell> degenerate_cells;
    /// Rows with no observed entry: zero loss, label 0, excluded from means.
    std::vector<std::size_t> all_missing_rows;
    std::vector<RestartTrace> traces;
    /// Completed matrix Y of the winning restart; set by kpod_fit_imputed_form only.
    std::optional<DataMatrix> completed;
};

struct KpodAssignment {
    Assignment assignment;
    std::vector<std::size_t> all_missing_rows;
};

struct KpodUpdate {
    CenterMatrix centers;
    std::vector<Cell> degenerate_cells;
};

/// (1/n) sum_i min_l sum_j R_ij (X_ij - mu_lj)^2
double kpod_loss(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m);

KpodAssignment kpod_assign(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m);

/// Exact minimiser of the masked loss in M for a fixed assignment: per-cell
/// means of observed entries. Cells without observations keep `prev`.
KpodUpdate kpod_update(const DataMatrix& x, const MaskMatrix& r, const Assignment& a, const CenterMatrix& prev);

/// P_Omega(X) + P_Omega^c(UM): observed entries from X, the rest from each row's center.
DataMatrix complete_matrix(const DataMatrix& x, const MaskMatrix& r, const Assignment& a, const CenterMatrix& m);

/// k-POD by block-coordinate descent over (assignment, centers).
///
/// Initial centers are k distinct rows with unobserved entries replaced by
/// the observed column means. With a full mask and equal options this
/// follows km_fit's trajectory exactly.
KpodFitResult kpod_fit(const DataMatrix& x, const MaskMatrix& r, const FitOptions& opts);

/// The same estimator through the completed-matrix formulation
/// min ||Y - UM||_F^2 subject to Y agreeing with X on observed cells.
///
/// The assignment block chooses (U, Y) jointly: each row is completed with a
/// candidate center and scored by full Euclidean distance. The center block
/// alternates "fill Y from UM" and a plain Lloyd mean step on Y until the
/// centers stop moving. The loss trajectory matches kpod_fit's.
KpodFitResult kpod_fit_imputed_form(const DataMatrix& x, const MaskMatrix& r, const FitOptions& opts);

}  // namespace kmissing

#endif  // KMISSING_KPOD_HPP
