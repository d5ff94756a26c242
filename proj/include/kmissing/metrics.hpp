#ifndef KMISSING_METRICS_HPP
#define KMISSING_METRICS_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kmissing/missing.hpp"
#include "kmissing/model.hpp"
#include "kmissing/rng.hpp"
#include "kmissing/synthetic.hpp"

namespace kmissing {

/// sum over estimated rows of the squared distance to the nearest reference
/// row. Rows are matched independently, so k may differ between the two.
double mse_centers(const CenterMatrix& estimate, const CenterMatrix& reference);

/// Diagnostic variant: minimum over one-to-one matchings (equal k, k <= 9).
double mse_centers_bijective(const CenterMatrix& estimate, const CenterMatrix& reference);

struct PatternTerm {
    PatternKey pattern = 0;
    std::size_t rows = 0;
    double weight = 0.0;           // rows / n
    double restricted_loss = 0.0;  // mean k-means loss on the pattern's observed columns
};

/// Empirical pattern decomposition of the k-POD loss:
/// lhs = kpod_loss(X, R, M), rhs = sum_r (n_r / n) L_n(M | r).
struct DecompositionReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_diff = 0.0;
    std::size_t cols = 0;
    std::vector<PatternTerm> per_pattern;

    double tolerance() const;  // 1e-10 * (1 + |lhs|)
    bool holds() const { return abs_diff <= tolerance(); }

    std::string to_text() const;
    void write_csv(std::ostream& out) const;
};

constexpr double kDecompositionRelTol = 1e-10;

/// Evaluates the right-hand side pattern by pattern on column-restricted
/// copies of the rows and centers, independently of the masked kernel.
DecompositionReport decomposition_check(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct ExpectedLoss {
    MonteCarloEstimate kmeans;  // E min_l |X - mu_l|^2
    MonteCarloEstimate kpod;    // E min_l sum_j R_j (X_j - mu_lj)^2
    MonteCarloEstimate gap;     // paired kmeans - kpod
    double min_gap = 0.0;       // smallest per-draw gap; never negative
    std::size_t draws = 0;
};

/// Monte-Carlo expected losses on coupled draws (X_i, R_i), sharded with
/// per-shard child seeds and reduced in shard order.
ExpectedLoss mc_expected_loss(const GmmSpec& spec, const McarSpec& q, const CenterMatrix& m, std::size_t n_mc,
                              Seed seed);

struct DecompositionEstimate {
    MonteCarloEstimate kpod;        // E min_l sum_j R_j (X_j - mu_lj)^2 with sampled R
    MonteCarloEstimate weighted;    // E sum_r P(R = r) min_l sum_j r_j (X_j - mu_lj)^2
    MonteCarloEstimate difference;  // paired kpod - weighted
    std::size_t draws = 0;
};

/// Expected-loss version of the pattern decomposition: the weighted side
/// sums exactly over all 2^p patterns per draw (p <= 16).
DecompositionEstimate mc_decomposition(const GmmSpec& spec, const McarSpec& q, const CenterMatrix& m,
                                       std::size_t n_mc, Seed seed);

}  // namespace kmissing

#endif  // KMISSING_METRICS_HPP
