#include "kmissing/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "kmissing/kpod.hpp"

namespace kmissing {

namespace {

void require_cols(const CenterMatrix& a, const CenterMatrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError(fmt::format("center matrices have {} and {} columns", a.cols(), b.cols()));
    }
}

double nearest_sq_dist(std::span<const double> x, const CenterMatrix& m) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < m.k(); ++l) best = std::min(best, sq_dist(x, m.row(l)));
    return best;
}

MonteCarloEstimate summarize(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

constexpr std::size_t kShardDraws = 4096;

/// Runs `body(shard_seed, first, count)` for every shard; bodies write disjoint ranges.
template <class Body>
void for_each_shard(std::size_t n_mc, Seed seed, Body body) {
    const std::size_t shards = (n_mc + kShardDraws - 1) / kShardDraws;
    const auto count = static_cast<std::int64_t>(shards);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ss = 0; ss < count; ++ss) {
        const auto s = static_cast<std::size_t>(ss);
        const std::size_t first = s * kShardDraws;
        body(seed.derive("mc-shard").derive(static_cast<std::uint64_t>(s)), first,
             std::min(kShardDraws, n_mc - first));
    }
}

}  // namespace

double mse_centers(const CenterMatrix& estimate, const CenterMatrix& reference) {
    require_cols(estimate, reference);
    double total = 0.0;
    for (std::size_t l = 0; l < estimate.k(); ++l) total += nearest_sq_dist(estimate.row(l), reference);
    return total;
}

double mse_centers_bijective(const CenterMatrix& estimate, const CenterMatrix& reference) {
    require_cols(estimate, reference);
    if (estimate.k() != reference.k()) throw DimensionError("bijective MSE needs equal k");
    if (estimate.k() > 9) throw std::invalid_argument("bijective MSE enumerates permutations; k <= 9");
    std::vector<std::size_t> perm(estimate.k());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t l = 0; l < perm.size(); ++l) total += sq_dist(estimate.row(l), reference.row(perm[l]));
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double DecompositionReport::tolerance() const { return kDecompositionRelTol * (1.0 + std::abs(lhs)); }

std::string DecompositionReport::to_text() const {
    std::string text = fmt::format("lhs       {:.17g}\nrhs       {:.17g}\nabs_diff  {:.3e} (tolerance {:.3e}) {}\n",
                                   lhs, rhs, abs_diff, tolerance(), holds() ? "OK" : "VIOLATED");
    text += fmt::format("patterns  {}\n", per_pattern.size());
    for (const auto& t : per_pattern) {
        std::string bits;
        for (auto b : pattern_bits(t.pattern, cols)) bits += b ? '1' : '0';
        text += fmt::format("  r={}  rows={}  weight={:.6f}  loss={:.10g}\n", bits, t.rows, t.weight,
                            t.restricted_loss);
    }
    return text;
}

void DecompositionReport::write_csv(std::ostream& out) const {
    out << "pattern,rows,weight,restricted_loss\n";
    for (const auto& t : per_pattern) {
        std::string bits;
        for (auto b : pattern_bits(t.pattern, cols)) bits += b ? '1' : '0';
        out << fmt::format("{},{},{},{}\n", bits, t.rows, t.weight, t.restricted_loss);
    }
    out << fmt::format("lhs,,,{}\nrhs,,,{}\nabs_diff,,,{}\n", lhs, rhs, abs_diff);
}

DecompositionReport decomposition_check(const DataMatrix& x, const MaskMatrix& r, const CenterMatrix& m) {
    require_same_shape(x, r);
    if (x.cols() != m.cols()) throw DimensionError("decomposition_check: centers have the wrong column count");
    DecompositionReport report;
    report.cols = x.cols();
    report.lhs = kpod_loss(x, r, m);
    if (x.empty()) return report;

    const auto n = static_cast<double>(x.rows());
    for (const auto& [key, rows] : group_patterns(r)) {
        std::vector<std::size_t> observed;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if ((key >> j) & 1U) observed.push_back(j);
        }
        const std::size_t q = observed.size();

        double restricted = 0.0;
        if (q > 0) {
            std::vector<double> sub_centers(m.k() * q);
            for (std::size_t l = 0; l < m.k(); ++l) {
                for (std::size_t t = 0; t < q; ++t) sub_centers[l * q + t] = m(l, observed[t]);
            }
            const CenterMatrix restricted_m(m.k(), q, std::move(sub_centers));
            std::vector<double> sub_row(q);
            double sum = 0.0;
            for (std::size_t i : rows) {
                for (std::size_t t = 0; t < q; ++t) sub_row[t] = x(i, observed[t]);
                sum += nearest_sq_dist(sub_row, restricted_m);
            }
            restricted = sum / static_cast<double>(rows.size());
        }
        const double weight = static_cast<double>(rows.size()) / n;
        report.per_pattern.push_back({key, rows.size(), weight, restricted});
        report.rhs += weight * restricted;
    }
    report.abs_diff = std::abs(report.lhs - report.rhs);
    return report;
}

ExpectedLoss mc_expected_loss(const GmmSpec& spec, const McarSpec& q, const CenterMatrix& m, std::size_t n_mc,
                              Seed seed) {
    if (n_mc < 2) throw std::invalid_argument("mc_expected_loss: need at least 2 draws");
    if (spec.cols() != q.cols() || spec.cols() != m.cols()) throw DimensionError("mc_expected_loss: column mismatch");

    std::vector<double> km(n_mc), kp(n_mc), gap(n_mc);
    for_each_shard(n_mc, seed, [&](Seed shard, std::size_t first, std::size_t count) {
        const auto sample = sample_gmm(spec, count, shard.derive("x"));
        const auto mask = gen_mask(count, q, shard.derive("r"));
        for (std::size_t i = 0; i < count; ++i) {
            double best_km = std::numeric_limits<double>::infinity();
            double best_kp = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < m.k(); ++l) {
                best_km = std::min(best_km, sq_dist(sample.data.row(i), m.row(l)));
                best_kp = std::min(best_kp, masked_sq_dist(sample.data.row(i), mask.row(i), m.row(l)));
            }
            km[first + i] = best_km;
            kp[first + i] = best_kp;
            gap[first + i] = best_km - best_kp;
        }
    });
    return {summarize(km), summarize(kp), summarize(gap), *std::min_element(gap.begin(), gap.end()), n_mc};
}

DecompositionEstimate mc_decomposition(const GmmSpec& spec, const McarSpec& q, const CenterMatrix& m,
                                       std::size_t n_mc, Seed seed) {
    if (n_mc < 2) throw std::invalid_argument("mc_decomposition: need at least 2 draws");
    const std::size_t p = spec.cols();
    if (q.cols() != p || m.cols() != p) throw DimensionError("mc_decomposition: column mismatch");
    if (p > 16) throw std::invalid_argument("mc_decomposition enumerates 2^p patterns; p <= 16");

    const std::size_t patterns = std::size_t{1} << p;
    std::vector<double> pattern_prob(patterns);
    for (std::size_t key = 0; key < patterns; ++key) pattern_prob[key] = q.pattern_probability(key);

    std::vector<double> kp(n_mc), weighted(n_mc), diff(n_mc);
    for_each_shard(n_mc, seed, [&](Seed shard, std::size_t first, std::size_t count) {
        const auto sample = sample_gmm(spec, count, shard.derive("x"));
        const auto mask = gen_mask(count, q, shard.derive("r"));
        std::vector<std::uint8_t> bits(p);
        for (std::size_t i = 0; i < count; ++i) {
            const auto x = sample.data.row(i);
            double sum = 0.0;
            for (std::size_t key = 0; key < patterns; ++key) {
                for (std::size_t j = 0; j < p; ++j) bits[j] = (key >> j) & 1U;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t l = 0; l < m.k(); ++l) best = std::min(best, masked_sq_dist(x, bits, m.row(l)));
                sum += pattern_prob[key] * best;
            }
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < m.k(); ++l) best = std::min(best, masked_sq_dist(x, mask.row(i), m.row(l)));
            kp[first + i] = best;
            weighted[first + i] = sum;
            diff[first + i] = best - sum;
        }
    });
    return {summarize(kp), summarize(weighted), summarize(diff), n_mc};
}

}  // namespace kmissing
