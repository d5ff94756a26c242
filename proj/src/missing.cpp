#include "kmissing/missing.hpp"

#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace kmissing {

McarSpec::McarSpec(std::vector<double> q) : q_(std::move(q)) {
    if (q_.empty()) throw std::invalid_argument("McarSpec: need at least one column");
    for (std::size_t j = 0; j < q_.size(); ++j) {
        if (!(q_[j] > 0.0 && q_[j] <= 1.0)) {
            throw std::invalid_argument(fmt::format("McarSpec: q[{}] = {} is outside (0, 1]", j, q_[j]));
        }
    }
}

McarSpec McarSpec::uniform_rate(std::size_t p, double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw std::invalid_argument(fmt::format("missing rate {} is outside [0, 1)", rate));
    }
    return McarSpec(std::vector<double>(p, 1.0 - rate));
}

double McarSpec::complete_probability() const {
    double prob = 1.0;
    for (double q : q_) prob *= q;
    return prob;
}

double McarSpec::pattern_probability(std::uint64_t bits) const {
    double prob = 1.0;
    for (std::size_t j = 0; j < q_.size(); ++j) {
        prob *= ((bits >> j) & 1U) ? q_[j] : 1.0 - q_[j];
    }
    return prob;
}

MaskMatrix gen_mask(std::size_t n, const McarSpec& spec, Seed seed) {
    if (n == 0) throw std::invalid_argument("gen_mask: n must be at least 1");
    const std::size_t p = spec.cols();
    std::vector<std::uint8_t> bits(n * p);
    // One stream per column so column j does not depend on the other q's.
    for (std::size_t j = 0; j < p; ++j) {
        auto engine = seed.derive("mcar-column").derive(static_cast<std::uint64_t>(j)).engine();
        std::bernoulli_distribution observed(spec.q()[j]);
        for (std::size_t i = 0; i < n; ++i) bits[i * p + j] = observed(engine) ? 1 : 0;
    }
    return MaskMatrix(n, p, std::move(bits));
}

std::size_t complete_case_count(const MaskMatrix& r) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < r.rows(); ++i) count += r.row_complete(i) ? 1 : 0;
    return count;
}

DataMatrix complete_cases(const DataMatrix& x, const MaskMatrix& r) {
    require_same_shape(x, r);
    std::vector<double> values;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (!r.row_complete(i)) continue;
        const auto src = x.row(i);
        values.insert(values.end(), src.begin(), src.end());
        ++rows;
    }
    return DataMatrix(rows, x.cols(), std::move(values));
}

PatternKey pattern_key(std::span<const std::uint8_t> row) {
    if (row.size() > kMaxPatternCols) {
        throw std::invalid_argument(fmt::format("pattern keys support at most {} columns", kMaxPatternCols));
    }
    PatternKey key = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j]) key |= PatternKey{1} << j;
    }
    return key;
}

std::vector<std::uint8_t> pattern_bits(PatternKey key, std::size_t p) {
    std::vector<std::uint8_t> bits(p);
    for (std::size_t j = 0; j < p; ++j) bits[j] = (key >> j) & 1U;
    return bits;
}

std::map<PatternKey, std::vector<std::size_t>> group_patterns(const MaskMatrix& r) {
    if (r.cols() > kMaxPatternCols) {
        throw std::invalid_argument(fmt::format("group_patterns: p = {} exceeds {}", r.cols(), kMaxPatternCols));
    }
    std::map<PatternKey, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < r.rows(); ++i) groups[pattern_key(r.row(i))].push_back(i);
    return groups;
}

}  // namespace kmissing
