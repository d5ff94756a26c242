#ifndef KMISSING_MISSING_HPP
#define KMISSING_MISSING_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "kmissing/model.hpp"
#include "kmissing/rng.hpp"

namespace kmissing {

/// Per-column observation probabilities for an MCAR mask.
class McarSpec {
public:
    /// Throws std::invalid_argument unless every q_j lies in (0, 1].
    explicit McarSpec(std::vector<double> q);

    /// Same missing rate in every column: q_j = 1 - rate, rate in [0, 1).
    static McarSpec uniform_rate(std::size_t p, double rate);

    const std::vector<double>& q() const { return q_; }
    std::size_t cols() const { return q_.size(); }

    /// P(R = 1_p) = prod_j q_j.
    double complete_probability() const;

    /// P(R = r) for the pattern packed in `bits` (bit j = column j).
    double pattern_probability(std::uint64_t bits) const;

    friend bool operator==(const McarSpec&, const McarSpec&) = default;

private:
    std::vector<double> q_;
};

/// Independent Bernoulli(q_j) entries, column j. Depends only on (n, spec, seed).
MaskMatrix gen_mask(std::size_t n, const McarSpec& spec, Seed seed);

/// Rows whose mask is all ones, in original order. May be empty.
DataMatrix complete_cases(const DataMatrix& x, const MaskMatrix& r);

std::size_t complete_case_count(const MaskMatrix& r);

/// Missingness pattern packed into 64 bits, bit j set when column j is observed.
using PatternKey = std::uint64_t;

constexpr std::size_t kMaxPatternCols = 64;

PatternKey pattern_key(std::span<const std::uint8_t> row);
std::vector<std::uint8_t> pattern_bits(PatternKey key, std::size_t p);

/// Row indices bucketed by exact pattern. Requires p <= 64.
std::map<PatternKey, std::vector<std::size_t>> group_patterns(const MaskMatrix& r);

}  // namespace kmissing

#endif  // KMISSING_MISSING_HPP
