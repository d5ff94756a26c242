#ifndef KMISSING_TESTS_BRUTE_FORCE_HPP
#define KMISSING_TESTS_BRUTE_FORCE_HPP

// Test-only exhaustive oracle. Deliberately shares no code with the library.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace kmissing::testing {

struct BruteForceResult {
    double loss = std::numeric_limits<double>::infinity();
    std::vector<int> labels;
};

/// Minimises (1/n) sum_i sum_j r_ij (x_ij - mu_{a_i j})^2 over every label
/// vector in {0..k-1}^n, with mu the per-cell mean of observed entries. The
/// minimum over (U, M) of the k-POD loss equals this minimum over U alone.
/// Pass an all-ones mask for plain k-means.
inline BruteForceResult brute_force_masked(const std::vector<double>& x, const std::vector<std::uint8_t>& r,
                                           std::size_t n, std::size_t p, std::size_t k) {
    BruteForceResult best;
    std::vector<int> labels(n, 0);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= k;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<int>(c % k);
            c /= k;
        }
        std::vector<long double> sum(k * p, 0.0L);
        std::vector<std::size_t> cnt(k * p, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                if (r[i * p + j]) {
                    sum[static_cast<std::size_t>(labels[i]) * p + j] += x[i * p + j];
                    ++cnt[static_cast<std::size_t>(labels[i]) * p + j];
                }
            }
        }
        long double loss = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                if (!r[i * p + j]) continue;
                const std::size_t cell = static_cast<std::size_t>(labels[i]) * p + j;
                const long double d = x[i * p + j] - sum[cell] / static_cast<long double>(cnt[cell]);
                loss += d * d;
            }
        }
        const double value = static_cast<double>(loss / static_cast<long double>(n));
        if (value < best.loss) {
            best.loss = value;
            best.labels = labels;
        }
    }
    return best;
}

}  // namespace kmissing::testing

#endif  // KMISSING_TESTS_BRUTE_FORCE_HPP
