#ifndef KMISSING_TESTS_GENERATORS_HPP
#define KMISSING_TESTS_GENERATORS_HPP

// Hand-rolled random instance generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "kmissing/model.hpp"

namespace kmissing::testing {

inline DataMatrix random_data(std::size_t n, std::size_t p, std::mt19937_64& rng, double scale = 3.0) {
    std::normal_distribution<double> z(0.0, scale);
    std::vector<double> v(n * p);
    for (auto& x : v) x = z(rng);
    return DataMatrix(n, p, std::move(v));
}

inline CenterMatrix random_centers(std::size_t k, std::size_t p, std::mt19937_64& rng, double scale = 3.0) {
    std::normal_distribution<double> z(0.0, scale);
    std::vector<double> v(k * p);
    for (auto& x : v) x = z(rng);
    return CenterMatrix(k, p, std::move(v));
}

/// Independent Bernoulli(q) entries; q drawn per column from [q_lo, 1].
inline MaskMatrix random_mask(std::size_t n, std::size_t p, std::mt19937_64& rng, double q_lo = 0.3) {
    std::uniform_real_distribution<double> uq(q_lo, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> q(p);
    for (auto& v : q) v = uq(rng);
    std::vector<std::uint8_t> bits(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) bits[i * p + j] = u(rng) < q[j] ? 1 : 0;
    }
    return MaskMatrix(n, p, std::move(bits));
}

/// Copy of x with every masked entry replaced by an arbitrary finite value.
inline DataMatrix scramble_placeholders(const DataMatrix& x, const MaskMatrix& r, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<double> v = x.values();
    for (std::size_t c = 0; c < v.size(); ++c) {
        if (!r.bits()[c]) v[c] = u(rng);
    }
    return DataMatrix(x.rows(), x.cols(), std::move(v));
}

}  // namespace kmissing::testing

#endif  // KMISSING_TESTS_GENERATORS_HPP
