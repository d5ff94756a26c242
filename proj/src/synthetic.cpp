#include "kmissing/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <fmt/format.h>

namespace kmissing {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

GmmSpec::GmmSpec(std::vector<double> weights, CenterMatrix means, std::vector<double> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
    const std::size_t k = means_.k();
    const std::size_t p = means_.cols();
    if (weights_.size() != k) {
        throw std::invalid_argument(fmt::format("GmmSpec: {} weights for {} components", weights_.size(), k));
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw std::invalid_argument("GmmSpec: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument(fmt::format("GmmSpec: weights sum to {}, not 1", total));
    }
    if (covariances_.empty()) return;
    if (covariances_.size() != k * p * p) {
        throw std::invalid_argument(fmt::format("GmmSpec: expected {} covariance entries, got {}", k * p * p,
                                                covariances_.size()));
    }
    cholesky_.resize(k * p * p);
    for (std::size_t l = 0; l < k; ++l) {
        Eigen::Map<const RowMajor> sigma(covariances_.data() + l * p * p, static_cast<Eigen::Index>(p),
                                         static_cast<Eigen::Index>(p));
        if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
            throw std::invalid_argument(fmt::format("GmmSpec: covariance {} is not symmetric", l));
        }
        Eigen::LLT<RowMajor> llt(sigma);
        if (llt.info() != Eigen::Success) {
            throw std::invalid_argument(fmt::format("GmmSpec: covariance {} is not positive-definite", l));
        }
        Eigen::Map<RowMajor> factor(cholesky_.data() + l * p * p, static_cast<Eigen::Index>(p),
                                    static_cast<Eigen::Index>(p));
        factor = llt.matrixL();
    }
}

std::vector<double> GmmSpec::covariance(std::size_t l) const {
    const std::size_t p = cols();
    if (covariances_.empty()) {
        std::vector<double> eye(p * p, 0.0);
        for (std::size_t j = 0; j < p; ++j) eye[j * p + j] = 1.0;
        return eye;
    }
    return {covariances_.begin() + static_cast<std::ptrdiff_t>(l * p * p),
            covariances_.begin() + static_cast<std::ptrdiff_t>((l + 1) * p * p)};
}

std::uint64_t GmmSpec::hash() const {
    std::uint64_t h = hash_bytes(weights_.data(), weights_.size() * sizeof(double));
    h = hash_bytes(means_.values().data(), means_.values().size() * sizeof(double), h);
    const std::uint64_t dims[2] = {means_.k(), means_.cols()};
    h = hash_bytes(dims, sizeof dims, h);
    if (!covariances_.empty()) h = hash_bytes(covariances_.data(), covariances_.size() * sizeof(double), h);
    return h;
}

std::span<const double> GmmSpec::cholesky_factor(std::size_t l) const {
    if (cholesky_.empty()) return {};
    const std::size_t pp = cols() * cols();
    return std::span<const double>(cholesky_).subspan(l * pp, pp);
}

GmmSample sample_gmm(const GmmSpec& spec, std::size_t n, Seed seed) {
    if (n == 0) throw std::invalid_argument("sample_gmm: n must be at least 1");
    const std::size_t p = spec.cols();
    auto engine = seed.engine();
    std::discrete_distribution<int> component(spec.weights().begin(), spec.weights().end());
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> values(n * p);
    std::vector<int> labels(n);
    std::vector<double> z(p);
    const auto& means = spec.means();
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = static_cast<std::size_t>(component(engine));
        labels[i] = static_cast<int>(l);
        for (std::size_t j = 0; j < p; ++j) z[j] = normal(engine);
        double* row = values.data() + i * p;
        const auto factor = spec.cholesky_factor(l);
        for (std::size_t j = 0; j < p; ++j) {
            double v = means(l, j);
            if (factor.empty()) {
                v += z[j];
            } else {
                for (std::size_t t = 0; t <= j; ++t) v += factor[j * p + t] * z[t];
            }
            row[j] = v;
        }
    }
    return {DataMatrix(n, p, std::move(values)), std::move(labels)};
}

namespace {

// Equilateral triangle with side 3 in the first two coordinates.
CenterMatrix triangle_means(std::size_t p) {
    std::vector<double> values(3 * p, 0.0);
    values[1 * p + 0] = 3.0;
    values[2 * p + 0] = 1.5;
    values[2 * p + 1] = std::sqrt(6.75);
    return CenterMatrix(3, p, std::move(values));
}

GmmSpec triangle_mixture(std::size_t p) {
    return GmmSpec(std::vector<double>(3, 1.0 / 3.0), triangle_means(p));
}

}  // namespace

Preset preset(PresetName name) {
    switch (name) {
        case PresetName::intro: {
            // Two unit-variance components mirrored across the y-axis.
            GmmSpec gmm({0.5, 0.5}, CenterMatrix(2, 2, {-2.0, 0.0, 2.0, 0.0}));
            return {name, std::move(gmm), McarSpec({1.0 / 3.0, 2.0 / 3.0}), 10000, 2};
        }
        case PresetName::a:
            return {name, triangle_mixture(2), McarSpec({2.0 / 3.0, 2.0 / 3.0}), 10000, 3};
        case PresetName::b:
            return {name, triangle_mixture(5), McarSpec(std::vector<double>(5, 2.0 / 3.0)), 10000, 3};
        case PresetName::s1:
            return {name, triangle_mixture(2), McarSpec::uniform_rate(2, 0.1), 3000, 3};
        case PresetName::s2:
            return {name, triangle_mixture(5), McarSpec::uniform_rate(5, 0.1), 5000, 3};
        case PresetName::s3:
            return {name, triangle_mixture(50), McarSpec::uniform_rate(50, 0.1), 10000, 3};
    }
    throw std::invalid_argument("unknown preset");
}

PresetName parse_preset_name(std::string_view text) {
    if (text == "intro") return PresetName::intro;
    if (text == "a") return PresetName::a;
    if (text == "b") return PresetName::b;
    if (text == "s1" || text == "1") return PresetName::s1;
    if (text == "s2" || text == "2") return PresetName::s2;
    if (text == "s3" || text == "3") return PresetName::s3;
    throw std::invalid_argument(fmt::format("unknown preset '{}'", text));
}

std::string to_string(PresetName name) {
    switch (name) {
        case PresetName::intro: return "intro";
        case PresetName::a: return "a";
        case PresetName::b: return "b";
        case PresetName::s1: return "s1";
        case PresetName::s2: return "s2";
        case PresetName::s3: return "s3";
    }
    return "unknown";
}

}  // namespace kmissing
