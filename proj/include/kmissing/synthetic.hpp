#ifndef KMISSING_SYNTHETIC_HPP
#define KMISSING_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kmissing/missing.hpp"
#include "kmissing/model.hpp"
#include "kmissing/rng.hpp"

namespace kmissing {

/// Gaussian mixture sum_l pi_l N(mu_l, Sigma_l).
class GmmSpec {
public:
    /// `covariances` holds k row-major p×p blocks; an empty vector means
    /// identity for every component. Weights must be positive and sum to 1
    /// (within 1e-9); covariances must be symmetric positive-definite.
    GmmSpec(std::vector<double> weights, CenterMatrix means, std::vector<double> covariances = {});

    std::size_t k() const { return weights_.size(); }
    std::size_t cols() const { return means_.cols(); }
    const std::vector<double>& weights() const { return weights_; }
    const CenterMatrix& means() const { return means_; }
    bool identity_covariance() const { return cholesky_.empty(); }
    /// Row-major p×p covariance of component l.
    std::vector<double> covariance(std::size_t l) const;

    /// Lower Cholesky factor of Sigma_l (row-major); empty for identity covariance.
    std::span<const double> cholesky_factor(std::size_t l) const;

    /// Stable content hash (weights, means, covariances).
    std::uint64_t hash() const;

private:
    std::vector<double> weights_;
    CenterMatrix means_;
    std::vector<double> covariances_;
    std::vector<double> cholesky_;  // lower factors, k blocks of p×p
};

struct GmmSample {
    DataMatrix data;
    std::vector<int> labels;  // latent component per row
};

/// Each row: component from pi, then mu_l + L_l z with z standard normal.
GmmSample sample_gmm(const GmmSpec& spec, std::size_t n, Seed seed);

enum class PresetName { intro, a, b, s1, s2, s3 };

struct Preset {
    PresetName name;
    GmmSpec gmm;
    McarSpec mcar;
    std::size_t n;
    std::size_t k;
};

/// Simulation settings. s1/s2/s3 carry a 10% missing rate by default;
/// experiments override it per run.
Preset preset(PresetName name);

/// Parses "intro", "a", "b", "s1", "s2", "s3" (also "1", "2", "3").
PresetName parse_preset_name(std::string_view text);
std::string to_string(PresetName name);

}  // namespace kmissing

#endif  // KMISSING_SYNTHETIC_HPP
