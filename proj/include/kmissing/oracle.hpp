#ifndef KMISSING_ORACLE_HPP
#define KMISSING_ORACLE_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <mutex>
#include <optional>

#include "kmissing/kmeans.hpp"
#include "kmissing/synthetic.hpp"

namespace kmissing {

constexpr std::size_t kDefaultReferenceSize = 100000;

/// Stand-in for the population k-means centers: km_fit on a fresh sample of
/// size n_large drawn with opts.seed. Rows come back sorted lexicographically.
CenterMatrix estimate_reference(const GmmSpec& spec, std::size_t k, std::size_t n_large, const FitOptions& opts);

/// Rows sorted lexicographically.
CenterMatrix canonicalize(const CenterMatrix& m);

/// CSV-backed cache of reference centers keyed by
/// (spec hash, k, n_large, seed). Lookups and inserts are serialized.
class ReferenceCache {
public:
    /// An empty path keeps the cache in memory only.
    explicit ReferenceCache(std::filesystem::path dir = {});

    CenterMatrix get_or_compute(const GmmSpec& spec, std::size_t k, std::size_t n_large, const FitOptions& opts);

    std::filesystem::path entry_path(const GmmSpec& spec, std::size_t k, std::size_t n_large,
                                     const FitOptions& opts) const;

    std::size_t computed() const { return computed_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, CenterMatrix> memory_;
    std::mutex mutex_;
    std::size_t computed_ = 0;
};

}  // namespace kmissing

#endif  // KMISSING_ORACLE_HPP
