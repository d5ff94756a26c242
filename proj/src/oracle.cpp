#include "kmissing/oracle.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "kmissing/csv.hpp"

namespace kmissing {

CenterMatrix canonicalize(const CenterMatrix& m) {
    std::vector<std::size_t> order(m.k());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = m.row(a);
        const auto rb = m.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    std::vector<double> values;
    values.reserve(m.values().size());
    for (std::size_t l : order) {
        const auto row = m.row(l);
        values.insert(values.end(), row.begin(), row.end());
    }
    return CenterMatrix(m.k(), m.cols(), std::move(values));
}

CenterMatrix estimate_reference(const GmmSpec& spec, std::size_t k, std::size_t n_large, const FitOptions& opts) {
    const auto sample = sample_gmm(spec, n_large, opts.seed.derive("reference-sample"));
    FitOptions fit = opts;
    fit.k = k;
    fit.seed = opts.seed.derive("reference-fit");
    return canonicalize(km_fit(sample.data, fit).centers);
}

ReferenceCache::ReferenceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ReferenceCache::entry_path(const GmmSpec& spec, std::size_t k, std::size_t n_large,
                                                 const FitOptions& opts) const {
    return dir_ / fmt::format("reference_{:016x}_k{}_n{}_s{:016x}.csv", spec.hash(), k, n_large, opts.seed.value());
}

CenterMatrix ReferenceCache::get_or_compute(const GmmSpec& spec, std::size_t k, std::size_t n_large,
                                            const FitOptions& opts) {
    std::lock_guard lock(mutex_);
    const auto path = entry_path(spec, k, n_large, opts);
    const auto key = path.filename().string();
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
    if (!dir_.empty() && std::filesystem::exists(path)) {
        auto cached = read_centers_csv(path);
        if (cached.k() == k && cached.cols() == spec.cols()) {
            memory_.emplace(key, cached);
            return cached;
        }
    }
    auto centers = estimate_reference(spec, k, n_large, opts);
    ++computed_;
    if (!dir_.empty()) {
        std::filesystem::create_directories(dir_);
        write_matrix_csv(path, centers.view());
    }
    memory_.emplace(key, centers);
    return centers;
}

}  // namespace kmissing
