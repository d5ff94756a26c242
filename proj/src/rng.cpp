#include "kmissing/rng.hpp"

namespace kmissing {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t basis) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = basis;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

Seed Seed::derive(std::string_view label) const {
    // 0x01 separates label-derived streams from index-derived ones.
    const std::uint64_t h = hash_bytes(label.data(), label.size(), mix64(value_) ^ 0x01);
    return Seed(h);
}

Seed Seed::derive(std::uint64_t index) const {
    const std::uint64_t h = hash_bytes(&index, sizeof index, mix64(value_) ^ 0x02);
    return Seed(h);
}

}  // namespace kmissing
