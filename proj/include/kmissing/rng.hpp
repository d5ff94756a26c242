#ifndef KMISSING_RNG_HPP
#define KMISSING_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace kmissing {

/// Deterministic seed with hierarchical stream derivation.
///
/// A child seed is a stable hash of the parent value and a context label, so
/// the same chain of labels always reproduces the same random stream no
/// matter how work is scheduled across threads.
class Seed {
public:
    constexpr Seed() = default;
    constexpr explicit Seed(std::uint64_t value) : value_(value) {}

    constexpr std::uint64_t value() const { return value_; }

    Seed derive(std::string_view label) const;
    Seed derive(std::uint64_t index) const;

    std::mt19937_64 engine() const { return std::mt19937_64(value_); }

    friend constexpr bool operator==(Seed, Seed) = default;

private:
    std::uint64_t value_ = 0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over raw bytes, then mixed.
std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace kmissing

#endif  // KMISSING_RNG_HPP
