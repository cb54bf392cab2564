#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace jamslice {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// One master seed fans out into named, mutually independent streams, so
/// adding a new consumer never shifts the draws of an existing one.
class SeedTree {
public:
    explicit SeedTree(std::uint64_t master) : master_(master) {}

    std::uint64_t master() const { return master_; }

    std::uint64_t derive(std::string_view name, std::uint64_t index = 0) const {
        return mix64(mix64(master_ ^ hash_name(name)) + index);
    }

    Rng stream(std::string_view name, std::uint64_t index = 0) const {
        return Rng(derive(name, index));
    }

private:
    std::uint64_t master_;
};

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace jamslice
