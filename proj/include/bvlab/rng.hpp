#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace bvlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the index-th child stream of `master`.
///
/// seed_i = splitmix64(master ^ splitmix64(index)). Child seeds do not depend
/// on how many children are drawn, so trial sets can be extended without
/// changing existing members.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index));
}

/// Uniform integer in [0, bound) by rejection; identical on every platform.
std::size_t uniform_index(Rng& rng, std::size_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

}  // namespace bvlab
