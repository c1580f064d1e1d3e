#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bvlab {

/// Disjoint partitions of a training pool, repeated with independent shuffles.
///
/// Repeat i permutes [0, n_total) with a stream seeded by
/// derive_seed(master_seed, i) and cuts the first parts * part_size indices
/// into consecutive blocks. The n_total % parts leftover examples are dropped
/// so that every model trains on the same number of examples.
class SplitPlan {
public:
    SplitPlan(std::size_t n_total, std::size_t parts, std::size_t repeats,
              std::uint64_t master_seed);

    std::size_t n_total() const { return n_total_; }
    std::size_t parts() const { return parts_; }
    std::size_t repeats() const { return repeats_; }
    std::uint64_t master_seed() const { return master_seed_; }
    std::size_t part_size() const { return n_total_ / parts_; }
    std::size_t model_count() const { return parts_ * repeats_; }

    /// Training indices of part `part` in repeat `repeat`, sorted ascending.
    std::span<const std::size_t> part(std::size_t repeat, std::size_t part) const;

    bool operator==(const SplitPlan&) const = default;

private:
    std::size_t n_total_;
    std::size_t parts_;
    std::size_t repeats_;
    std::uint64_t master_seed_;
    std::vector<std::size_t> indices_;  // repeats x parts x part_size
};

SplitPlan plan_splits(std::size_t n_total, std::size_t parts, std::size_t repeats,
                      std::uint64_t master_seed);

}  // namespace bvlab
