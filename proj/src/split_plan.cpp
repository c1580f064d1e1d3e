#include "bvlab/split_plan.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bvlab/rng.hpp"

namespace bvlab {

SplitPlan::SplitPlan(std::size_t n_total, std::size_t parts, std::size_t repeats,
                     std::uint64_t master_seed)
    : n_total_(n_total), parts_(parts), repeats_(repeats), master_seed_(master_seed) {
    if (parts < 2)
        throw std::invalid_argument("plan_splits: parts must be >= 2 (variance estimator "
                                    "needs at least two models per repeat)");
    if (parts > n_total)
        throw std::invalid_argument("plan_splits: parts (" + std::to_string(parts) +
                                    ") exceeds pool size (" + std::to_string(n_total) + ")");
    if (repeats < 1) throw std::invalid_argument("plan_splits: repeats must be >= 1");

    const std::size_t size = part_size();
    indices_.reserve(repeats * parts * size);
    std::vector<std::size_t> perm(n_total);
    for (std::size_t r = 0; r < repeats; ++r) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(derive_seed(master_seed, r));
        for (std::size_t i = n_total - 1; i > 0; --i)
            std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
        for (std::size_t j = 0; j < parts; ++j) {
            auto first = perm.begin() + static_cast<std::ptrdiff_t>(j * size);
            auto last = first + static_cast<std::ptrdiff_t>(size);
            std::sort(first, last);
            indices_.insert(indices_.end(), first, last);
        }
    }
}

std::span<const std::size_t> SplitPlan::part(std::size_t repeat, std::size_t part) const {
    if (repeat >= repeats_ || part >= parts_) throw std::out_of_range("SplitPlan::part");
    const std::size_t size = part_size();
    return {indices_.data() + (repeat * parts_ + part) * size, size};
}

SplitPlan plan_splits(std::size_t n_total, std::size_t parts, std::size_t repeats,
                      std::uint64_t master_seed) {
    return SplitPlan(n_total, parts, repeats, master_seed);
}

}  // namespace bvlab
