#include "bvlab/rng.hpp"
#include "bvlab/twolayer.hpp"

namespace bvlab::reference {

BiasVariance mc_bias_variance(const ModelDims& dims, std::span<const std::uint64_t> trial_seeds) {
    dims.validate();
    if (trial_seeds.size() < 2) throw std::invalid_argument("mc_bias_variance: need at least 2 trials");
    detail::MomentAccumulator acc(dims.d);
    for (std::uint64_t seed : trial_seeds) acc.add(detail::trial_m_matrix(dims, seed));
    return acc.result();
}

double mc_risk_mtilde(Eigen::Index d, Eigen::Index p, double lambda0, std::size_t trials,
                      std::uint64_t master_seed) {
    if (trials < 1) throw std::invalid_argument("mc_risk_mtilde: need at least 1 trial");
    double total = 0.0;
    for (std::size_t t = 0; t < trials; ++t)
        total += mtilde_risk_sample(d, p, lambda0, derive_seed(master_seed, t));
    return total / static_cast<double>(trials);
}

}  // namespace bvlab::reference
