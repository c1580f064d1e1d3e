#include "bvlab/estimators.hpp"

namespace bvlab::reference {

DecompositionResult estimate_mse_decomposition(const PredictionMatrix& preds,
                                               std::span<const double> labels) {
    detail::check_mse_inputs(preds, labels);
    const auto& s = preds.shape();
    std::vector<PointDecomposition> per_point;
    per_point.reserve(s.test_count);
    for (std::size_t t = 0; t < s.test_count; ++t)
        per_point.push_back(detail::mse_point(preds.point(t), s, labels.subspan(t * s.dim, s.dim)));
    return detail::aggregate(LossKind::squared, std::move(per_point));
}

DecompositionResult estimate_kl_decomposition(const ProbabilityEnsemble& probs,
                                              std::span<const int> class_labels) {
    detail::check_kl_inputs(probs, class_labels);
    const auto& s = probs.shape();
    std::vector<PointDecomposition> per_point;
    per_point.reserve(s.test_count);
    for (std::size_t t = 0; t < s.test_count; ++t)
        per_point.push_back(detail::kl_point(probs.point(t), s, class_labels[t]));
    return detail::aggregate(LossKind::kl, std::move(per_point));
}

}  // namespace bvlab::reference
