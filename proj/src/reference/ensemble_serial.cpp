#include "bvlab/width_sweep.hpp"

namespace bvlab::reference {

EnsembleOutputs train_ensemble(Eigen::Index width, const LabeledDataset& pool, const LabeledDataset& test,
                               const SplitPlan& plan, const TrainConfig& cfg, const SweepOptions& options) {
    detail::check_ensemble_inputs(width, pool, test, plan);
    cfg.validate();
    EnsembleOutputs out{PredictionMatrix({test.size(), plan.repeats(), plan.parts(),
                                          static_cast<std::size_t>(std::max(pool.classes, test.classes))}),
                        std::vector<double>(plan.model_count())};
    for (std::size_t m = 0; m < plan.model_count(); ++m)
        out.final_losses[m] = detail::train_member(m, width, pool, test, plan, cfg, options, out.predictions);
    return out;
}

}  // namespace bvlab::reference
