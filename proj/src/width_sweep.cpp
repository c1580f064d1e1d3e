#include "bvlab/width_sweep.hpp"

#include <string>

#include "bvlab/parallel.hpp"
#include "bvlab/rng.hpp"

namespace bvlab {

namespace detail {

void check_ensemble_inputs(Eigen::Index width, const LabeledDataset& pool, const LabeledDataset& test,
                           const SplitPlan& plan) {
    if (width < 1) throw std::invalid_argument("width must be >= 1");
    pool.validate();
    test.validate();
    if (plan.n_total() != pool.size())
        throw std::invalid_argument("split plan covers " + std::to_string(plan.n_total()) +
                                    " examples but the pool has " + std::to_string(pool.size()));
    if (test.size() == 0) throw std::invalid_argument("empty test set");
    if (pool.input_dim() != test.input_dim()) throw std::invalid_argument("pool/test input dimension mismatch");
}

double train_member(std::size_t model, Eigen::Index width, const LabeledDataset& pool,
                    const LabeledDataset& test, const SplitPlan& plan, const TrainConfig& cfg,
                    const SweepOptions& options, PredictionMatrix& out) {
    const std::size_t repeat = model / plan.parts(), part = model % plan.parts();
    const std::uint64_t width_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(width));
    const std::uint64_t init_seed = derive_seed(width_seed, options.share_init ? 0 : 2 * model);
    const int classes = std::max(pool.classes, test.classes);

    TrainConfig member_cfg = cfg;
    member_cfg.seed = derive_seed(width_seed, 2 * model + 1);
    const LabeledDataset train = pool.subset(plan.part(repeat, part));
    TrainResult fit = train_sgd(init_mlp(pool.input_dim(), width, classes, init_seed), train, member_cfg);

    const Eigen::MatrixXd probs = predict_proba(fit.params, test.inputs);
    for (std::size_t t = 0; t < test.size(); ++t) {
        auto dst = out.output(t, repeat, part);
        for (Eigen::Index l = 0; l < probs.rows(); ++l) dst[static_cast<std::size_t>(l)] = probs(l, static_cast<Eigen::Index>(t));
    }
    return fit.epoch_loss.back();
}

}  // namespace detail

namespace {

EnsembleShape ensemble_shape(const LabeledDataset& pool, const LabeledDataset& test, const SplitPlan& plan) {
    return {test.size(), plan.repeats(), plan.parts(),
            static_cast<std::size_t>(std::max(pool.classes, test.classes))};
}

}  // namespace

EnsembleOutputs train_ensemble(Eigen::Index width, const LabeledDataset& pool, const LabeledDataset& test,
                               const SplitPlan& plan, const TrainConfig& cfg, const SweepOptions& options) {
    detail::check_ensemble_inputs(width, pool, test, plan);
    cfg.validate();
    EnsembleOutputs out{PredictionMatrix(ensemble_shape(pool, test, plan)),
                        std::vector<double>(plan.model_count())};
    parallel_for(static_cast<std::ptrdiff_t>(plan.model_count()), [&](std::ptrdiff_t m) {
        const auto model = static_cast<std::size_t>(m);
        out.final_losses[model] = detail::train_member(model, width, pool, test, plan, cfg, options, out.predictions);
    }, true);
    return out;
}

std::vector<WidthResult> width_sweep(std::span<const Eigen::Index> widths, const LabeledDataset& pool,
                                     const LabeledDataset& test, const SplitPlan& plan,
                                     const TrainConfig& cfg, const SweepOptions& options) {
    if (widths.empty()) throw std::invalid_argument("width_sweep: no widths given");
    const auto labels = one_hot(test.labels, static_cast<int>(std::max(pool.classes, test.classes)));
    std::vector<WidthResult> results;
    results.reserve(widths.size());
    for (Eigen::Index width : widths) {
        EnsembleOutputs ensemble = [&] {
            try {
                return train_ensemble(width, pool, test, plan, cfg, options);
            } catch (const DivergenceError& e) {
                throw DivergenceError("width " + std::to_string(width) + ": " + e.what());
            }
        }();
        WidthResult r;
        r.width = width;
        r.decomposition = estimate_mse_decomposition(ensemble.predictions, labels);
        for (double loss : ensemble.final_losses) r.mean_train_loss += loss;
        r.mean_train_loss /= static_cast<double>(ensemble.final_losses.size());
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace bvlab
