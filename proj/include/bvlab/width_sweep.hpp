#pragma once

#include <span>
#include <vector>

#include "bvlab/dataset.hpp"
#include "bvlab/ensemble.hpp"
#include "bvlab/estimators.hpp"
#include "bvlab/mlp.hpp"
#include "bvlab/split_plan.hpp"

namespace bvlab {

struct SweepOptions {
    /// Every ensemble member starts from the same initialization instead of
    /// its own draw.
    bool share_init = false;
};

struct WidthResult {
    Eigen::Index width = 0;
    DecompositionResult decomposition;
    double mean_train_loss = 0.0;  // final-epoch loss averaged over the k*N models
};

struct EnsembleOutputs {
    PredictionMatrix predictions;      // test softmax outputs of every model
    std::vector<double> final_losses;  // per model, repeat-major
};

/// Trains the k*N models of `plan` at one width (members run in parallel,
/// each single-threaded) and collects their test-set probabilities.
/// Model m = repeat * N + part uses init seed derive_seed(width_seed, 2m) and
/// batch-order seed derive_seed(width_seed, 2m + 1), where width_seed =
/// derive_seed(cfg.seed, width).
EnsembleOutputs train_ensemble(Eigen::Index width, const LabeledDataset& pool, const LabeledDataset& test,
                               const SplitPlan& plan, const TrainConfig& cfg, const SweepOptions& options = {});

/// One squared-loss decomposition per width, in the order given.
std::vector<WidthResult> width_sweep(std::span<const Eigen::Index> widths, const LabeledDataset& pool,
                                     const LabeledDataset& test, const SplitPlan& plan,
                                     const TrainConfig& cfg, const SweepOptions& options = {});

namespace reference {

EnsembleOutputs train_ensemble(Eigen::Index width, const LabeledDataset& pool, const LabeledDataset& test,
                               const SplitPlan& plan, const TrainConfig& cfg, const SweepOptions& options = {});

}  // namespace reference

namespace detail {

void check_ensemble_inputs(Eigen::Index width, const LabeledDataset& pool, const LabeledDataset& test,
                           const SplitPlan& plan);
/// Trains model `model` of the ensemble and writes its test outputs.
double train_member(std::size_t model, Eigen::Index width, const LabeledDataset& pool,
                    const LabeledDataset& test, const SplitPlan& plan, const TrainConfig& cfg,
                    const SweepOptions& options, PredictionMatrix& out);

}  // namespace detail

}  // namespace bvlab
