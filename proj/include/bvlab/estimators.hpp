#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "bvlab/ensemble.hpp"

namespace bvlab {

enum class LossKind { squared, kl };

std::string_view to_string(LossKind kind);

struct PointDecomposition {
    double risk = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
};

/// Random-design bias/variance decomposition of one ensemble on a test set.
///
/// Aggregates are arithmetic means of the per-point values over the test set.
/// For squared loss bias_sq is risk - variance and may come out negative from
/// estimation noise; it is reported raw and `negative_bias` is set.
struct DecompositionResult {
    LossKind loss = LossKind::squared;
    double risk = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
    bool negative_bias = false;
    std::vector<PointDecomposition> per_point;
};

/// Squared-loss decomposition with the unbiased per-repeat variance estimator
///   v_i(x) = 1/(N-1) sum_j ||f_ij(x) - mean_j f_ij(x)||^2
/// averaged over the k repeats. Risk is the mean of ||y - f_ij(x)||^2 over all
/// k*N models. `labels` holds test_count vectors of the output dimension.
DecompositionResult estimate_mse_decomposition(const PredictionMatrix& preds,
                                               std::span<const double> labels);

/// Normalized geometric mean of `count` simplex vectors of length `dim`,
/// stored back to back. Every entry must be strictly positive.
std::vector<double> geometric_mean_distribution(std::span<const double> probs, std::size_t dim);

/// KL(p || q) = sum_l p_l log(p_l / q_l), with 0 log 0 = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Bregman (KL) decomposition for cross-entropy:
///   bias_sq  = KL(pi_0 || pi_hat)
///   variance = mean over models of KL(pi_hat || pi)
///   risk     = mean over models of KL(pi_0 || pi)
/// where pi_hat is the normalized geometric mean over all k*N models. Bias is
/// computed directly and risk = bias_sq + variance is checked per point.
/// `onehot_labels` holds test_count one-hot vectors; anything else throws.
DecompositionResult estimate_kl_decomposition(const ProbabilityEnsemble& probs,
                                              std::span<const double> onehot_labels);
DecompositionResult estimate_kl_decomposition(const ProbabilityEnsemble& probs,
                                              std::span<const int> class_labels);

/// Class index of each one-hot row; throws on rows that are not one-hot.
std::vector<int> onehot_to_class(std::span<const double> onehot, std::size_t dim);

/// Sum of `terms` after sorting them ascending (reorders the span). The result
/// does not depend on the input order.
double ordered_sum(std::span<double> terms);

namespace reference {

/// Single-threaded drivers over the same per-point kernels.
DecompositionResult estimate_mse_decomposition(const PredictionMatrix& preds,
                                               std::span<const double> labels);
DecompositionResult estimate_kl_decomposition(const ProbabilityEnsemble& probs,
                                              std::span<const int> class_labels);

}  // namespace reference

namespace detail {

PointDecomposition mse_point(std::span<const double> outputs, const EnsembleShape& shape,
                             std::span<const double> label);
PointDecomposition kl_point(std::span<const double> probs, const EnsembleShape& shape,
                            int label);
void check_mse_inputs(const PredictionMatrix& preds, std::span<const double> labels);
void check_kl_inputs(const ProbabilityEnsemble& probs, std::span<const int> class_labels);
DecompositionResult aggregate(LossKind loss, std::vector<PointDecomposition> per_point);

}  // namespace detail

}  // namespace bvlab
