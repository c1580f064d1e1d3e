#include "bvlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bvlab/parallel.hpp"

namespace bvlab {

std::string_view to_string(LossKind kind) {
    return kind == LossKind::squared ? "squared" : "kl";
}

double ordered_sum(std::span<double> terms) {
    std::sort(terms.begin(), terms.end());
    double total = 0.0;
    for (double t : terms) total += t;
    return total;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
    double total = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l)
        if (p[l] > 0.0) total += p[l] * (std::log(p[l]) - std::log(q[l]));
    return total;
}

std::vector<int> onehot_to_class(std::span<const double> onehot, std::size_t dim) {
    if (dim == 0 || onehot.size() % dim != 0)
        throw std::invalid_argument("onehot_to_class: label buffer is not a whole number of rows");
    std::vector<int> classes(onehot.size() / dim);
    for (std::size_t t = 0; t < classes.size(); ++t) {
        int hot = -1;
        for (std::size_t l = 0; l < dim; ++l) {
            const double v = onehot[t * dim + l];
            if (v == 1.0 && hot < 0) {
                hot = static_cast<int>(l);
            } else if (v != 0.0) {
                hot = -2;
                break;
            }
        }
        if (hot < 0)
            throw std::invalid_argument("label row " + std::to_string(t) + " is not one-hot");
        classes[t] = hot;
    }
    return classes;
}

namespace {

// Per-coordinate mean log-probability over `count` vectors, then a stable
// log-normalizer. Fills log_hat with log pi_hat.
void log_geometric_mean(std::span<const double> probs, std::size_t count, std::size_t dim,
                        std::vector<double>& log_hat) {
    std::vector<double> column(count);
    log_hat.assign(dim, 0.0);
    for (std::size_t l = 0; l < dim; ++l) {
        for (std::size_t m = 0; m < count; ++m) column[m] = std::log(probs[m * dim + l]);
        log_hat[l] = ordered_sum(column) / static_cast<double>(count);
    }
    const double top = *std::max_element(log_hat.begin(), log_hat.end());
    double z = 0.0;
    for (double g : log_hat) z += std::exp(g - top);
    const double log_z = top + std::log(z);
    for (double& g : log_hat) g -= log_z;
}

}  // namespace

std::vector<double> geometric_mean_distribution(std::span<const double> probs, std::size_t dim) {
    if (dim == 0 || probs.empty() || probs.size() % dim != 0)
        throw std::invalid_argument("geometric_mean_distribution: buffer is not a whole number of vectors");
    for (double p : probs)
        if (!(p > 0.0) || !std::isfinite(p))
            throw std::invalid_argument("geometric_mean_distribution: probabilities must be strictly "
                                        "positive (log undefined at zero)");
    std::vector<double> log_hat;
    log_geometric_mean(probs, probs.size() / dim, dim, log_hat);
    for (double& g : log_hat) g = std::exp(g);
    return log_hat;
}

namespace detail {

PointDecomposition mse_point(std::span<const double> outputs, const EnsembleShape& shape,
                             std::span<const double> label) {
    const std::size_t k = shape.repeats, n = shape.parts, c = shape.dim;
    std::vector<double> column(n), mean(c), deviation(n), miss(k * n), per_repeat(k);

    for (std::size_t i = 0; i < k; ++i) {
        const double* block = outputs.data() + i * n * c;
        for (std::size_t l = 0; l < c; ++l) {
            for (std::size_t j = 0; j < n; ++j) column[j] = block[j * c + l];
            mean[l] = ordered_sum(column) / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t l = 0; l < c; ++l) {
                const double e = block[j * c + l] - mean[l];
                sq += e * e;
            }
            deviation[j] = sq;
        }
        per_repeat[i] = ordered_sum(deviation) / static_cast<double>(n - 1);
    }
    const double variance = ordered_sum(per_repeat) / static_cast<double>(k);

    for (std::size_t m = 0; m < k * n; ++m) {
        double sq = 0.0;
        for (std::size_t l = 0; l < c; ++l) {
            const double e = label[l] - outputs[m * c + l];
            sq += e * e;
        }
        miss[m] = sq;
    }
    const double risk = ordered_sum(miss) / static_cast<double>(k * n);
    return {risk, risk - variance, variance};
}

PointDecomposition kl_point(std::span<const double> probs, const EnsembleShape& shape, int label) {
    const std::size_t models = shape.model_count(), c = shape.dim;
    std::vector<double> log_hat;
    log_geometric_mean(probs, models, c, log_hat);

    std::vector<double> spread(models), loss(models);
    for (std::size_t m = 0; m < models; ++m) {
        const double* pi = probs.data() + m * c;
        double kl = 0.0;
        for (std::size_t l = 0; l < c; ++l) kl += std::exp(log_hat[l]) * (log_hat[l] - std::log(pi[l]));
        spread[m] = kl;
        loss[m] = -std::log(pi[label]);
    }
    PointDecomposition out;
    out.variance = ordered_sum(spread) / static_cast<double>(models);
    out.risk = ordered_sum(loss) / static_cast<double>(models);
    out.bias_sq = -log_hat[static_cast<std::size_t>(label)];

    const double gap = out.risk - out.bias_sq - out.variance;
    if (std::abs(gap) > 1e-10 * std::max(1.0, out.risk))
        throw std::logic_error("KL decomposition identity violated by " + std::to_string(gap));
    return out;
}

void check_mse_inputs(const PredictionMatrix& preds, std::span<const double> labels) {
    const auto& s = preds.shape();
    if (s.parts < 2) throw std::invalid_argument("estimate_mse_decomposition: need N >= 2 parts");
    if (labels.size() != s.test_count * s.dim)
        throw std::invalid_argument("estimate_mse_decomposition: labels have " +
                                    std::to_string(labels.size()) + " entries, expected test_count * c = " +
                                    std::to_string(s.test_count * s.dim));
    for (double y : labels)
        if (!std::isfinite(y)) throw std::invalid_argument("estimate_mse_decomposition: non-finite label");
}

void check_kl_inputs(const ProbabilityEnsemble& probs, std::span<const int> class_labels) {
    const auto& s = probs.shape();
    if (class_labels.size() != s.test_count)
        throw std::invalid_argument("estimate_kl_decomposition: " + std::to_string(class_labels.size()) +
                                    " labels for " + std::to_string(s.test_count) + " test points");
    for (int y : class_labels)
        if (y < 0 || static_cast<std::size_t>(y) >= s.dim)
            throw std::invalid_argument("estimate_kl_decomposition: class label out of range");
}

DecompositionResult aggregate(LossKind loss, std::vector<PointDecomposition> per_point) {
    DecompositionResult out;
    out.loss = loss;
    for (const auto& p : per_point) {
        out.risk += p.risk;
        out.bias_sq += p.bias_sq;
        out.variance += p.variance;
    }
    const double count = static_cast<double>(per_point.size());
    out.risk /= count;
    out.bias_sq /= count;
    out.variance /= count;
    out.negative_bias = out.bias_sq < 0.0;
    out.per_point = std::move(per_point);
    return out;
}

}  // namespace detail

DecompositionResult estimate_mse_decomposition(const PredictionMatrix& preds,
                                               std::span<const double> labels) {
    detail::check_mse_inputs(preds, labels);
    const auto& s = preds.shape();
    std::vector<PointDecomposition> per_point(s.test_count);
    parallel_for(static_cast<std::ptrdiff_t>(s.test_count), [&](std::ptrdiff_t t) {
        const auto idx = static_cast<std::size_t>(t);
        per_point[idx] = detail::mse_point(preds.point(idx), s, labels.subspan(idx * s.dim, s.dim));
    });
    return detail::aggregate(LossKind::squared, std::move(per_point));
}

DecompositionResult estimate_kl_decomposition(const ProbabilityEnsemble& probs,
                                              std::span<const int> class_labels) {
    detail::check_kl_inputs(probs, class_labels);
    const auto& s = probs.shape();
    std::vector<PointDecomposition> per_point(s.test_count);
    parallel_for(static_cast<std::ptrdiff_t>(s.test_count), [&](std::ptrdiff_t t) {
        const auto idx = static_cast<std::size_t>(t);
        per_point[idx] = detail::kl_point(probs.point(idx), s, class_labels[idx]);
    });
    return detail::aggregate(LossKind::kl, std::move(per_point));
}

DecompositionResult estimate_kl_decomposition(const ProbabilityEnsemble& probs,
                                              std::span<const double> onehot_labels) {
    if (onehot_labels.size() != probs.shape().test_count * probs.shape().dim)
        throw std::invalid_argument("estimate_kl_decomposition: label dimension mismatch");
    const auto classes = onehot_to_class(onehot_labels, probs.shape().dim);
    return estimate_kl_decomposition(probs, std::span<const int>(classes));
}

}  // namespace bvlab
