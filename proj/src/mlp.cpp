#include "bvlab/mlp.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "bvlab/rng.hpp"

namespace bvlab {

Eigen::VectorXd MlpParams::flatten() const {
    Eigen::VectorXd flat(size());
    Eigen::Index at = 0;
    auto put = [&](const auto& block) {
        flat.segment(at, block.size()) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
        at += block.size();
    };
    put(W1);
    put(b1);
    put(W2);
    put(b2);
    return flat;
}

void MlpParams::assign(const Eigen::VectorXd& flat) {
    if (flat.size() != size()) throw std::invalid_argument("MlpParams::assign: size mismatch");
    Eigen::Index at = 0;
    auto take = [&](auto& block) {
        Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) = flat.segment(at, block.size());
        at += block.size();
    };
    take(W1);
    take(b1);
    take(W2);
    take(b2);
}

bool MlpParams::all_finite() const {
    return W1.allFinite() && b1.allFinite() && W2.allFinite() && b2.allFinite();
}

bool MlpParams::operator==(const MlpParams& o) const {
    return W1.rows() == o.W1.rows() && W1.cols() == o.W1.cols() && W2.rows() == o.W2.rows() &&
           W1 == o.W1 && b1 == o.b1 && W2 == o.W2 && b2 == o.b2;
}

MlpParams init_mlp(Eigen::Index d_in, Eigen::Index width, Eigen::Index classes, std::uint64_t seed) {
    if (d_in < 1 || width < 1 || classes < 1) throw std::invalid_argument("init_mlp: dims must be >= 1");
    Rng rng(seed);
    std::normal_distribution<double> first(0.0, 1.0 / std::sqrt(static_cast<double>(d_in)));
    std::normal_distribution<double> second(0.0, 1.0 / std::sqrt(static_cast<double>(width)));
    MlpParams p;
    p.W1.resize(width, d_in);
    for (Eigen::Index i = 0; i < p.W1.size(); ++i) p.W1.data()[i] = first(rng);
    p.b1 = Eigen::VectorXd::Zero(width);
    p.W2.resize(classes, width);
    for (Eigen::Index i = 0; i < p.W2.size(); ++i) p.W2.data()[i] = second(rng);
    p.b2 = Eigen::VectorXd::Zero(classes);
    return p;
}

namespace {

// Column-wise softmax, in place.
void softmax_columns(Eigen::MatrixXd& logits) {
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        auto col = logits.col(j);
        col.array() = (col.array() - col.maxCoeff()).exp();
        col /= col.sum();
    }
}

}  // namespace

Eigen::MatrixXd predict_proba(const MlpParams& params, const Eigen::MatrixXd& inputs) {
    Eigen::MatrixXd hidden = (params.W1 * inputs).colwise() + params.b1;
    hidden = hidden.cwiseMax(0.0);
    Eigen::MatrixXd logits = (params.W2 * hidden).colwise() + params.b2;
    softmax_columns(logits);
    return logits;
}

LossGradient loss_and_gradient(const MlpParams& params, const Eigen::MatrixXd& inputs,
                               std::span<const int> labels) {
    const Eigen::Index batch = inputs.cols();
    if (static_cast<std::size_t>(batch) != labels.size() || batch == 0)
        throw std::invalid_argument("loss_and_gradient: batch/label size mismatch");

    const Eigen::MatrixXd pre = (params.W1 * inputs).colwise() + params.b1;
    const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
    Eigen::MatrixXd probs = (params.W2 * hidden).colwise() + params.b2;
    softmax_columns(probs);

    Eigen::MatrixXd residual = probs;
    for (Eigen::Index j = 0; j < batch; ++j) residual(labels[static_cast<std::size_t>(j)], j) -= 1.0;
    const double inv_batch = 1.0 / static_cast<double>(batch);

    LossGradient out;
    out.loss = residual.squaredNorm() * inv_batch;

    // d loss / d logits through the softmax Jacobian diag(p) - p p^T.
    const Eigen::MatrixXd upstream = 2.0 * inv_batch * residual;
    const Eigen::RowVectorXd dot = (probs.cwiseProduct(upstream)).colwise().sum();
    const Eigen::MatrixXd d_logits = probs.cwiseProduct(upstream - dot.replicate(probs.rows(), 1));

    out.grad.W2 = d_logits * hidden.transpose();
    out.grad.b2 = d_logits.rowwise().sum();
    const Eigen::MatrixXd d_pre = (params.W2.transpose() * d_logits).cwiseProduct(
        (pre.array() > 0.0).cast<double>().matrix());
    out.grad.W1 = d_pre * inputs.transpose();
    out.grad.b1 = d_pre.rowwise().sum();
    return out;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (!(initial_lr >= 0.0)) throw std::invalid_argument("TrainConfig: initial_lr must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("TrainConfig: momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    if (!(lr_decay_factor > 1.0)) throw std::invalid_argument("TrainConfig: lr_decay_factor must be > 1");
    if (lr_decay_every < 1) throw std::invalid_argument("TrainConfig: lr_decay_every must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

double TrainConfig::learning_rate(int epoch) const {
    return initial_lr / std::pow(lr_decay_factor, epoch / lr_decay_every);
}

SgdState::SgdState(const MlpParams& like) {
    velocity.W1 = Eigen::MatrixXd::Zero(like.W1.rows(), like.W1.cols());
    velocity.b1 = Eigen::VectorXd::Zero(like.b1.size());
    velocity.W2 = Eigen::MatrixXd::Zero(like.W2.rows(), like.W2.cols());
    velocity.b2 = Eigen::VectorXd::Zero(like.b2.size());
}

void apply_sgd_step(MlpParams& params, SgdState& state, const MlpParams& grad, double lr,
                    double momentum, double weight_decay) {
    auto step = [&](auto& theta, auto& velocity, const auto& g) {
        velocity = momentum * velocity + g + weight_decay * theta;
        theta -= lr * velocity;
    };
    step(params.W1, state.velocity.W1, grad.W1);
    step(params.b1, state.velocity.b1, grad.b1);
    step(params.W2, state.velocity.W2, grad.W2);
    step(params.b2, state.velocity.b2, grad.b2);
}

TrainResult train_sgd(MlpParams params, const LabeledDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    if (data.size() == 0) throw std::invalid_argument("train_sgd: empty training set");
    if (data.input_dim() != params.input_dim() || data.classes > params.classes())
        throw std::invalid_argument("train_sgd: dataset does not match network shape");

    TrainResult out;
    out.epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));
    SgdState state(params);
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    Eigen::MatrixXd inputs;
    std::vector<int> labels;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[uniform_index(rng, i + 1)]);
        const double lr = cfg.learning_rate(epoch);
        double total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t count = std::min(batch, order.size() - start);
            inputs.resize(data.input_dim(), static_cast<Eigen::Index>(count));
            labels.resize(count);
            for (std::size_t b = 0; b < count; ++b) {
                inputs.col(static_cast<Eigen::Index>(b)) = data.inputs.col(static_cast<Eigen::Index>(order[start + b]));
                labels[b] = data.labels[order[start + b]];
            }
            const LossGradient lg = loss_and_gradient(params, inputs, labels);
            if (!std::isfinite(lg.loss))
                throw DivergenceError("training loss became non-finite at epoch " + std::to_string(epoch));
            total += lg.loss * static_cast<double>(count);
            apply_sgd_step(params, state, lg.grad, lr, cfg.momentum, cfg.weight_decay);
        }
        if (!params.all_finite())
            throw DivergenceError("parameters became non-finite at epoch " + std::to_string(epoch));
        out.epoch_loss.push_back(total / static_cast<double>(data.size()));
    }
    out.params = std::move(params);
    return out;
}

}  // namespace bvlab
