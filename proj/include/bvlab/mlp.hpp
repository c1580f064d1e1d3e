#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bvlab/dataset.hpp"

namespace bvlab {

/// One-hidden-layer ReLU network: softmax(W2 relu(W1 x + b1) + b2).
struct MlpParams {
    Eigen::MatrixXd W1;  // width x d_in
    Eigen::VectorXd b1;  // width
    Eigen::MatrixXd W2;  // c x width
    Eigen::VectorXd b2;  // c

    Eigen::Index width() const { return W1.rows(); }
    Eigen::Index input_dim() const { return W1.cols(); }
    Eigen::Index classes() const { return W2.rows(); }

    /// Total parameter count; the flat layout is W1, b1, W2, b2 (column-major).
    Eigen::Index size() const { return W1.size() + b1.size() + W2.size() + b2.size(); }
    Eigen::VectorXd flatten() const;
    void assign(const Eigen::VectorXd& flat);

    bool all_finite() const;
    bool operator==(const MlpParams& other) const;
};

/// Zero-mean Gaussian weights with stddev 1/sqrt(fan_in), zero biases.
MlpParams init_mlp(Eigen::Index d_in, Eigen::Index width, Eigen::Index classes, std::uint64_t seed);

/// Class probabilities, classes x count.
Eigen::MatrixXd predict_proba(const MlpParams& params, const Eigen::MatrixXd& inputs);

struct LossGradient {
    double loss = 0.0;
    MlpParams grad;
};

/// Mean over the batch of ||softmax(z) - onehot(y)||^2 and its exact gradient.
LossGradient loss_and_gradient(const MlpParams& params, const Eigen::MatrixXd& inputs,
                               std::span<const int> labels);

struct TrainConfig {
    int epochs = 200;
    double initial_lr = 0.1;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    double lr_decay_factor = 10.0;
    int lr_decay_every = 100;
    int batch_size = 128;
    std::uint64_t seed = 0;

    void validate() const;
    double learning_rate(int epoch) const;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Heavy-ball momentum state, one buffer per parameter block.
struct SgdState {
    MlpParams velocity;
    explicit SgdState(const MlpParams& shape_like);
};

/// v <- momentum v + (grad + decay theta); theta <- theta - lr v.
void apply_sgd_step(MlpParams& params, SgdState& state, const MlpParams& grad, double lr,
                    double momentum, double weight_decay);

struct TrainResult {
    MlpParams params;
    std::vector<double> epoch_loss;  // mean minibatch loss per epoch
};

/// Minibatch SGD on the softmax-MSE loss. Batches are reshuffled every epoch
/// from a stream seeded by cfg.seed; the learning rate is divided by
/// lr_decay_factor every lr_decay_every epochs. Throws DivergenceError when
/// the loss or the parameters become non-finite.
TrainResult train_sgd(MlpParams params, const LabeledDataset& data, const TrainConfig& cfg);

}  // namespace bvlab
