#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bvlab {

/// Dimensions of the two-layer linear model: input d, training set n, hidden p.
struct ModelDims {
    Eigen::Index d = 1;
    Eigen::Index n = 1;
    Eigen::Index p = 1;
    double lambda0 = 0.0;

    double gamma() const { return static_cast<double>(p) / static_cast<double>(d); }
    double eta() const { return static_cast<double>(d) / static_cast<double>(p); }
    /// Ridge strength of the fit, (n/d) * lambda0.
    double lambda() const { return static_cast<double>(n) / static_cast<double>(d) * lambda0; }

    void validate() const;
};

/// One draw of the random first layer and a noiseless training set y = X^T theta.
struct LinearNetSample {
    Eigen::MatrixXd W;      // p x d, entries N(0, 1/d)
    Eigen::MatrixXd X;      // d x n, columns N(0, I/d)
    Eigen::VectorXd theta;  // d, N(0, I)
    Eigen::VectorXd y;      // n
    std::optional<Eigen::VectorXd> beta;
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gram systems at lambda == 0 are accepted only below this condition number.
inline constexpr double kMaxGramCondition = 1e12;

/// Draws W, X, theta in that order from one stream seeded by `seed`.
LinearNetSample sample_instance(const ModelDims& dims, std::uint64_t seed);

/// argmin ||(WX)^T beta - y||^2 + lambda ||beta||^2 via a Cholesky solve of
/// (W X X^T W^T + lambda I) beta = W X y.
Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y, double lambda);

/// M = W^T (W X X^T W^T + lambda I)^{-1} W X X^T, so that the fitted
/// predictor is x^T M theta whenever y = X^T theta.
Eigen::MatrixXd m_matrix(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, double lambda);

/// Data-free limit W^T (W W^T + lambda0 I)^{-1} W.
Eigen::MatrixXd m_tilde(const Eigen::MatrixXd& W, double lambda0);

/// Same matrix as m_tilde through I - (I + W^T W / lambda0)^{-1}; solves a
/// d x d system instead of p x p.
Eigen::MatrixXd m_tilde_identity_form(const Eigen::MatrixXd& W, double lambda0);

struct BiasVariance {
    double bias_sq = 0.0;
    double variance = 0.0;
    double risk = 0.0;
};

/// Monte Carlo over i.i.d. (W, X) of
///   bias_sq  = ||E M - I||_F^2 / d
///   variance = E ||M - E M||_F^2 / d
///   risk     = E ||M - I||_F^2 / d
/// with lambda = (n/d) lambda0. Trial t uses derive_seed(master_seed, t).
/// Trials run in parallel; the reduction is a Welford pass in trial order.
BiasVariance mc_bias_variance(const ModelDims& dims, std::size_t trials, std::uint64_t master_seed);

/// Same estimate with caller-supplied per-trial seeds.
BiasVariance mc_bias_variance(const ModelDims& dims, std::span<const std::uint64_t> trial_seeds);

/// Monte Carlo estimate of E ||M_tilde - I||_F^2 / d over W draws.
double mc_risk_mtilde(Eigen::Index d, Eigen::Index p, double lambda0, std::size_t trials,
                      std::uint64_t master_seed);

/// Spectral norm ||M - M_tilde||_2 for one sampled instance with
/// lambda = (n/d) lambda0.
double m_gap_spectral_norm(const ModelDims& dims, std::uint64_t seed);

/// (1/d) ||M_tilde(W) - I||_F^2 for one draw; shared by both drivers.
double mtilde_risk_sample(Eigen::Index d, Eigen::Index p, double lambda0, std::uint64_t seed);

namespace reference {

BiasVariance mc_bias_variance(const ModelDims& dims, std::span<const std::uint64_t> trial_seeds);
double mc_risk_mtilde(Eigen::Index d, Eigen::Index p, double lambda0, std::size_t trials,
                      std::uint64_t master_seed);

}  // namespace reference

namespace detail {

/// Streaming accumulator for the matrix moments behind BiasVariance. Updates
/// must be applied in trial order for bit-reproducible results.
class MomentAccumulator {
public:
    explicit MomentAccumulator(Eigen::Index d);
    void add(const Eigen::MatrixXd& m);
    BiasVariance result() const;

private:
    Eigen::Index d_;
    std::size_t count_ = 0;
    Eigen::MatrixXd mean_;
    double spread_ = 0.0;  // sum of ||M_t - mean||^2 in Welford form
    double miss_ = 0.0;    // sum of ||M_t - I||^2
};

Eigen::MatrixXd trial_m_matrix(const ModelDims& dims, std::uint64_t seed);

}  // namespace detail

}  // namespace bvlab
