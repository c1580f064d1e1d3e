#include "bvlab/twolayer.hpp"

#include <cmath>
#include <string>

#include "bvlab/parallel.hpp"
#include "bvlab/rng.hpp"

namespace bvlab {

void ModelDims::validate() const {
    if (d < 1 || n < 1 || p < 1) throw std::invalid_argument("ModelDims: d, n, p must be >= 1");
    if (!(lambda0 >= 0.0) || !std::isfinite(lambda0))
        throw std::invalid_argument("ModelDims: lambda0 must be finite and >= 0");
}

namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
    std::normal_distribution<double> normal(0.0, stddev);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

// Copies the lower triangle onto the upper one.
void fill_upper(Eigen::MatrixXd& m) {
    for (Eigen::Index j = 1; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) m(i, j) = m(j, i);
}

// Cholesky factor (reads the lower triangle only) of a symmetric positive (semi)definite system, with the
// lambda == 0 conditioning guard.
Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram, double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw std::invalid_argument("ridge strength must be finite and >= 0");
    if (lambda == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo >= kMaxGramCondition)
            throw SingularSystemError("Gram matrix is singular or ill-conditioned at lambda = 0 (condition " +
                                      std::to_string(lo > 0.0 ? hi / lo : INFINITY) + ")");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularSystemError("Cholesky factorization of the ridge system failed");
    return llt;
}

}  // namespace

LinearNetSample sample_instance(const ModelDims& dims, std::uint64_t seed) {
    dims.validate();
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims.d));
    LinearNetSample s;
    s.W = gaussian_matrix(rng, dims.p, dims.d, scale);
    s.X = gaussian_matrix(rng, dims.d, dims.n, scale);
    s.theta = gaussian_matrix(rng, dims.d, 1, 1.0);
    s.y = s.X.transpose() * s.theta;
    return s;
}

Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y, double lambda) {
    if (W.cols() != X.rows() || X.cols() != y.size())
        throw std::invalid_argument("ridge_fit: shape mismatch");
    const Eigen::MatrixXd features = W * X;  // p x n
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(W.rows(), W.rows()) * lambda;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features);
    return factor_gram(gram, lambda).solve(features * y);
}

Eigen::MatrixXd m_matrix(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, double lambda) {
    if (W.cols() != X.rows()) throw std::invalid_argument("m_matrix: shape mismatch");
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(X.rows(), X.rows());
    cov.selfadjointView<Eigen::Lower>().rankUpdate(X);
    fill_upper(cov);
    const Eigen::MatrixXd wc = W * cov;  // p x d
    Eigen::MatrixXd gram = wc * W.transpose();
    gram.diagonal().array() += lambda;
    return W.transpose() * factor_gram(gram, lambda).solve(wc);
}

Eigen::MatrixXd m_tilde(const Eigen::MatrixXd& W, double lambda0) {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("m_tilde: lambda0 must be > 0");
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(W.rows(), W.rows()) * lambda0;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(W);
    return W.transpose() * factor_gram(gram, lambda0).solve(W);
}

Eigen::MatrixXd m_tilde_identity_form(const Eigen::MatrixXd& W, double lambda0) {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("m_tilde: lambda0 must be > 0");
    const Eigen::Index d = W.cols();
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(d, d);
    system.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose(), 1.0 / lambda0);
    return Eigen::MatrixXd::Identity(d, d) - system.llt().solve(Eigen::MatrixXd::Identity(d, d));
}

namespace detail {

MomentAccumulator::MomentAccumulator(Eigen::Index d) : d_(d), mean_(Eigen::MatrixXd::Zero(d, d)) {}

void MomentAccumulator::add(const Eigen::MatrixXd& m) {
    ++count_;
    const Eigen::MatrixXd before = m - mean_;
    mean_ += before / static_cast<double>(count_);
    spread_ += before.cwiseProduct(m - mean_).sum();
    miss_ += (m - Eigen::MatrixXd::Identity(d_, d_)).squaredNorm();
}

BiasVariance MomentAccumulator::result() const {
    const double d = static_cast<double>(d_);
    const double t = static_cast<double>(count_);
    BiasVariance out;
    out.bias_sq = (mean_ - Eigen::MatrixXd::Identity(d_, d_)).squaredNorm() / d;
    out.variance = spread_ / t / d;
    out.risk = miss_ / t / d;
    return out;
}

Eigen::MatrixXd trial_m_matrix(const ModelDims& dims, std::uint64_t seed) {
    const LinearNetSample s = sample_instance(dims, seed);
    return m_matrix(s.W, s.X, dims.lambda());
}

}  // namespace detail

namespace {

void check_trials(const ModelDims& dims, std::size_t trials) {
    dims.validate();
    if (trials < 2) throw std::invalid_argument("mc_bias_variance: need at least 2 trials");
}

}  // namespace

BiasVariance mc_bias_variance(const ModelDims& dims, std::span<const std::uint64_t> trial_seeds) {
    check_trials(dims, trial_seeds.size());
    // Trials are computed a block at a time and folded in index order, which
    // bounds memory at block * d^2 doubles.
    const std::size_t block = 64;
    detail::MomentAccumulator acc(dims.d);
    std::vector<Eigen::MatrixXd> batch;
    for (std::size_t start = 0; start < trial_seeds.size(); start += block) {
        const std::size_t count = std::min(block, trial_seeds.size() - start);
        batch.assign(count, Eigen::MatrixXd());
        parallel_for(static_cast<std::ptrdiff_t>(count), [&](std::ptrdiff_t i) {
            batch[static_cast<std::size_t>(i)] =
                detail::trial_m_matrix(dims, trial_seeds[start + static_cast<std::size_t>(i)]);
        }, true);
        for (const auto& m : batch) acc.add(m);
    }
    return acc.result();
}

BiasVariance mc_bias_variance(const ModelDims& dims, std::size_t trials, std::uint64_t master_seed) {
    check_trials(dims, trials);
    std::vector<std::uint64_t> seeds(trials);
    for (std::size_t t = 0; t < trials; ++t) seeds[t] = derive_seed(master_seed, t);
    return mc_bias_variance(dims, std::span<const std::uint64_t>(seeds));
}

double mtilde_risk_sample(Eigen::Index d, Eigen::Index p, double lambda0, std::uint64_t seed) {
    Rng rng(seed);
    const Eigen::MatrixXd W = gaussian_matrix(rng, p, d, 1.0 / std::sqrt(static_cast<double>(d)));
    // Factor whichever Gram system is smaller.
    const Eigen::MatrixXd mt = p <= d ? m_tilde(W, lambda0) : m_tilde_identity_form(W, lambda0);
    return (mt - Eigen::MatrixXd::Identity(d, d)).squaredNorm() / static_cast<double>(d);
}

double mc_risk_mtilde(Eigen::Index d, Eigen::Index p, double lambda0, std::size_t trials,
                      std::uint64_t master_seed) {
    if (d < 1 || p < 1) throw std::invalid_argument("mc_risk_mtilde: d and p must be >= 1");
    if (!(lambda0 > 0.0)) throw std::invalid_argument("mc_risk_mtilde: lambda0 must be > 0");
    if (trials < 1) throw std::invalid_argument("mc_risk_mtilde: need at least 1 trial");
    std::vector<double> risks(trials);
    parallel_for(static_cast<std::ptrdiff_t>(trials), [&](std::ptrdiff_t t) {
        risks[static_cast<std::size_t>(t)] =
            mtilde_risk_sample(d, p, lambda0, derive_seed(master_seed, static_cast<std::uint64_t>(t)));
    }, true);
    double total = 0.0;
    for (double r : risks) total += r;
    return total / static_cast<double>(trials);
}

double m_gap_spectral_norm(const ModelDims& dims, std::uint64_t seed) {
    if (!(dims.lambda0 > 0.0)) throw std::invalid_argument("m_gap_spectral_norm: lambda0 must be > 0");
    const LinearNetSample s = sample_instance(dims, seed);
    const Eigen::MatrixXd gap = m_matrix(s.W, s.X, dims.lambda()) - m_tilde(s.W, dims.lambda0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gap);
    return svd.singularValues()(0);
}

}  // namespace bvlab
