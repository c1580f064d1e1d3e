#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bvlab/rng.hpp"
#include "bvlab/theory.hpp"
#include "bvlab/twolayer.hpp"

using namespace bvlab;

namespace {

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
    std::normal_distribution<double> normal(0.0, stddev);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

double ridge_objective(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       double lambda, const Eigen::VectorXd& beta) {
    return ((W * X).transpose() * beta - y).squaredNorm() + lambda * beta.squaredNorm();
}

bool same_bits(const BiasVariance& a, const BiasVariance& b) {
    return a.bias_sq == b.bias_sq && a.variance == b.variance && a.risk == b.risk;
}

}  // namespace

TEST_CASE("model dimensions") {
    ModelDims dims{64, 6400, 32, 1.0};
    CHECK(std::abs(dims.gamma() * dims.eta() - 1.0) <= 1e-15);
    CHECK(dims.lambda() == 100.0);
    CHECK_THROWS_AS((ModelDims{0, 1, 1, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelDims{1, 1, 1, -1.0}.validate()), std::invalid_argument);
}

TEST_CASE("sampled targets are noiseless linear functions") {
    auto s = sample_instance({1, 1, 1, 1.0}, 3);
    CHECK(s.y(0) == s.X(0, 0) * s.theta(0));

    auto a = sample_instance({16, 40, 8, 1.0}, 9);
    auto b = sample_instance({16, 40, 8, 1.0}, 9);
    CHECK(a.W == b.W);
    CHECK(a.X == b.X);
    CHECK(a.theta == b.theta);
    CHECK(a.y == b.y);
    CHECK((a.y - a.X.transpose() * a.theta).norm() == 0.0);
}

TEST_CASE("inputs have unit expected squared norm") {
    auto s = sample_instance({64, 6400, 1, 1.0}, 1);
    const double mean = s.X.colwise().squaredNorm().mean();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
    const double w_mean = s.W.rowwise().squaredNorm().mean();
    CHECK(w_mean == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("scalar ridge fit") {
    Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
    CHECK(ridge_fit(one, one, y, 1.0)(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m_matrix(one, one, 1.0)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m_tilde(one, 1.0)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ridge fit solves the normal equations and minimizes the objective") {
    auto s = sample_instance({20, 50, 30, 1.0}, 4);
    const double lambda = 0.3;
    Eigen::VectorXd beta = ridge_fit(s.W, s.X, s.y, lambda);
    const Eigen::MatrixXd f = s.W * s.X;
    Eigen::VectorXd residual = (f * f.transpose() + lambda * Eigen::MatrixXd::Identity(30, 30)) * beta - f * s.y;
    CHECK(residual.norm() <= 1e-8 * (f * s.y).norm());

    Rng rng(8);
    const double best = ridge_objective(s.W, s.X, s.y, lambda, beta);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd delta = gaussian(rng, 30, 1, 1e-3);
        CHECK(ridge_objective(s.W, s.X, s.y, lambda, beta + delta) >= best);
    }
}

TEST_CASE("heavy ridge shrinks coefficients") {
    auto s = sample_instance({10, 30, 12, 1.0}, 2);
    const double lambda = 1e6;
    Eigen::VectorXd beta = ridge_fit(s.W, s.X, s.y, lambda);
    CHECK(beta.norm() <= (s.W * s.X * s.y).norm() / lambda);
    CHECK(m_matrix(s.W, s.X, 1e10).norm() < 1e-6);
}

TEST_CASE("unregularized systems must be well conditioned") {
    auto wide = sample_instance({10, 5, 8, 0.0}, 1);  // p > n: W X X^T W^T has rank 5
    CHECK_THROWS_AS(ridge_fit(wide.W, wide.X, wide.y, 0.0), SingularSystemError);
    CHECK_THROWS_AS(m_matrix(wide.W, wide.X, 0.0), SingularSystemError);

    auto tall = sample_instance({10, 200, 5, 0.0}, 1);
    CHECK_NOTHROW(ridge_fit(tall.W, tall.X, tall.y, 0.0));
    CHECK_THROWS_AS(ridge_fit(tall.W, tall.X, tall.y, -1.0), std::invalid_argument);
}

TEST_CASE("M reproduces the fitted predictor") {
    auto s = sample_instance({24, 60, 16, 1.0}, 12);
    const double lambda = 0.7;
    const Eigen::MatrixXd m = m_matrix(s.W, s.X, lambda);
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd theta = gaussian(rng, 24, 1, 1.0);
        Eigen::VectorXd x = gaussian(rng, 24, 1, 1.0);
        Eigen::VectorXd y = s.X.transpose() * theta;
        const double direct = x.dot(s.W.transpose() * ridge_fit(s.W, s.X, y, lambda));
        const double via_m = x.dot(m * theta);
        CHECK(std::abs(direct - via_m) <= 1e-8 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("M tilde forms agree and match the singular spectrum") {
    Rng rng(21);
    for (auto [p, d] : {std::pair<long, long>{8, 20}, {20, 8}, {15, 15}}) {
        Eigen::MatrixXd W = gaussian(rng, p, d, 1.0 / std::sqrt(double(d)));
        const double lambda0 = 0.4;
        Eigen::MatrixXd a = m_tilde(W, lambda0);
        Eigen::MatrixXd b = m_tilde_identity_form(W, lambda0);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
        std::vector<double> expected(static_cast<std::size_t>(d), 0.0);
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            const double s2 = svd.singularValues()(i) * svd.singularValues()(i);
            expected[static_cast<std::size_t>(i)] = s2 / (s2 + lambda0);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
        std::vector<double> got(eig.eigenvalues().data(), eig.eigenvalues().data() + d);
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-10).scale(1.0));
            CHECK(got[i] > -1e-12);
            CHECK(got[i] < 1.0);
        }
    }
}

TEST_CASE("M tilde edge cases") {
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 5);
    CHECK(m_tilde(zero, 1.0).norm() == 0.0);
    CHECK(m_tilde_identity_form(zero, 1.0).norm() <= 1e-15);
    CHECK_THROWS_AS(m_tilde(zero, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(m_tilde(zero, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(mc_risk_mtilde(8, 8, 0.0, 2, 0), std::invalid_argument);
}

TEST_CASE("identical trials have zero variance") {
    ModelDims dims{16, 320, 8, 1.0};
    std::vector<std::uint64_t> seeds{5, 5, 5};
    auto r = mc_bias_variance(dims, seeds);
    CHECK(r.variance <= 1e-20);
    CHECK(r.bias_sq == doctest::Approx(r.risk).epsilon(1e-10));
}

TEST_CASE("monte carlo decomposition is additive and reproducible") {
    ModelDims dims{16, 320, 24, 0.5};
    auto a = mc_bias_variance(dims, 40, 99);
    auto b = mc_bias_variance(dims, 40, 99);
    CHECK(same_bits(a, b));
    CHECK(std::abs(a.risk - a.bias_sq - a.variance) <= 1e-10 * a.risk);
    CHECK_THROWS_AS(mc_bias_variance(dims, 1, 0), std::invalid_argument);
}

TEST_CASE("parallel and serial monte carlo agree bit for bit") {
    ModelDims dims{12, 240, 10, 1.0};
    std::vector<std::uint64_t> seeds(150);
    for (std::size_t t = 0; t < seeds.size(); ++t) seeds[t] = derive_seed(17, t);
    CHECK(same_bits(mc_bias_variance(dims, seeds), reference::mc_bias_variance(dims, seeds)));
    CHECK(mc_risk_mtilde(12, 20, 0.5, 30, 4) == reference::mc_risk_mtilde(12, 20, 0.5, 30, 4));
}

TEST_CASE("finite-n simulation tracks the limit above the interpolation width") {
    auto r = mc_bias_variance({64, 6400, 64, 1.0}, 200, 1);
    CHECK(r.bias_sq == doctest::Approx(0.381966).epsilon(0.05));
    CHECK(std::abs(r.variance - 0.065248) <= 0.02);
    CHECK(std::abs(r.risk - 0.447214) <= 0.02);

    auto wide = mc_bias_variance({64, 6400, 128, 1.0}, 100, 2);
    CHECK(std::abs(wide.risk - 0.207107) <= 0.02);
}

TEST_CASE("data-free risk approaches its limit") {
    CHECK(mc_risk_mtilde(512, 512, 1.0, 8, 3) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(0.02));
    CHECK(mc_risk_mtilde(512, 1024, 1.0, 4, 3) ==
          doctest::Approx(1.0 / std::sqrt(2.0) - 0.5).epsilon(0.02));
    // Below the square width the finite-d risk follows the rank-weighted limit.
    CHECK(mc_risk_mtilde(256, 128, 1.0, 16, 3) ==
          doctest::Approx(theory::mp_risk_rank_weighted(1.0, 2.0)).epsilon(0.02));
}

TEST_CASE("data-free risk falls with width") {
    double previous = 2.0;
    for (long p : {32, 64, 128, 256, 512}) {
        const double r = mc_risk_mtilde(32, p, 1.0, 20, 6);
        CHECK(r < previous);
        previous = r;
    }
}

TEST_CASE("M approaches M tilde as the sample grows") {
    std::vector<double> medians;
    for (long ratio : {10, 100, 1000}) {
        ModelDims dims{32, 32 * ratio, 32, 1.0};
        std::vector<double> gaps;
        for (std::uint64_t t = 0; t < 21; ++t) gaps.push_back(m_gap_spectral_norm(dims, derive_seed(ratio, t)));
        std::nth_element(gaps.begin(), gaps.begin() + 10, gaps.end());
        medians.push_back(gaps[10]);
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
}
