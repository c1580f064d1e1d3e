#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bvlab/theory.hpp"

using namespace bvlab::theory;

namespace {

// Direct integral of 1 / (1 + (alpha/eta) x)^2 against the Marchenko-Pastur
// density with ratio eta <= 1.
double mp_quadrature(double alpha, double eta) {
    const double lo = std::pow(1.0 - std::sqrt(eta), 2), hi = std::pow(1.0 + std::sqrt(eta), 2);
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto density = [&](double x) {
        const double w = 1.0 + alpha / eta * x;
        return std::sqrt(std::max(0.0, (hi - x) * (x - lo))) / (eta * x * w * w);
    };
    return integrator.integrate(density, lo, hi) / (2.0 * std::numbers::pi);
}

std::uint64_t catalan(unsigned m) {
    // C_{j+1} = C_j * 2 (2j + 1) / (j + 2), exact at every step.
    unsigned __int128 c = 1;
    for (unsigned j = 0; j < m; ++j) c = c * 2 * (2 * j + 1) / (j + 2);
    return static_cast<std::uint64_t>(c);
}

double brute_series(double lambda0, double eta, unsigned m_max) {
    double total = 0.0;
    for (unsigned m = 1; m <= m_max; ++m)
        for (unsigned k = 1; k <= m; ++k)
            total += static_cast<double>(narayana(m, k)) * std::pow(-1.0 / lambda0, m) * std::pow(eta, -double(k));
    return total;
}

}  // namespace

TEST_CASE("limit at the square width") {
    auto tp = theory_point(1.0, 1.0);
    CHECK(tp.bias_sq == doctest::Approx(std::pow(std::sqrt(5.0) - 1.0, 2) / 4.0).epsilon(1e-12));
    CHECK(tp.variance == doctest::Approx(0.065247584249852787).epsilon(1e-12));
    CHECK(tp.risk == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("limit at twice the input width") {
    auto tp = theory_point(1.0, 2.0);
    CHECK(tp.bias_sq == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(tp.variance == doctest::Approx(0.035533905932737622).epsilon(1e-12));
    CHECK(tp.risk == doctest::Approx(1.0 / std::sqrt(2.0) - 0.5).epsilon(1e-12));
}

TEST_CASE("bias vanishes for very wide layers") {
    CHECK(theory_point(1.0, 1e6).bias_sq < 1e-10);
    CHECK(theory_point(0.1, 1e-9).bias_sq == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("theory rejects non-positive arguments") {
    CHECK_THROWS_AS(theory_point(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(theory_point(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(theory_point(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(theory_point(1.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("both branches agree at the square width") {
    for (double l : {0.001, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0}) {
        auto tp = theory_point(l, 1.0);
        const double upper = phi1(l, 1.0) / (2.0 * phi2(l, 1.0)) - tp.bias_sq;
        CHECK(std::abs(tp.variance - upper) <= 1e-12);
        auto above = theory_point(l, 1.0 + 1e-9);
        CHECK(std::abs(above.variance - tp.variance) <= 1e-7);
    }
}

TEST_CASE("limits stay in range and the decomposition adds up") {
    for (double l : {0.01, 0.1, 1.0, 5.0})
        for (double g = 0.05; g <= 4.0; g += 0.05) {
            auto tp = theory_point(l, g);
            CHECK(tp.bias_sq >= 0.0);
            CHECK(tp.bias_sq <= 1.0);
            CHECK(tp.variance >= -1e-12);
            CHECK(tp.risk == doctest::Approx(tp.bias_sq + tp.variance).epsilon(1e-14));
        }
}

TEST_CASE("bias derivative") {
    CHECK(bias_derivative(0.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(bias_derivative(0.0, 1.0) == 0.0);
    CHECK(bias_derivative(0.0, 2.0) == 0.0);
    for (double l : {0.01, 0.3, 1.0, 4.0})
        for (double g = 0.1; g <= 3.0; g += 0.1) {
            const double h = 1e-6;
            const double fd = (theory_point(l, g + h).bias_sq - theory_point(l, g - h).bias_sq) / (2.0 * h);
            const double exact = bias_derivative(l, g);
            CHECK(exact <= 0.0);
            CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
    CHECK_THROWS_AS(bias_derivative(-0.1, 1.0), std::invalid_argument);
}

TEST_CASE("small ridge expansion") {
    auto e = small_lambda_expansion(0.01, 0.5);
    CHECK(e.variance_approx == doctest::Approx(0.24).epsilon(1e-12));
    CHECK(e.risk_approx == doctest::Approx(0.5).epsilon(1e-12));
    auto exact = theory_point(0.01, 0.5);
    CHECK(exact.variance == doctest::Approx(0.24047366336780291).epsilon(1e-10));
    CHECK(exact.risk == doctest::Approx(0.50018862586731548).epsilon(1e-10));

    auto at_one = small_lambda_expansion(0.02, 1.0);
    CHECK(at_one.variance_approx == doctest::Approx(-0.04).epsilon(1e-12));
    CHECK(at_one.risk_approx == 0.0);

    auto above = small_lambda_expansion(0.01, 2.0);
    CHECK(above.variance_approx == 0.0);
    CHECK(above.risk_approx == 0.0);
    CHECK(theory_point(0.01, 2.0).risk == doctest::Approx(1.886e-4).epsilon(1e-3));
}

TEST_CASE("small ridge expansion error is second order") {
    // The constant blows up as gamma -> 1, so the check stops at 0.7.
    for (double l : {0.001, 0.003, 0.01})
        for (double g = 0.05; g <= 0.7 + 1e-9; g += 0.05) {
            auto e = small_lambda_expansion(l, g);
            auto tp = theory_point(l, g);
            CHECK(std::abs(tp.variance - e.variance_approx) <= 50.0 * l * l);
            CHECK(std::abs(tp.risk - e.risk_approx) <= 50.0 * l * l);
        }
}

TEST_CASE("variance peak") {
    CHECK(variance_peak(0.01) == doctest::Approx(0.49).epsilon(0.005 / 0.49));
    CHECK(std::abs(variance_peak(0.001) - 0.499) <= 5e-4);
    for (double l : {0.1, 0.05, 0.02, 0.005, 0.001, 0.0005}) {
        const double peak = variance_peak(l);
        // Independent grid scan.
        double best_g = 0.0, best_v = -1.0;
        for (double g = 1e-4; g <= 2.0; g += 1e-4) {
            const double v = theory_point(l, g).variance;
            if (v > best_v) best_v = v, best_g = g;
        }
        CHECK(std::abs(peak - best_g) <= 2e-4);
        if (l <= 0.05) CHECK(std::abs(peak - (0.5 - l)) <= 20.0 * l * l);
    }
    CHECK_THROWS_AS(variance_peak(0.0), std::invalid_argument);
}

TEST_CASE("variance peak refuses curves without an interior maximum") {
    // With heavy ridge the variance maximum leaves (0, 2].
    CHECK_THROWS_AS(variance_peak(50.0), PeakSearchError);
}

TEST_CASE("narayana numbers") {
    CHECK(narayana(1, 1) == 1);
    CHECK(narayana(3, 2) == 3);
    CHECK(narayana(4, 2) == 6);
    for (unsigned m = 1; m <= 30; ++m) {
        std::uint64_t row = 0;
        for (unsigned k = 1; k <= m; ++k) {
            row += narayana(m, k);
            CHECK(narayana(m, k) == narayana(m, m + 1 - k));
        }
        CHECK(row == catalan(m));
    }
    CHECK_THROWS_AS(narayana(0, 1), std::out_of_range);
    CHECK_THROWS_AS(narayana(3, 0), std::out_of_range);
    CHECK_THROWS_AS(narayana(3, 4), std::out_of_range);
    CHECK_THROWS_AS(narayana(80, 40), std::overflow_error);
}

TEST_CASE("narayana series") {
    CHECK(narayana_series(10.0, 2.0, 1).value == doctest::Approx(-0.05).epsilon(1e-14));
    CHECK(narayana_series(10.0, 2.0, 2).value == doctest::Approx(-0.0425).epsilon(1e-14));
    auto full = narayana_series(10.0, 2.0, 40);
    CHECK(full.converges);
    CHECK(std::abs(full.value - narayana_series_closed(10.0, 2.0)) <= 1e-6);
    CHECK(narayana_series_closed(10.0, 2.0) == doctest::Approx(-0.043643894743336297).epsilon(1e-12));

    for (double l : {5.0, 10.0, 40.0})
        for (double eta : {1.0, 2.0, 4.0})
            for (unsigned m : {1u, 5u, 12u})
                CHECK(narayana_series(l, eta, m).value == doctest::Approx(brute_series(l, eta, m)).epsilon(1e-12));

    CHECK_FALSE(narayana_series(1.0, 1.0, 10).converges);
    CHECK_THROWS_AS(narayana_series(1.0, 1.0, 0), std::invalid_argument);
    CHECK(std::abs(narayana_series_closed(1e8, 2.0)) < 1e-7);
}

TEST_CASE("narayana route reproduces the bias") {
    CHECK(narayana_bias(1.0, 0.5) == doctest::Approx(0.171573).epsilon(1e-6));
    for (double l : {0.05, 0.5, 1.0, 3.0})
        for (double g : {0.25, 0.5, 1.0, 2.0, 4.0})
            CHECK(narayana_bias(l, 1.0 / g) == doctest::Approx(theory_point(l, g).bias_sq).epsilon(1e-10));
}

TEST_CASE("marchenko pastur closed form matches quadrature") {
    for (double alpha : {0.1, 1.0, 2.0, 10.0})
        for (double eta : {0.1, 0.25, 0.5, 0.8, 0.99})
            CHECK(mp_f(alpha, eta) == doctest::Approx(mp_quadrature(alpha, eta)).epsilon(1e-6));
}

TEST_CASE("marchenko pastur risk") {
    CHECK(mp_risk(1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(mp_risk(1.0, 0.5) == doctest::Approx(1.0 / std::sqrt(2.0) - 0.5).epsilon(1e-12));
    CHECK(mp_risk(0.7, 1.0 + 1e-9) == doctest::Approx(mp_risk(0.7, 1.0)).epsilon(1e-7));
    for (double l : {0.1, 0.5, 1.0, 2.0})
        for (double g : {0.2, 0.5, 1.0, 1.5, 3.0})
            CHECK(mp_risk(l, 1.0 / g) == doctest::Approx(theory_point(l, g).risk).epsilon(1e-8));
    for (double l : {0.1, 1.0})
        for (double eta : {0.3, 1.0})
            CHECK(mp_risk_rank_weighted(l, eta) == mp_risk(l, eta));
}
