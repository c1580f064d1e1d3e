#include "bvlab/theory.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bvlab::theory {

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

}  // namespace

double phi1(double lambda0, double gamma) {
    return lambda0 * (gamma + 1.0) + (gamma - 1.0) * (gamma - 1.0);
}

double phi2(double lambda0, double gamma) {
    return std::hypot(gamma + lambda0 - 1.0, 2.0 * std::sqrt(lambda0));
}

double phi3(double lambda0, double gamma) {
    const double shift = gamma + lambda0 - 1.0;
    const double root = phi2(lambda0, gamma);
    // root - shift == 4 lambda0 / (root + shift)
    return shift > 0.0 ? 4.0 * lambda0 / (root + shift) : root - shift;
}

TheoryPoint theory_point(double lambda0, double gamma) {
    require_positive(lambda0, "lambda0");
    require_positive(gamma, "gamma");
    TheoryPoint tp;
    tp.lambda0 = lambda0;
    tp.gamma = gamma;
    tp.phi3 = phi3(lambda0, gamma);
    tp.bias_sq = 0.25 * tp.phi3 * tp.phi3;
    if (gamma <= 1.0) {
        const double inv = 1.0 / gamma;
        tp.phi1 = phi1(lambda0, inv);
        tp.phi2 = phi2(lambda0, inv);
        tp.variance = tp.phi1 / (2.0 * tp.phi2) - (1.0 - gamma) * (1.0 - 2.0 * gamma) / (2.0 * gamma) -
                      tp.bias_sq;
    } else {
        tp.phi1 = phi1(lambda0, gamma);
        tp.phi2 = phi2(lambda0, gamma);
        tp.variance = tp.phi1 / (2.0 * tp.phi2) - (gamma - 1.0) / 2.0 - tp.bias_sq;
    }
    tp.risk = tp.bias_sq + tp.variance;
    return tp;
}

double bias_derivative(double lambda0, double gamma) {
    if (!(lambda0 >= 0.0)) throw std::invalid_argument("bias_derivative: lambda0 must be >= 0");
    require_positive(gamma, "gamma");
    const double root = phi2(lambda0, gamma);
    if (root == 0.0) return 0.0;  // lambda0 = 0, gamma = 1: both sides tend to 0
    const double p3 = phi3(lambda0, gamma);
    return -(p3 * p3) / (2.0 * root);
}

SmallLambdaExpansion small_lambda_expansion(double lambda0, double gamma) {
    require_positive(lambda0, "lambda0");
    require_positive(gamma, "gamma");
    if (gamma > 1.0) return {0.0, 0.0};
    return {-(gamma - 1.0) * gamma - 2.0 * gamma * lambda0, 1.0 - gamma};
}

double variance_peak(double lambda0) {
    require_positive(lambda0, "lambda0");
    constexpr int kScan = 2000;
    constexpr double kUpper = 2.0;
    const double step = kUpper / kScan;
    auto variance = [lambda0](double g) { return theory_point(lambda0, g).variance; };

    std::vector<double> values(kScan);
    for (int i = 0; i < kScan; ++i) values[i] = variance(step * (i + 1));

    int best = 0;
    for (int i = 1; i < kScan; ++i)
        if (values[i] > values[best]) best = i;
    if (best == 0 || best == kScan - 1)
        throw PeakSearchError("variance maximum lies on the search boundary at gamma = " +
                              std::to_string(step * (best + 1)));
    for (int i = 1; i <= best; ++i)
        if (values[i] < values[i - 1])
            throw PeakSearchError("variance is not increasing before the peak near gamma = " +
                                  std::to_string(step * (i + 1)));
    for (int i = best + 1; i < kScan; ++i)
        if (values[i] > values[i - 1])
            throw PeakSearchError("variance is not decreasing after the peak near gamma = " +
                                  std::to_string(step * (i + 1)));

    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = step * best, b = step * (best + 2);
    double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
    double f1 = variance(x1), f2 = variance(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = variance(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = variance(x1);
        }
    }
    return 0.5 * (a + b);
}

namespace {

// Exact C(n, r) in 128 bits; throws once it exceeds 64 bits.
unsigned __int128 binomial(unsigned n, unsigned r) {
    if (r > n) return 0;
    if (r > n - r) r = n - r;
    unsigned __int128 value = 1;
    for (unsigned i = 1; i <= r; ++i) {
        value = value * (n - r + i) / i;
        if (value > std::numeric_limits<std::uint64_t>::max())
            throw std::overflow_error("binomial coefficient exceeds 64 bits");
    }
    return value;
}

}  // namespace

std::uint64_t narayana(unsigned m, unsigned k) {
    if (m < 1 || k < 1 || k > m)
        throw std::out_of_range("narayana: need 1 <= k <= m, got m = " + std::to_string(m) +
                                ", k = " + std::to_string(k));
    const unsigned __int128 a = binomial(m - 1, k - 1);
    const unsigned __int128 b = binomial(m, k - 1);
    if (b != 0 && a > std::numeric_limits<unsigned __int128>::max() / b)
        throw std::overflow_error("narayana: product overflow");
    const unsigned __int128 value = a * b / k;
    if (value > std::numeric_limits<std::uint64_t>::max())
        throw std::overflow_error("narayana: value exceeds 64 bits");
    return static_cast<std::uint64_t>(value);
}

SeriesSum narayana_series(double lambda0, double eta, unsigned m_max) {
    require_positive(lambda0, "lambda0");
    require_positive(eta, "eta");
    if (m_max == 0) throw std::invalid_argument("narayana_series: m_max must be >= 1");
    SeriesSum out;
    const double edge = 1.0 + 1.0 / std::sqrt(eta);
    out.converges = edge * edge / lambda0 < 1.0;

    const double inv_eta = 1.0 / eta;
    double sign_scale = 1.0;  // (-1/lambda0)^m
    for (unsigned m = 1; m <= m_max; ++m) {
        sign_scale *= -1.0 / lambda0;
        // Row m: N(m,1) = 1, N(m,k+1) = N(m,k) (m-k)(m-k+1) / (k (k+1)).
        double term = 1.0, power = inv_eta, row = 0.0;
        for (unsigned k = 1; k <= m; ++k) {
            row += term * power;
            term *= static_cast<double>(m - k) * static_cast<double>(m - k + 1) /
                    (static_cast<double>(k) * static_cast<double>(k + 1));
            power *= inv_eta;
        }
        out.value += sign_scale * row;
    }
    return out;
}

double narayana_series_closed(double lambda0, double eta) {
    if (!(lambda0 >= 0.0)) throw std::invalid_argument("lambda0 must be >= 0");
    require_positive(eta, "eta");
    const double le = lambda0 * eta;
    const double root = std::sqrt(le * le + 2.0 * le * (1.0 + eta) + (1.0 - eta) * (1.0 - eta));
    return -(le + (1.0 + eta) - root) / (2.0 * eta);
}

double narayana_bias(double lambda0, double eta) {
    const double s = narayana_series_closed(lambda0, eta);
    return (1.0 + s) * (1.0 + s);
}

double mp_f(double alpha, double eta) {
    require_positive(eta, "eta");
    const double root =
        std::sqrt(eta * eta + 2.0 * eta * alpha * (1.0 + eta) + alpha * alpha * (1.0 - eta) * (1.0 - eta));
    return (alpha + eta * (1.0 + eta - 2.0 * alpha + eta * alpha)) / (2.0 * eta * root) -
           (1.0 - eta) / (2.0 * eta);
}

double mp_risk(double lambda0, double eta) {
    require_positive(lambda0, "lambda0");
    require_positive(eta, "eta");
    const double alpha = 1.0 / lambda0;
    if (eta <= 1.0) return mp_f(alpha, eta);
    return (1.0 - 1.0 / eta) + mp_f(alpha, 1.0 / eta);
}

double mp_risk_rank_weighted(double lambda0, double eta) {
    require_positive(lambda0, "lambda0");
    require_positive(eta, "eta");
    const double alpha = 1.0 / lambda0;
    if (eta <= 1.0) return mp_f(alpha, eta);
    return (1.0 - 1.0 / eta) + mp_f(alpha / eta, 1.0 / eta) / eta;
}

}  // namespace bvlab::theory
