#pragma once

#include <cstdint>
#include <stdexcept>

namespace bvlab::theory {

/// Limiting (d -> infinity, n/d -> infinity) bias/variance of the two-layer
/// linear ridge model at width ratio gamma = p/d and ridge lambda0.
struct TheoryPoint {
    double lambda0 = 0.0;
    double gamma = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
    double risk = 0.0;
    // phi1 and phi2 are taken at (lambda0, 1/gamma) when gamma <= 1 and at
    // (lambda0, gamma) otherwise; phi3 is always at (lambda0, gamma).
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
};

double phi1(double lambda0, double gamma);
/// sqrt((lambda0 + 1)^2 + 2 (lambda0 - 1) gamma + gamma^2), evaluated as
/// hypot(gamma + lambda0 - 1, 2 sqrt(lambda0)).
double phi2(double lambda0, double gamma);
/// phi2 - lambda0 - gamma + 1, rationalized when the subtraction cancels.
double phi3(double lambda0, double gamma);

/// Closed-form limit. Requires lambda0 > 0 and gamma > 0; as gamma -> 0+ the
/// limits are bias_sq -> 1 and variance -> 0.
TheoryPoint theory_point(double lambda0, double gamma);

/// d bias_sq / d gamma = -phi3^2 / (2 phi2). Defined for lambda0 >= 0.
double bias_derivative(double lambda0, double gamma);

struct SmallLambdaExpansion {
    double variance_approx = 0.0;
    double risk_approx = 0.0;
};

/// First-order behaviour in lambda0: for gamma <= 1 variance ~ gamma (1 - gamma)
/// - 2 gamma lambda0 and risk ~ 1 - gamma; both vanish to O(lambda0^2) above 1.
SmallLambdaExpansion small_lambda_expansion(double lambda0, double gamma);

class PeakSearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// argmax over gamma in (0, 2] of the limiting variance. A coarse scan
/// brackets the maximum and checks the curve rises then falls; golden-section
/// search refines the bracket below 1e-6.
double variance_peak(double lambda0);

/// Narayana number N(m, k) = C(m-1, k-1) C(m, k-1) / k. Throws
/// std::overflow_error when the value does not fit in 64 bits.
std::uint64_t narayana(unsigned m, unsigned k);

struct SeriesSum {
    double value = 0.0;
    /// False when (1/lambda0)(1 + 1/sqrt(eta))^2 >= 1; the partial sum is
    /// still returned but carries no truncation guarantee.
    bool converges = true;
};

/// S(lambda0, eta) = sum_{m=1}^{m_max} sum_{k=1}^{m} N(m,k) (-1/lambda0)^m eta^{-k}.
SeriesSum narayana_series(double lambda0, double eta, unsigned m_max);

/// Generating-function value of the full series:
/// -(lambda0 eta + 1 + eta - sqrt(lambda0^2 eta^2 + 2 lambda0 eta (1 + eta) + (1 - eta)^2)) / (2 eta).
double narayana_series_closed(double lambda0, double eta);

/// Bias through the Narayana route, (1 + S(lambda0, eta))^2.
double narayana_bias(double lambda0, double eta);

/// f_alpha(eta): Marchenko-Pastur integral of 1 / (1 + (alpha/eta) x)^2.
double mp_f(double alpha, double eta);

/// Limiting risk through the Marchenko-Pastur law, eta = d/p:
/// f_{1/lambda0}(eta) for eta <= 1, (1 - 1/eta) + f_{1/lambda0}(1/eta) above.
double mp_risk(double lambda0, double eta);

/// Limit of E ||M_tilde - I||^2 / d when the nonzero spectrum of W^T W is
/// weighted by its share p/d of the eigenvalues: identical to mp_risk for
/// eta <= 1, (1 - 1/eta) + f_{1/(lambda0 eta)}(1/eta) / eta above. This is the
/// value the finite-d Monte Carlo converges to for d > p.
double mp_risk_rank_weighted(double lambda0, double eta);

}  // namespace bvlab::theory
