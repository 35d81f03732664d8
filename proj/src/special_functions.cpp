#include "mixnorm/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

#include "mixnorm/exponent.hpp"

namespace mixnorm {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 1'000'000;

void check_shape(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("gamma shape must be finite and > 0");
}

// log of x^a e^{-x} / Gamma(a), the common prefactor of both expansions.
double log_prefactor(double a, double x) { return a * std::log(x) - x - log_gamma(a); }

// P(a, x) by the power series sum_k x^k / (a (a+1) ... (a+k)).
double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kMaxIterations; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(log_prefactor(a, x));
}

// Q(a, x) by the modified Lentz evaluation of the Legendre continued fraction.
double upper_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(log_prefactor(a, x)) * h;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
    if (std::isinf(x)) return x;
    return boost::math::lgamma(x);
}

double regularized_gamma_p(double a, double x) {
    check_shape(a);
    if (std::isnan(x)) throw DomainError("regularized_gamma_p: x is NaN");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return lower_series(a, x);
    return 1.0 - upper_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    check_shape(a);
    if (std::isnan(x)) throw DomainError("regularized_gamma_q: x is NaN");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - lower_series(a, x);
    return upper_fraction(a, x);
}

double regularized_gamma_cdf(double shape, double scale, double x) {
    check_shape(shape);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("gamma scale must be finite and > 0");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(shape, x / scale);
}

double regularized_gamma_sf(double shape, double scale, double x) {
    check_shape(shape);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("gamma scale must be finite and > 0");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(shape, x / scale);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace mixnorm
