#include "mixnorm/moments.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "mixnorm/special_functions.hpp"

namespace mixnorm {
namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("moment index must be finite and > 0");
}

}  // namespace

double log_gamma_ratio(double a, double delta) {
    if (!(a > 0.0) || !(a + delta > 0.0)) throw DomainError("log_gamma_ratio: arguments must be > 0");
    if (delta == 0.0) return 0.0;
    if (std::fabs(delta) < a) {
        // tgamma_delta_ratio(a, d) = Gamma(a) / Gamma(a + d)
        try {
            const double r = boost::math::tgamma_delta_ratio(a, delta);
            if (r > 0.0 && std::isfinite(r)) return -std::log(r);
        } catch (const std::exception&) {
            // overflow or underflow: fall through to the log-space difference
        }
    }
    return log_gamma(a + delta) - log_gamma(a);
}

double moment_M(Exponent p, double alpha) {
    check_alpha(alpha);
    if (p.is_infinite()) return 1.0 / (alpha + 1.0);
    const double pv = p.value();
    const double base = 1.0 / pv + 1.0;
    const double log_m = (alpha / pv) * std::log(pv) - std::log1p(alpha) + log_gamma_ratio(base, alpha / pv);
    return std::exp(log_m);
}

double moment_M(Exponent p, Exponent alpha) {
    if (alpha.is_infinite()) {
        if (!p.is_infinite()) throw DomainError("M_p^inf is only defined (as 1) for p = inf");
        return 1.0;
    }
    return moment_M(p, alpha.value());
}

double cov_C(Exponent p, double alpha, double beta) {
    check_alpha(alpha);
    check_alpha(beta);
    return moment_M(p, alpha + beta) - moment_M(p, alpha) * moment_M(p, beta);
}

double cov_C(Exponent p, Exponent alpha, Exponent beta) {
    if (alpha.is_infinite() || beta.is_infinite()) {
        if (!p.is_infinite()) throw DomainError("C_p^{inf,beta} is only defined (as 0) for p = inf");
        return 0.0;
    }
    return cov_C(p, alpha.value(), beta.value());
}

double var_V(Exponent p, double alpha) { return cov_C(p, alpha, alpha); }

double var_V(Exponent p, Exponent alpha) { return cov_C(p, alpha, alpha); }

MomentTriple moment_triple(Exponent p, double alpha, double beta) {
    return {moment_M(p, alpha), cov_C(p, alpha, beta), var_V(p, alpha)};
}

double moment_M_asymptotic(Exponent p, double q, long n) {
    check_alpha(q);
    if (n < 1) throw DomainError("moment_M_asymptotic requires n >= 1");
    const double nn = static_cast<double>(n);
    if (p.is_infinite()) {
        const double ratio = -q / nn;
        if (!(std::fabs(ratio) < 1.0)) throw DomainError("geometric expansion requires q < n");
        double sum = 0.0;
        double term = 1.0;
        for (int k = 0; k < 100000 && std::fabs(term) > 1e-18 * std::fabs(sum + 1.0); ++k) {
            sum += term;
            term *= ratio;
        }
        return sum;
    }
    const double pv = p.value();
    const double first = q * (q - pv) / (2.0 * pv);
    const double second = (q * q / (8.0 * pv * pv) - 5.0 * q / (12.0 * pv) + 3.0 / 8.0 - pv / (12.0 * q)) * q * q;
    return 1.0 + first / nn + second / (nn * nn);
}

}  // namespace mixnorm
