#pragma once

#include "mixnorm/exponent.hpp"

namespace mixnorm {

/// ln Gamma(a + delta) - ln Gamma(a), accurate when delta is small relative
/// to a (where the naive difference cancels).
double log_gamma_ratio(double a, double delta);

/// M_p^alpha: the absolute alpha-moment of the p-generalized Gaussian,
///
///   M_p^alpha = p^(alpha/p) / (alpha + 1) * Gamma((alpha + 1)/p + 1) / Gamma(1/p + 1),
///
/// evaluated in log space. For p = inf this is 1 / (alpha + 1).
double moment_M(Exponent p, double alpha);

/// Overload carrying the convention M_inf^inf = 1. A finite p with an
/// infinite alpha is a DomainError.
double moment_M(Exponent p, Exponent alpha);

/// C_p^{alpha,beta} = M_p^{alpha+beta} - M_p^alpha M_p^beta.
double cov_C(Exponent p, double alpha, double beta);

/// Convention-aware covariance: C_inf^{inf,beta} = 0 (either slot may carry
/// the infinite index).
double cov_C(Exponent p, Exponent alpha, Exponent beta);

/// V_p^alpha = C_p^{alpha,alpha}.
double var_V(Exponent p, double alpha);

/// Convention-aware variance: V_inf^inf = 0.
double var_V(Exponent p, Exponent alpha);

struct MomentTriple {
    double m_alpha;
    double c_alpha_beta;
    double v_alpha;
};

MomentTriple moment_triple(Exponent p, double alpha, double beta);

/// Large-n expansion of M_{p/n}^{q/n}: two-term expansion in 1/n for finite
/// p, the geometric series sum_k (-q/n)^k for p = inf (requires q < n).
/// Intended only as a cross-check of moment_M.
double moment_M_asymptotic(Exponent p, double q, long n);

}  // namespace mixnorm
