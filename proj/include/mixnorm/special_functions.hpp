#pragma once

namespace mixnorm {

/// ln Gamma(x) for x > 0. Throws DomainError for x <= 0.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series expansion below x < a + 1, Lentz continued fraction above.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), evaluated
/// without cancellation on the branch where it is the primary quantity.
double regularized_gamma_q(double a, double x);

/// CDF of Gamma(shape, scale) at x: 0 for x <= 0, 1 at +inf.
double regularized_gamma_cdf(double shape, double scale, double x);

/// Survival function 1 - regularized_gamma_cdf, accurate in the upper tail.
double regularized_gamma_sf(double shape, double scale, double x);

/// Standard normal CDF Phi.
double normal_cdf(double x);

}  // namespace mixnorm
