#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "mixnorm/exponent.hpp"
#include "mixnorm/random.hpp"

namespace mixnorm {

// ---------------------------------------------------------------------------
// Limit laws
// ---------------------------------------------------------------------------

/// sigma * N with N standard normal; sigma = 0 is the point mass at 0.
struct ScaledGaussian {
    double sigma;
};

/// E_1 + ... + E_m with E_i i.i.d. Exp(1), i.e. Gamma(m, 1).
struct SumOfExponentials {
    std::size_t m;
};

/// E + c * (N_1^2 + ... + N_dof^2) with E ~ Exp(1) independent of the
/// chi-square part; dof = 0 (or c = 0) is plain Exp(1).
struct ExpPlusScaledChiSquare {
    std::size_t dof;
    double c;
};

using LimitLaw = std::variant<ScaledGaussian, SumOfExponentials, ExpPlusScaledChiSquare>;

std::string describe(const LimitLaw& law);

/// Exact CDF of a limit law at x.
double limit_cdf(const LimitLaw& law, double x);

/// P[E + c chi2_dof >= x] in closed form (sums of regularized incomplete
/// gammas). Valid for c < 1/2; throws DomainError otherwise.
double exp_plus_chi_square_tail(std::size_t dof, double c, double x);

/// CDF of E + c chi2_dof by one-dimensional adaptive quadrature over the
/// exponential part. Any c; used as an independent check of the closed form.
double exp_plus_chi_square_cdf_quadrature(std::size_t dof, double c, double x);

// ---------------------------------------------------------------------------
// Regimes
// ---------------------------------------------------------------------------

/// Asymptotic regimes for ||X||_{p2,q2} with X ~ Unif(B_{p1,q1}^{m,n}).
enum class Regime {
    RowsGrow,           ///< m -> inf, n fixed: Gaussian
    ColsGrowGaussian,   ///< m fixed, n -> inf, q1 != q2: Gaussian
    ColsGrowExpChi,     ///< m fixed, n -> inf, q1 = q2, p1 < inf: E + c chi2_{m-1}
    ColsGrowExpSum,     ///< m fixed, n -> inf, q1 = q2, p1 = inf: Gamma(m, 1)
    BothGrowGaussian,   ///< m, n -> inf, q1 != q2: Gaussian
    BothGrowScaled,     ///< m, n -> inf, q1 = q2, p1 < inf: |p2 - p1| / (sqrt2 p1) N
    BothGrowStandard,   ///< m, n -> inf, q1 = q2, p1 = inf: N
    LpBall,             ///< single l_p ball (m = 1), p := q1 and q := q2
};

/// Which dimension drives a volume-threshold statement.
enum class VolumeRegime {
    RowsGrow,   ///< m -> inf with n fixed; threshold A_{p1,q1;p2,q2;n}
    ColsGrow,   ///< n -> inf with m fixed; threshold A_{q1,q2}
    BothGrow,   ///< m, n -> inf; threshold A_{q1,q2}
};

std::string to_string(Regime r);
std::string to_string(VolumeRegime c);

/// Monte Carlo estimate carried with its standard error.
struct Estimate {
    double value;
    double std_error;
};

/// Parameters of a limit regime. An unset m or n means "tends to infinity".
struct RegimeParams {
    Exponent p1 = Exponent::infinity();
    Exponent q1 = Exponent::infinity();
    Exponent p2 = Exponent(1.0);
    Exponent q2 = Exponent(1.0);
    std::optional<std::size_t> m;
    std::optional<std::size_t> n;
    /// E[||Theta_1||_{q2}^{p2}], Theta_1 ~ cone measure on S_{q1}^{n-1}.
    std::optional<Estimate> e_theta;
    /// E[||Theta_1||_{q2}^{2 p2}] (needed for the RowsGrow variance).
    std::optional<Estimate> e_theta_sq;
};

/// Throws DomainError unless the hypotheses of `regime` hold for `params`.
void check_regime(Regime regime, const RegimeParams& params);

// ---------------------------------------------------------------------------
// Threshold constants
// ---------------------------------------------------------------------------

/// A_{p,q} = Gamma(1/p+1)/Gamma(1/q+1) e^{1/p-1/q} p^{1/p}/q^{1/q} (M_p^q)^{-1/q}
/// for p in (0, inf] and finite q. Serves as A_{q1,q2} as well.
double threshold_A_lp(Exponent p, double q);

/// E[||Theta_1||_{q2}^{p2}] by Monte Carlo with Theta_1 ~ cone measure on
/// S_{q1}^{n-1}; exact (1, 0) when q2 = q1 or n = 1. When `power_sq` is
/// set, returns the 2 p2 moment instead.
Estimate expected_theta_norm(Exponent q1, Exponent q2, double p2, std::size_t n, const RandomStream& stream,
                             std::size_t samples, unsigned workers = 1, bool power_sq = false);

/// Finite-n threshold A_{p1,q1;p2,q2;n} with its standard error propagated
/// from params.e_theta.
struct ThresholdValue {
    double value;
    double std_error;
    double lower;
    double upper;
};
ThresholdValue threshold_A_finite_n(const RegimeParams& params);

// ---------------------------------------------------------------------------
// Variances and limit laws
// ---------------------------------------------------------------------------

/// Variance of the Gaussian limit in regimes RowsGrow, ColsGrowGaussian,
/// BothGrowGaussian and LpBall.
double sigma2_regime(Regime regime, const RegimeParams& params);

LimitLaw limit_law(Regime regime, const RegimeParams& params);

// ---------------------------------------------------------------------------
// Volume limits
// ---------------------------------------------------------------------------

enum class LimitKind { Zero, Half, One, ClosedForm, Gaussian };

struct VolumeLimit {
    double value;
    LimitKind kind;
};

/// Threshold constant of a volume regime: A_{p1,q1;p2,q2;n} for RowsGrow
/// (requires params.n and params.e_theta), A_{q1,q2} otherwise.
double volume_threshold(VolumeRegime regime, const RegimeParams& params);

/// Limit of V^{m,n}(t), the volume of the intersection of the unit-volume
/// (p1,q1)-ball with t times the unit-volume (p2,q2)-ball. The critical case
/// is |t A - 1| <= 1e-12. For BothGrow with q1 != q2 the critical value is
/// Phi(M / sigma) and needs `critical_m` (the limit M, possibly +-inf);
/// without it a DomainError is thrown.
VolumeLimit critical_volume_limit(VolumeRegime regime, const RegimeParams& params, double t,
                                  std::optional<double> critical_m = std::nullopt);

/// Critical value for ColsGrow with q1 = q2, p1 < inf, m >= 2:
///   Gamma((m-1)/2, 2 max{1, p1/p2})((0, x*]) + Gamma((m-1)/2, 2 min{1, p1/p2})((x*, inf)),
///   x* = p1 (m-1) log(p1/p2) / (p1 - p2).
double critical_gamma_expression(std::size_t m, double p1, double p2);

}  // namespace mixnorm
