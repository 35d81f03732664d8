#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixnorm/exponent.hpp"
#include "mixnorm/limits.hpp"
#include "mixnorm/random.hpp"

namespace mixnorm {

struct MonteCarloResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double wall_time = 0.0;  // seconds
};

struct KsReport {
    double statistic = 0.0;
    std::size_t n_samples = 0;
    std::string reference;
    double threshold = 0.0;
    bool pass = false;
};

/// Null 99% quantile of sqrt(N) * KS, the base of every KS threshold.
inline constexpr double kKsNullQuantile = 1.63;

/// V^{m,n}(t) = P[||X||_{p2,q2} <= (r1 / r2) t] with X ~ Unif(B_{p1,q1}^{m,n}),
/// r the normalized radii. Proportion of N draws with binomial stderr.
MonteCarloResult estimate_intersection_volume(Exponent p1, Exponent q1, Exponent p2, Exponent q2, std::size_t m,
                                              std::size_t n, double t, std::size_t samples,
                                              const RandomStream& stream, unsigned workers = 1);

/// ||X||_{p2,q2} for N draws X ~ Unif(B_{p1,q1}^{m,n}), in draw order.
std::vector<double> sample_mixed_norms(Exponent p1, Exponent q1, Exponent p2, Exponent q2, std::size_t m,
                                       std::size_t n, std::size_t samples, const RandomStream& stream,
                                       unsigned workers = 1);

/// 2^{mn} times the fraction of Unif([-1, 1]^{mn}) draws inside B_{p,q}^{m,n}.
/// Requires mn <= 20.
MonteCarloResult hit_or_miss_volume(Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t samples,
                                    const RandomStream& stream, unsigned workers = 1);

/// N realizations of the finite-(m, n) normalized statistic of `regime`.
/// Both m and n must be set. Missing E[||Theta_1||^{p2}] values are estimated
/// with `theta_samples` draws on a stream disjoint from the statistic draws.
/// For Regime::LpBall the ball is B_{q1}^n (m = 1) and the norm is q2.
std::vector<double> clt_statistic_samples(Regime regime, const RegimeParams& params, std::size_t samples,
                                          const RandomStream& stream, unsigned workers = 1,
                                          std::size_t theta_samples = 100000);

/// Exact one-sample KS statistic sup |F_N - F|.
KsReport ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf, double threshold,
                     std::string reference = "reference");

/// CDF of |xi|^{1/n} with xi ~ N_{p/n}; r^n for p = inf.
double radial_reference_cdf(Exponent p, std::size_t n, double r);

/// CDF of the q-generalized Gaussian N_q; Unif[-1, 1] for q = inf.
double p_gaussian_cdf(Exponent q, double x);

enum class PmbKind {
    Radial,   ///< m^{1/p} R_i, i <= k, against |xi|^{1/n}
    Entries,  ///< m^{1/p} n^{1/q} X_{i,j}, i <= k, j <= l, against N_q
};

struct PmbReport {
    std::vector<KsReport> coordinates;
    /// Largest |Pearson correlation| between distinct scaled coordinates,
    /// taken on absolute values (signs are independent by construction).
    double max_abs_correlation = 0.0;
};

PmbReport pmb_check(PmbKind kind, Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t k, std::size_t l,
                    std::size_t samples, const RandomStream& stream, double threshold, unsigned workers = 1);

/// KS distance between the empirical measure of {m^{1/p} R_i}_{i <= m} from a
/// single draw and the law of |xi|^{1/n}; the median over `trials`
/// independent draws is reported. Requires m >= 1000.
KsReport empirical_measure_check(Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t trials,
                                 const RandomStream& stream, double threshold, unsigned workers = 1);

enum class SweepScale {
    Absolute,   ///< t values used as given
    InverseA,   ///< t = factor / A per cell
};

struct SweepConfig {
    Exponent p1 = Exponent::infinity();
    Exponent q1 = Exponent::infinity();
    Exponent p2 = Exponent(1.0);
    Exponent q2 = Exponent(1.0);
    VolumeRegime regime = VolumeRegime::ColsGrow;
    std::vector<std::size_t> m_schedule;
    std::vector<std::size_t> n_schedule;
    std::vector<double> t_values;
    SweepScale scale = SweepScale::InverseA;
    std::size_t samples = 100000;
    std::size_t theta_samples = 100000;
    /// Limit M for the BothGrow critical case, if known.
    std::optional<double> critical_m;
};

struct SweepCell {
    std::size_t m = 0;
    std::size_t n = 0;
    double t_input = 0.0;
    double t = 0.0;
    double threshold_a = 0.0;
    double threshold_a_std_error = 0.0;
    VolumeRegime regime = VolumeRegime::ColsGrow;
    /// Predicted limit of V(t) for the cell's t A; NaN where undetermined.
    double predicted_limit = 0.0;
    MonteCarloResult volume;
};

/// Intersection-volume grid over m_schedule x n_schedule x t_values. One
/// batch of sorted norms per (m, n) cell serves every t, so estimates are
/// exactly monotone in t.
std::vector<SweepCell> threshold_sweep(const SweepConfig& config, const RandomStream& stream, unsigned workers = 1);

}  // namespace mixnorm
