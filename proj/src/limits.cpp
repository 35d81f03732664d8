#include "mixnorm/limits.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "mixnorm/moments.hpp"
#include "mixnorm/norms.hpp"
#include "mixnorm/parallel.hpp"
#include "mixnorm/samplers.hpp"
#include "mixnorm/special_functions.hpp"
#include "mixnorm/volumes.hpp"

namespace mixnorm {
namespace {

constexpr double kCriticalTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t require_m(const RegimeParams& params) {
    if (!params.m || *params.m == 0) throw DomainError("regime requires a fixed m >= 1");
    return *params.m;
}

std::size_t require_n(const RegimeParams& params) {
    if (!params.n || *params.n == 0) throw DomainError("regime requires a fixed n >= 1");
    return *params.n;
}

bool same_ball(const RegimeParams& params) { return params.p1 == params.p2 && params.q1 == params.q2; }

// (E[||Theta||^{p2}], E[||Theta||^{2 p2}]) with the exact shortcuts.
std::pair<double, double> theta_moments(const RegimeParams& params) {
    const std::size_t n = require_n(params);
    if (params.q1 == params.q2 || n == 1) return {1.0, 1.0};
    if (!params.e_theta || !params.e_theta_sq) {
        throw DomainError("E[||Theta_1||^p2] and E[||Theta_1||^(2 p2)] estimates are required");
    }
    return {params.e_theta->value, params.e_theta_sq->value};
}

// V_q1^q1 / q1^2 - 2 C_q1^{q1,q2} / (q1 q2 M_q1^q2) + V_q1^q2 / (q2 M_q1^q2)^2
double gaussian_core(Exponent q1, double q2) {
    const double mq = moment_M(q1, q2);
    const double third = var_V(q1, q2) / ((q2 * mq) * (q2 * mq));
    if (q1.is_infinite()) return third;  // first two terms carry a 1/q1 factor
    const double qv = q1.value();
    const double first = var_V(q1, qv) / (qv * qv);
    const double second = 2.0 * cov_C(q1, qv, q2) / (qv * q2 * mq);
    return first - second + third;
}

double clamp_variance(double v) { return v < 0.0 && v > -1e-12 ? 0.0 : v; }

}  // namespace

std::string describe(const LimitLaw& law) {
    return std::visit(Overloaded{
                          [](const ScaledGaussian& g) { return "ScaledGaussian(sigma=" + std::to_string(g.sigma) + ")"; },
                          [](const SumOfExponentials& s) { return "SumOfExponentials(m=" + std::to_string(s.m) + ")"; },
                          [](const ExpPlusScaledChiSquare& e) {
                              return "ExpPlusScaledChiSquare(dof=" + std::to_string(e.dof) + ", c=" + std::to_string(e.c) +
                                     ")";
                          },
                      },
                      law);
}

double exp_plus_chi_square_tail(std::size_t dof, double c, double x) {
    if (std::isnan(x)) throw DomainError("exp_plus_chi_square_tail: x is NaN");
    if (dof == 0 || c == 0.0) return x <= 0.0 ? 1.0 : std::exp(-x);
    if (!(c < 0.5)) throw DomainError("closed form requires c < 1/2");
    const double k = 0.5 * static_cast<double>(dof);
    // e^{-x} (1 - 2c)^{-k}: the exponential factor picked up where E >= x - cS
    // is not automatic; combined with the chi-square density it becomes a
    // Gamma(k, 2 / (1 - 2c)) density.
    const double log_factor = -x - k * std::log1p(-2.0 * c);
    const double tilted_scale = 2.0 / (1.0 - 2.0 * c);
    auto weighted = [&](double prob) { return prob > 0.0 ? std::exp(log_factor + std::log(prob)) : 0.0; };

    if (c > 0.0) {
        if (x <= 0.0) return 1.0;
        const double split = x / c;
        return regularized_gamma_sf(k, 2.0, split) + weighted(regularized_gamma_cdf(k, tilted_scale, split));
    }
    if (x >= 0.0) return std::exp(log_factor);
    const double split = x / c;
    return regularized_gamma_cdf(k, 2.0, split) + weighted(regularized_gamma_sf(k, tilted_scale, split));
}

double exp_plus_chi_square_cdf_quadrature(std::size_t dof, double c, double x) {
    if (x <= 0.0 && c >= 0.0) return 0.0;
    if (dof == 0 || c == 0.0) return x <= 0.0 ? 0.0 : -std::expm1(-x);
    const double k = 0.5 * static_cast<double>(dof);
    // CDF(x) = int_0^inf e^{-e} P[c S <= x - e] de, S ~ Gamma(k, 2)
    if (c > 0.0) {
        boost::math::quadrature::tanh_sinh<double> integrator;
        auto f = [&](double e) { return std::exp(-e) * boost::math::gamma_p(k, std::max(0.0, x - e) / (2.0 * c)); };
        return integrator.integrate(f, 0.0, x, 1e-14);
    }
    const double a = -c;
    const double start = std::max(0.0, x);
    const double head = -std::expm1(-start);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double u) {
        const double e = start + u;
        return std::exp(-e) * boost::math::gamma_q(k, std::max(0.0, e - x) / (2.0 * a));
    };
    return head + integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

double limit_cdf(const LimitLaw& law, double x) {
    return std::visit(Overloaded{
                          [x](const ScaledGaussian& g) {
                              if (g.sigma == 0.0) return x < 0.0 ? 0.0 : 1.0;
                              return normal_cdf(x / g.sigma);
                          },
                          [x](const SumOfExponentials& s) {
                              if (s.m == 0) throw DomainError("SumOfExponentials requires m >= 1");
                              return regularized_gamma_cdf(static_cast<double>(s.m), 1.0, x);
                          },
                          [x](const ExpPlusScaledChiSquare& e) {
                              if (e.c < 0.5) return std::clamp(1.0 - exp_plus_chi_square_tail(e.dof, e.c, x), 0.0, 1.0);
                              return std::clamp(exp_plus_chi_square_cdf_quadrature(e.dof, e.c, x), 0.0, 1.0);
                          },
                      },
                      law);
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::RowsGrow: return "thm-c";
        case Regime::ColsGrowGaussian: return "thm-d-a";
        case Regime::ColsGrowExpChi: return "thm-d-b";
        case Regime::ColsGrowExpSum: return "thm-d-c";
        case Regime::BothGrowGaussian: return "thm-e-a";
        case Regime::BothGrowScaled: return "thm-e-b";
        case Regime::BothGrowStandard: return "thm-e-c";
        case Regime::LpBall: return "lp-ball";
    }
    return "?";
}

std::string to_string(VolumeRegime c) {
    switch (c) {
        case VolumeRegime::RowsGrow: return "cor-1-6";
        case VolumeRegime::ColsGrow: return "cor-1-7";
        case VolumeRegime::BothGrow: return "cor-1-8";
    }
    return "?";
}

void check_regime(Regime regime, const RegimeParams& params) {
    if (regime == Regime::LpBall) {
        if (params.q2.is_infinite()) throw DomainError("lp-ball regime requires a finite q");
        return;
    }
    // The exponential-plus-chi-square limit stays valid for p1 = p2, where it
    // degenerates to Exp(1); every other regime needs distinct balls.
    if (same_ball(params) && regime != Regime::ColsGrowExpChi) {
        throw DomainError("regime requires (p1, q1) != (p2, q2)");
    }
    if (params.p2.is_infinite()) throw DomainError("regime requires a finite p2");
    if (regime == Regime::RowsGrow) {
        require_n(params);
        return;
    }
    if (params.q2.is_infinite()) throw DomainError("regime requires a finite q2");
    const bool q_equal = params.q1 == params.q2;
    switch (regime) {
        case Regime::ColsGrowGaussian:
        case Regime::BothGrowGaussian:
            if (q_equal) throw DomainError("Gaussian regime requires q1 != q2");
            break;
        case Regime::ColsGrowExpChi:
        case Regime::BothGrowScaled:
            if (!q_equal || params.p1.is_infinite()) throw DomainError("regime requires q1 = q2 and p1 < inf");
            break;
        case Regime::ColsGrowExpSum:
        case Regime::BothGrowStandard:
            if (!q_equal || params.p1.is_finite()) throw DomainError("regime requires q1 = q2 and p1 = inf");
            break;
        default:
            break;
    }
    switch (regime) {
        case Regime::ColsGrowGaussian:
        case Regime::ColsGrowExpChi:
        case Regime::ColsGrowExpSum:
            require_m(params);
            break;
        default:
            break;
    }
}

double threshold_A_lp(Exponent p, double q) {
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("threshold_A_lp requires a finite q > 0");
    const Exponent qe(q);
    const double log_gamma_p = p.is_infinite() ? 0.0 : log_gamma(p.reciprocal() + 1.0);
    const double log_a = log_gamma_p - log_gamma(1.0 / q + 1.0) + (p.reciprocal() - 1.0 / q) + p.log_self_root() -
                         qe.log_self_root() - std::log(moment_M(p, q)) / q;
    return std::exp(log_a);
}

Estimate expected_theta_norm(Exponent q1, Exponent q2, double p2, std::size_t n, const RandomStream& stream,
                             std::size_t samples, unsigned workers, bool power_sq) {
    if (n == 0) throw DomainError("expected_theta_norm requires n >= 1");
    if (!(p2 > 0.0) || !std::isfinite(p2)) throw DomainError("expected_theta_norm requires a finite p2 > 0");
    if (q1 == q2 || n == 1) return {1.0, 0.0};
    if (samples < 1000) throw DomainError("expected_theta_norm requires at least 1000 samples");
    const double power = power_sq ? 2.0 * p2 : p2;

    struct Partial {
        long double sum = 0.0L;
        long double sum_sq = 0.0L;
    };
    const auto partials = parallel_chunks(samples, 256, workers, [&](std::size_t begin, std::size_t end) {
        Partial part;
        std::vector<double> theta(n);
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream s = stream.child(i);
            sample_cone_measure_into(q1, theta, s);
            const long double v = std::pow(lp_norm(theta, q2), power);
            part.sum += v;
            part.sum_sq += v * v;
        }
        return part;
    });
    long double sum = 0.0L, sum_sq = 0.0L;
    for (const auto& p : partials) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    const long double count = static_cast<long double>(samples);
    const long double mean = sum / count;
    const long double var = std::max(0.0L, (sum_sq - count * mean * mean) / (count - 1.0L));
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / count))};
}

ThresholdValue threshold_A_finite_n(const RegimeParams& params) {
    if (same_ball(params)) throw DomainError("threshold requires (p1, q1) != (p2, q2)");
    if (params.p2.is_infinite()) throw DomainError("threshold requires a finite p2");
    const std::size_t n = require_n(params);
    double e_theta = 1.0;
    double e_stderr = 0.0;
    if (!(params.q1 == params.q2 || n == 1)) {
        if (!params.e_theta) throw DomainError("threshold requires an E[||Theta_1||^p2] estimate");
        e_theta = params.e_theta->value;
        e_stderr = params.e_theta->std_error;
    }
    const double nn = static_cast<double>(n);
    const double p2 = params.p2.value();
    const Exponent p1 = params.p1;
    const double lg_p1 = p1.is_infinite() ? 0.0 : log_gamma(nn / p1.value() + 1.0);
    const double ball_part = (lp_ball_log_volume(n, params.q1).log_value + lg_p1 -
                              lp_ball_log_volume(n, params.q2).log_value - log_gamma(nn / p2 + 1.0)) /
                             nn;
    const double exponent_diff = p1.reciprocal() - 1.0 / p2;
    const double m_value = moment_M(p1.scaled_down(nn), p2 / nn);
    const double log_rest = ball_part + exponent_diff * (1.0 - std::log(nn)) + p1.log_self_root() -
                            std::log(p2) / p2 - std::log(m_value) / p2;

    auto at = [&](double e) {
        if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
        return std::exp(log_rest - std::log(e) / p2);
    };
    const double value = at(e_theta);
    return {value, value * e_stderr / (p2 * e_theta), at(e_theta + e_stderr), at(e_theta - e_stderr)};
}

double sigma2_regime(Regime regime, const RegimeParams& params) {
    check_regime(regime, params);
    switch (regime) {
        case Regime::LpBall:
            return clamp_variance(gaussian_core(params.q1, params.q2.value()));
        case Regime::ColsGrowGaussian:
            return clamp_variance(gaussian_core(params.q1, params.q2.value()) / static_cast<double>(require_m(params)));
        case Regime::BothGrowGaussian:
            return clamp_variance(gaussian_core(params.q1, params.q2.value()));
        case Regime::RowsGrow: {
            const double nn = static_cast<double>(require_n(params));
            const double p2 = params.p2.value();
            const Exponent p1n = params.p1.scaled_down(nn);
            const auto [e1, e2] = theta_moments(params);
            const double m1 = moment_M(p1n, p2 / nn);
            const double m2 = moment_M(p1n, 2.0 * p2 / nn);
            const double c = cov_C(p1n, p1n, Exponent(p2 / nn));
            const double first = params.p1.divide_into(1.0 / nn);
            const double third = params.p1.divide_into(2.0 * c / (p2 * m1));
            const double denom = p2 * m1 * e1;
            return clamp_variance(first - 1.0 / (p2 * p2) - third + m2 * e2 / (denom * denom));
        }
        default:
            throw DomainError("regime " + to_string(regime) + " has no Gaussian variance");
    }
}

LimitLaw limit_law(Regime regime, const RegimeParams& params) {
    check_regime(regime, params);
    switch (regime) {
        case Regime::RowsGrow:
        case Regime::ColsGrowGaussian:
        case Regime::BothGrowGaussian:
        case Regime::LpBall:
            return ScaledGaussian{std::sqrt(sigma2_regime(regime, params))};
        case Regime::ColsGrowExpChi: {
            const double p1 = params.p1.value();
            const double p2 = params.p2.value();
            return ExpPlusScaledChiSquare{require_m(params) - 1, (p1 - p2) / (2.0 * p1)};
        }
        case Regime::ColsGrowExpSum:
            return SumOfExponentials{require_m(params)};
        case Regime::BothGrowScaled: {
            const double p1 = params.p1.value();
            const double p2 = params.p2.value();
            return ScaledGaussian{std::fabs(p2 - p1) / (std::numbers::sqrt2 * p1)};
        }
        case Regime::BothGrowStandard:
            return ScaledGaussian{1.0};
    }
    throw DomainError("unknown regime");
}

double critical_gamma_expression(std::size_t m, double p1, double p2) {
    if (m < 2) throw DomainError("critical gamma expression requires m >= 2");
    if (!(p1 > 0.0) || !(p2 > 0.0) || p1 == p2) throw DomainError("critical gamma expression requires p1 != p2 > 0");
    const double k = 0.5 * static_cast<double>(m - 1);
    const double crossover = p1 * static_cast<double>(m - 1) * std::log(p1 / p2) / (p1 - p2);
    const double ratio = p1 / p2;
    return regularized_gamma_cdf(k, 2.0 * std::max(1.0, ratio), crossover) +
           regularized_gamma_sf(k, 2.0 * std::min(1.0, ratio), crossover);
}

double volume_threshold(VolumeRegime regime, const RegimeParams& params) {
    if (regime == VolumeRegime::RowsGrow) return threshold_A_finite_n(params).value;
    if (params.q2.is_infinite()) throw DomainError("threshold A_{q1,q2} requires a finite q2");
    return threshold_A_lp(params.q1, params.q2.value());
}

VolumeLimit critical_volume_limit(VolumeRegime regime, const RegimeParams& params, double t,
                                  std::optional<double> critical_m) {
    if (!(t > 0.0)) throw DomainError("dilation t must be > 0");
    if (same_ball(params)) throw DomainError("volume limits require (p1, q1) != (p2, q2)");
    if (params.p2.is_infinite()) throw DomainError("volume limits require a finite p2");
    if (regime != VolumeRegime::RowsGrow && params.q2.is_infinite()) {
        throw DomainError("volume limits with n -> inf require a finite q2");
    }
    const double a = volume_threshold(regime, params);
    const double scaled = t * a;
    if (scaled < 1.0 - kCriticalTolerance) return {0.0, LimitKind::Zero};
    if (scaled > 1.0 + kCriticalTolerance) return {1.0, LimitKind::One};

    const bool q_equal = params.q1 == params.q2;
    switch (regime) {
        case VolumeRegime::RowsGrow:
            return {0.5, LimitKind::Half};
        case VolumeRegime::ColsGrow: {
            if (!q_equal) return {0.5, LimitKind::Half};
            if (params.p1.is_infinite()) return {0.0, LimitKind::Zero};
            const std::size_t m = require_m(params);
            if (m == 1) return {1.0, LimitKind::One};
            return {critical_gamma_expression(m, params.p1.value(), params.p2.value()), LimitKind::ClosedForm};
        }
        case VolumeRegime::BothGrow: {
            if (q_equal) return {0.0, LimitKind::Zero};
            if (!critical_m) throw DomainError("critical value needs the limit M, which is not determined here");
            const double sigma = std::sqrt(sigma2_regime(Regime::BothGrowGaussian, params));
            const double mval = *critical_m;
            if (std::isinf(mval)) return {mval > 0 ? 1.0 : 0.0, LimitKind::Gaussian};
            return {normal_cdf(mval / sigma), LimitKind::Gaussian};
        }
    }
    throw DomainError("unknown volume regime");
}

}  // namespace mixnorm
