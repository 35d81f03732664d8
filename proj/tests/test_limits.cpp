#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "mixnorm/limits.hpp"
#include "mixnorm/moments.hpp"
#include "mixnorm/special_functions.hpp"

using namespace mixnorm;

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

Exponent ex(double v) { return std::isinf(v) ? Exponent::infinity() : Exponent(v); }

RegimeParams make(double p1, double q1, double p2, double q2, std::optional<std::size_t> m,
                  std::optional<std::size_t> n) {
    RegimeParams r;
    r.p1 = ex(p1);
    r.q1 = ex(q1);
    r.p2 = ex(p2);
    r.q2 = ex(q2);
    r.m = m;
    r.n = n;
    return r;
}

// P[E + c chi2_dof >= x] by direct simulation.
std::pair<double, double> simulate_tail(std::size_t dof, double c, double x, std::size_t draws, RandomStream& s) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        double v = s.exponential();
        for (std::size_t k = 0; k < dof; ++k) {
            const double g = s.normal();
            v += c * g * g;
        }
        hits += v >= x ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / draws;
    return {p, std::sqrt(p * (1 - p) / draws)};
}

}  // namespace

TEST_CASE("A_{p,p} = 1") {
    for (double p : {0.3, 1.0, 2.0, 3.0, 11.0}) CHECK(threshold_A_lp(Exponent(p), p) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("A_{inf,2} against a 50-digit evaluation") {
    using Big = boost::multiprecision::cpp_dec_float_50;
    const Big half("0.5");
    const Big expected = Big(1) / boost::multiprecision::tgamma(Big("1.5")) * exp(-half) / sqrt(Big(2)) * sqrt(Big(3));
    CHECK(threshold_A_lp(Exponent::infinity(), 2.0) == doctest::Approx(expected.convert_to<double>()).epsilon(1e-14));
}

TEST_CASE("A_{p,q} against the direct formula") {
    for (auto [p, q] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {0.5, 3.0}, {4.0, 1.5}}) {
        const double m = std::pow(p, q / p) / (q + 1.0) * std::tgamma((q + 1.0) / p + 1.0) / std::tgamma(1.0 / p + 1.0);
        const double expected = std::tgamma(1.0 / p + 1.0) / std::tgamma(1.0 / q + 1.0) * std::exp(1.0 / p - 1.0 / q) *
                                std::pow(p, 1.0 / p) / std::pow(q, 1.0 / q) * std::pow(m, -1.0 / q);
        CHECK(threshold_A_lp(Exponent(p), q) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(threshold_A_lp(Exponent(2.0), std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("finite-n threshold at n = 1 is A_{p1,p2}") {
    for (auto [p1, p2] : {std::pair{1.0, 2.0}, {3.0, 0.5}, {kInf, 2.0}}) {
        RegimeParams r = make(p1, 0.7, p2, 3.0, std::nullopt, 1);
        CHECK(threshold_A_finite_n(r).value == doctest::Approx(threshold_A_lp(ex(p1), p2)).epsilon(1e-12));
    }
}

TEST_CASE("finite-n threshold needs the theta moment") {
    RegimeParams r = make(1.0, 2.0, 2.0, 1.0, std::nullopt, 10);
    CHECK_THROWS_AS(threshold_A_finite_n(r), DomainError);
    r.e_theta = Estimate{0.5, 0.01};
    const ThresholdValue tv = threshold_A_finite_n(r);
    CHECK(tv.std_error == doctest::Approx(tv.value * 0.01 / (2.0 * 0.5)));
    CHECK(tv.lower < tv.value);
    CHECK(tv.upper > tv.value);
    RegimeParams same = make(2.0, 2.0, 2.0, 2.0, std::nullopt, 10);
    CHECK_THROWS_AS(threshold_A_finite_n(same), DomainError);
}

TEST_CASE("expected theta norm shortcuts and drift") {
    const RandomStream s(21, 0);
    const Estimate same = expected_theta_norm(Exponent(3.0), Exponent(3.0), 2.0, 40, s, 1000);
    CHECK(same.value == 1.0);
    CHECK(same.std_error == 0.0);
    const Estimate one = expected_theta_norm(Exponent(3.0), Exponent(1.0), 2.0, 1, s, 1000);
    CHECK(one.value == 1.0);
    const double limit = std::pow(moment_M(Exponent(2.0), 1.0), 2.0);
    double previous_gap = 1.0;
    for (std::size_t n : {20, 200}) {
        const Estimate e = expected_theta_norm(Exponent(2.0), Exponent(1.0), 2.0, n, s, 20000);
        const double scaled = e.value * std::pow(static_cast<double>(n), 2.0 * (0.5 - 1.0));
        const double gap = std::fabs(scaled - limit);
        CHECK(gap < 0.05);
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("sigma^2 examples") {
    // q1 = inf conventions
    const double q2 = 2.0;
    const double v = 1.0 / (2 * q2 + 1) - 1.0 / ((q2 + 1) * (q2 + 1));
    const double mq = 1.0 / (q2 + 1);
    const RegimeParams d = make(1.0, kInf, 1.0, q2, 3, std::nullopt);
    CHECK(sigma2_regime(Regime::ColsGrowGaussian, d) == doctest::Approx(v / (3 * q2 * q2 * mq * mq)));
    const RegimeParams e = make(1.0, kInf, 1.0, q2, 3, 10);
    CHECK(sigma2_regime(Regime::BothGrowGaussian, e) == doctest::Approx(3.0 * sigma2_regime(Regime::ColsGrowGaussian, d)));

    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        CHECK(sigma2_regime(Regime::LpBall, make(1.0, p, 1.0, p, 1, std::nullopt)) == doctest::Approx(0.0).epsilon(1e-12));
    }
    for (double p : {0.5, 1.0, 2.0, 3.0, kInf}) {
        for (double q : {0.5, 1.0, 2.5, 4.0}) {
            if (p == q) continue;
            CAPTURE(p);
            CAPTURE(q);
            CHECK(sigma2_regime(Regime::LpBall, make(1.0, p, 1.0, q, 1, std::nullopt)) > 0.0);
        }
    }
}

TEST_CASE("rows-grow variance") {
    RegimeParams r = make(1.0, 2.0, 2.0, 2.0, std::nullopt, 3);
    const double s2 = sigma2_regime(Regime::RowsGrow, r);
    CHECK(s2 > 0.0);
    // q1 != q2 needs both theta moments
    RegimeParams needs = make(1.0, 2.0, 2.0, 1.0, std::nullopt, 3);
    CHECK_THROWS_AS(sigma2_regime(Regime::RowsGrow, needs), DomainError);
    needs.e_theta = Estimate{0.6, 0.0};
    needs.e_theta_sq = Estimate{0.4, 0.0};
    CHECK(std::isfinite(sigma2_regime(Regime::RowsGrow, needs)));
}

TEST_CASE("regime hypotheses") {
    CHECK_THROWS_AS(check_regime(Regime::ColsGrowGaussian, make(1.0, 2.0, 1.0, 2.0, 3, std::nullopt)), DomainError);
    CHECK_THROWS_AS(check_regime(Regime::ColsGrowGaussian, make(1.0, 2.0, 2.0, 2.0, 3, std::nullopt)), DomainError);
    CHECK_THROWS_AS(check_regime(Regime::ColsGrowExpSum, make(1.0, 2.0, 2.0, 2.0, 3, std::nullopt)), DomainError);
    CHECK_THROWS_AS(check_regime(Regime::ColsGrowExpChi, make(kInf, 2.0, 2.0, 2.0, 3, std::nullopt)), DomainError);
    CHECK_THROWS_AS(check_regime(Regime::ColsGrowExpChi, make(3.0, 2.0, 2.0, 2.0, std::nullopt, std::nullopt)), DomainError);
    CHECK_THROWS_AS(check_regime(Regime::RowsGrow, make(3.0, 2.0, kInf, 2.0, 3, 4)), DomainError);
    CHECK_THROWS_AS(check_regime(Regime::RowsGrow, make(3.0, 2.0, 1.0, 2.0, 3, std::nullopt)), DomainError);
    // E(b) with p1 = p2 is forced into (p1, q1) = (p2, q2)
    CHECK_THROWS_AS(check_regime(Regime::BothGrowScaled, make(2.0, 2.0, 2.0, 2.0, 3, 4)), DomainError);
    CHECK_NOTHROW(check_regime(Regime::BothGrowScaled, make(1.0, 2.0, 3.0, 2.0, 3, 4)));
}

TEST_CASE("limit law examples") {
    const LimitLaw c = limit_law(Regime::ColsGrowExpSum, make(kInf, 2.0, 1.0, 2.0, 3, std::nullopt));
    REQUIRE(std::holds_alternative<SumOfExponentials>(c));
    CHECK(std::get<SumOfExponentials>(c).m == 3);

    const LimitLaw b = limit_law(Regime::ColsGrowExpChi, make(2.0, 1.0, 1.0, 1.0, 1, std::nullopt));
    REQUIRE(std::holds_alternative<ExpPlusScaledChiSquare>(b));
    CHECK(std::get<ExpPlusScaledChiSquare>(b).dof == 0);
    CHECK(std::get<ExpPlusScaledChiSquare>(b).c == doctest::Approx(0.25));
    CHECK(limit_cdf(b, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));

    const LimitLaw e = limit_law(Regime::BothGrowScaled, make(1.0, 2.0, 3.0, 2.0, std::nullopt, std::nullopt));
    REQUIRE(std::holds_alternative<ScaledGaussian>(e));
    CHECK(std::get<ScaledGaussian>(e).sigma == doctest::Approx(2.0 / std::numbers::sqrt2));

    const LimitLaw s = limit_law(Regime::BothGrowStandard, make(kInf, 2.0, 1.0, 2.0, std::nullopt, std::nullopt));
    CHECK(std::get<ScaledGaussian>(s).sigma == 1.0);
    CHECK(describe(c).find("SumOfExponentials") != std::string::npos);
}

TEST_CASE("limit cdf values") {
    CHECK(limit_cdf(ScaledGaussian{2.0}, 0.0) == 0.5);
    CHECK(limit_cdf(ScaledGaussian{0.0}, -1e-9) == 0.0);
    CHECK(limit_cdf(ScaledGaussian{0.0}, 0.0) == 1.0);
    CHECK(limit_cdf(SumOfExponentials{1}, std::log(2.0)) == doctest::Approx(0.5));
    CHECK(limit_cdf(ExpPlusScaledChiSquare{0, 0.3}, std::log(2.0)) == doctest::Approx(0.5));
}

TEST_CASE("limit cdfs are monotone with the right limits") {
    const std::vector<LimitLaw> laws{ScaledGaussian{0.7},          SumOfExponentials{4},
                                     ExpPlusScaledChiSquare{3, 0.25}, ExpPlusScaledChiSquare{5, -0.6},
                                     ExpPlusScaledChiSquare{2, 0.7}};
    for (const auto& law : laws) {
        double prev = 0.0;
        for (double x = -30.0; x <= 60.0; x += 0.25) {
            const double f = limit_cdf(law, x);
            REQUIRE(f >= prev - 1e-12);
            REQUIRE(f >= 0.0);
            REQUIRE(f <= 1.0);
            prev = f;
        }
        CHECK(limit_cdf(law, -200.0) < 1e-9);
        CHECK(limit_cdf(law, 400.0) > 1.0 - 1e-9);
    }
}

TEST_CASE("closed-form exponential plus chi-square CDF agrees with quadrature") {
    for (std::size_t dof : {1, 2, 3, 5, 8}) {
        for (double c : {-2.0, -0.5, -0.1, 0.05, 0.25, 0.45}) {
            for (double x : {-6.0, -1.0, -0.01, 0.0, 0.2, 1.0, 3.0, 9.0}) {
                const double closed = 1.0 - exp_plus_chi_square_tail(dof, c, x);
                const double quad = exp_plus_chi_square_cdf_quadrature(dof, c, x);
                CAPTURE(dof);
                CAPTURE(c);
                CAPTURE(x);
                CHECK(std::fabs(closed - quad) <= 1e-8);
            }
        }
    }
}

TEST_CASE("closed form agrees with simulation") {
    RandomStream s(31, 0);
    const double p1 = 2.0, p2 = 1.0;
    const std::size_t m = 3;
    const double c = (p1 - p2) / (2 * p1);
    const double x0 = (m - 1) * std::log(p1 / p2) / 2.0;
    const auto [sim, se] = simulate_tail(m - 1, c, x0, 1000000, s);
    CHECK(std::fabs(exp_plus_chi_square_tail(m - 1, c, x0) - sim) <= 4 * se);
}

TEST_CASE("critical volume limits") {
    const double a = threshold_A_lp(Exponent(1.0), 2.0);
    const RegimeParams qdiff = make(3.0, 1.0, 2.0, 2.0, 3, std::nullopt);
    CHECK(critical_volume_limit(VolumeRegime::ColsGrow, qdiff, 1.0 / a).value == 0.5);
    CHECK(critical_volume_limit(VolumeRegime::ColsGrow, qdiff, 0.9 / a).value == 0.0);
    CHECK(critical_volume_limit(VolumeRegime::ColsGrow, qdiff, 1.1 / a).value == 1.0);

    const RegimeParams m1 = make(3.0, 2.0, 1.0, 2.0, 1, std::nullopt);
    CHECK(critical_volume_limit(VolumeRegime::ColsGrow, m1, 1.0).value == 1.0);  // A_{q,q} = 1
    const RegimeParams pinf = make(kInf, 2.0, 1.0, 2.0, 4, std::nullopt);
    CHECK(critical_volume_limit(VolumeRegime::ColsGrow, pinf, 1.0).value == 0.0);

    const RegimeParams m4 = make(2.0, 1.5, 1.0, 1.5, 4, std::nullopt);
    const VolumeLimit closed = critical_volume_limit(VolumeRegime::ColsGrow, m4, 1.0);
    CHECK(closed.kind == LimitKind::ClosedForm);
    const double x0 = 3.0 * std::log(2.0) / 2.0;
    CHECK(closed.value == doctest::Approx(1.0 - exp_plus_chi_square_cdf_quadrature(3, 0.25, x0)).epsilon(1e-9));

    const RegimeParams both = make(3.0, 1.0, 2.0, 2.0, std::nullopt, 100);
    CHECK_THROWS_AS(critical_volume_limit(VolumeRegime::BothGrow, both, 1.0 / a), DomainError);
    const double sigma = std::sqrt(sigma2_regime(Regime::BothGrowGaussian, both));
    CHECK(critical_volume_limit(VolumeRegime::BothGrow, both, 1.0 / a, 0.3).value ==
          doctest::Approx(normal_cdf(0.3 / sigma)));
    const RegimeParams both_same_q = make(3.0, 2.0, 2.0, 2.0, std::nullopt, 100);
    CHECK(critical_volume_limit(VolumeRegime::BothGrow, both_same_q, 1.0).value == 0.0);

    RegimeParams rows = make(1.0, 2.0, 2.0, 2.0, std::nullopt, 3);
    const double a_rows = threshold_A_finite_n(rows).value;
    CHECK(critical_volume_limit(VolumeRegime::RowsGrow, rows, 1.0 / a_rows).value == 0.5);
}

TEST_CASE("critical closed form is strictly below 1") {
    for (std::size_t m : {2, 3, 4, 6, 10, 40}) {
        for (auto [p1, p2] : {std::pair{2.0, 1.0}, {1.0, 3.0}, {5.0, 2.0}, {0.5, 0.6}, {10.0, 0.2}}) {
            const double v = critical_gamma_expression(m, p1, p2);
            CAPTURE(m);
            CAPTURE(p1);
            CAPTURE(p2);
            CHECK(v < 1.0);
            CHECK(v > 0.0);
        }
    }
}
