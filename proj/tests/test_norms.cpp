#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mixnorm/norms.hpp"

using namespace mixnorm;

namespace {

double naive_lp(const std::vector<double>& x, double p) {
    long double s = 0;
    for (double v : x) s += std::pow(std::fabs(static_cast<long double>(v)), static_cast<long double>(p));
    return static_cast<double>(std::pow(s, 1.0L / p));
}

}  // namespace

TEST_CASE("lp_norm basics") {
    const std::vector<double> x{3.0, -4.0};
    CHECK(lp_norm(x, Exponent(2.0)) == doctest::Approx(5.0));
    CHECK(lp_norm(x, Exponent(1.0)) == doctest::Approx(7.0));
    CHECK(lp_norm(x, Exponent::infinity()) == 4.0);
    CHECK(lp_norm(x, Exponent(0.5)) == doctest::Approx(std::pow(std::sqrt(3.0) + 2.0, 2.0)));
    CHECK_THROWS_AS(lp_norm(std::vector<double>{}, Exponent(2.0)), DomainError);
}

TEST_CASE("lp_norm survives extreme magnitudes") {
    const std::vector<double> big{1e200, 1e200};
    CHECK(lp_norm(big, Exponent(2.0)) == doctest::Approx(std::sqrt(2.0) * 1e200));
    const std::vector<double> tiny{1e-200, 1e-200};
    CHECK(lp_norm(tiny, Exponent(3.0)) == doctest::Approx(std::cbrt(2.0) * 1e-200));
    CHECK(lp_norm(std::vector<double>{0.0, 0.0}, Exponent(2.5)) == 0.0);
}

TEST_CASE("lp_norm matches naive evaluation") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> d;
    for (double p : {0.3, 1.0, 1.5, 2.0, 4.0, 9.0}) {
        std::vector<double> x(37);
        for (double& v : x) v = d(gen);
        CHECK(lp_norm(x, Exponent(p)) == doctest::Approx(naive_lp(x, p)).epsilon(1e-13));
        CHECK(lp_power_sum(x, p) == doctest::Approx(std::pow(naive_lp(x, p), p)).epsilon(1e-12));
    }
}

TEST_CASE("mixed norm definition") {
    Matrix x(2, 3, {1.0, -2.0, 2.0, 0.0, 3.0, 4.0});
    // row 2-norms: 3 and 5
    CHECK(mixed_norm(x, Exponent(1.0), Exponent(2.0)) == doctest::Approx(8.0));
    CHECK(mixed_norm(x, Exponent::infinity(), Exponent(2.0)) == doctest::Approx(5.0));
    CHECK(mixed_norm(x, Exponent(2.0), Exponent(2.0)) == doctest::Approx(std::sqrt(34.0)));
    // row inf-norms: 2 and 4
    CHECK(mixed_norm(x, Exponent(1.0), Exponent::infinity()) == doctest::Approx(6.0));
    CHECK(mixed_norm(x.data(), 2, 3, Exponent(1.0), Exponent(2.0)) == doctest::Approx(8.0));
}

TEST_CASE("mixed norm with p = q is the flat lp norm") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (double p : {0.5, 1.0, 2.0, 3.5}) {
        std::vector<double> v(4 * 7);
        for (double& e : v) e = d(gen);
        CHECK(mixed_norm(v, 4, 7, Exponent(p), Exponent(p)) == doctest::Approx(naive_lp(v, p)).epsilon(1e-13));
    }
}

TEST_CASE("mixed norm properties") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(15), b(15), s(15);
        for (std::size_t i = 0; i < 15; ++i) {
            a[i] = d(gen);
            b[i] = d(gen);
            s[i] = a[i] + b[i];
        }
        for (auto [p, q] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {3.0, 1.5}}) {
            const Exponent pe(p), qe(q);
            // triangle inequality for p, q >= 1
            CHECK(mixed_norm(s, 3, 5, pe, qe) <= mixed_norm(a, 3, 5, pe, qe) + mixed_norm(b, 3, 5, pe, qe) + 1e-12);
            // homogeneity
            std::vector<double> scaled(a);
            for (double& v : scaled) v *= -2.5;
            CHECK(mixed_norm(scaled, 3, 5, pe, qe) == doctest::Approx(2.5 * mixed_norm(a, 3, 5, pe, qe)));
        }
    }
}

TEST_CASE("order-k norm reduces to the order-2 norm") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> d;
    const std::size_t m = 4, n = 6;
    std::vector<double> v(m * n);
    for (double& e : v) e = d(gen);
    // The order-k layout puts the innermost level on the slowest index, so the
    // m x n matrix enters as its n x m transpose.
    std::vector<double> t(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[j * m + i] = v[i * n + j];
    }
    const Exponent p(1.5), q(3.0);
    const Tensor tensor({n, m}, t);
    CHECK(mixed_norm_k(tensor, MixedNormSpec::order2(p, q, m, n)) == doctest::Approx(mixed_norm(v, m, n, p, q)));
}

TEST_CASE("order-3 norm by hand") {
    // dims (2, 2, 2): level 1 over index 1, then index 2, then index 3.
    std::vector<double> data{1, 2, 3, 4, 5, 6, 7, 8};
    const Tensor x({2, 2, 2}, data);
    const MixedNormSpec spec({{Exponent(1.0), 2}, {Exponent::infinity(), 2}, {Exponent(2.0), 2}});
    // index (i1, i2, i3) -> data[i1*4 + i2*2 + i3]
    double outer = 0.0;
    for (int i3 = 0; i3 < 2; ++i3) {
        double mid = 0.0;
        for (int i2 = 0; i2 < 2; ++i2) {
            double inner = 0.0;
            for (int i1 = 0; i1 < 2; ++i1) inner += std::fabs(data[i1 * 4 + i2 * 2 + i3]);
            mid = std::max(mid, inner);
        }
        outer += mid * mid;
    }
    CHECK(mixed_norm_k(x, spec) == doctest::Approx(std::sqrt(outer)));
    CHECK_THROWS_AS(Tensor({2, 3}, data), DomainError);
}
