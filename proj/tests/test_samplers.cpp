#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mixnorm/experiments.hpp"
#include "mixnorm/norms.hpp"
#include "mixnorm/samplers.hpp"

using namespace mixnorm;

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

Exponent ex(double v) { return std::isinf(v) ? Exponent::infinity() : Exponent(v); }

}  // namespace

TEST_CASE("draws lie in the ball") {
    RandomStream s(10, 0);
    for (double p : {0.4, 1.0, 2.0, kInf}) {
        for (double q : {0.6, 1.0, 3.0, kInf}) {
            for (int i = 0; i < 50; ++i) {
                const MatrixSample x = sample_mixed_ball(ex(p), ex(q), 3, 4, s);
                REQUIRE(mixed_norm(x.values, ex(p), ex(q)) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("sample records provenance") {
    RandomStream s(99, 5);
    const MatrixSample x = sample_mixed_ball(Exponent(2.0), Exponent(1.0), 2, 3, s);
    CHECK(x.seed == 99);
    CHECK(x.stream_id == 5);
    CHECK(x.values.rows() == 2);
    CHECK(x.values.cols() == 3);
}

TEST_CASE("cone measure draws lie on the sphere") {
    RandomStream s(11, 0);
    for (double q : {0.3, 1.0, 2.0, 7.0, kInf}) {
        for (int i = 0; i < 100; ++i) {
            const auto theta = sample_cone_measure(ex(q), 9, s);
            REQUIRE(lp_norm(theta, ex(q)) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("mixed norm of a uniform draw has CDF t^{mn}") {
    // vol(t B) = t^{mn} vol(B)
    for (auto [p, q, m, n] : {std::tuple{2.0, 1.0, 3, 4}, {kInf, 0.5, 2, 2}, {0.7, kInf, 4, 2}}) {
        RandomStream s(112, 0);
        std::vector<double> norms(20000);
        for (double& v : norms) {
            const MatrixSample x = sample_mixed_ball(ex(p), ex(q), m, n, s);
            v = mixed_norm(x.values, ex(p), ex(q));
        }
        const double dim = m * n;
        const KsReport r = ks_distance(
            norms, [dim](double t) { return t <= 0 ? 0.0 : t >= 1 ? 1.0 : std::pow(t, dim); }, 1.63 / std::sqrt(20000.0));
        CAPTURE(p);
        CAPTURE(q);
        CHECK(r.pass);
    }
}

TEST_CASE("p-Gaussian draws") {
    for (double p : {0.5, 1.0, 2.0, 5.0, kInf}) {
        RandomStream s(13, 0);
        std::vector<double> xs(10000);
        for (double& v : xs) v = sample_p_gaussian(ex(p), s);
        const KsReport r = ks_distance(xs, [p](double x) { return p_gaussian_cdf(ex(p), x); }, 1.63 / 100.0);
        CAPTURE(p);
        CHECK(r.pass);
    }
}

TEST_CASE("p = q = inf gives i.i.d. Unif[-1, 1] entries") {
    RandomStream s(14, 0);
    std::vector<double> first, second;
    for (int i = 0; i < 5000; ++i) {
        const MatrixSample x = sample_mixed_ball(Exponent::infinity(), Exponent::infinity(), 2, 3, s);
        first.push_back(x.values(0, 0));
        second.push_back(x.values(1, 2));
    }
    auto unif = [](double x) { return std::clamp(0.5 * (x + 1.0), 0.0, 1.0); };
    CHECK(ks_distance(first, unif, 1.63 / std::sqrt(5000.0)).pass);
    CHECK(ks_distance(second, unif, 1.63 / std::sqrt(5000.0)).pass);
}

TEST_CASE("lp ball sampler") {
    RandomStream s(15, 0);
    std::vector<double> norms(5000);
    for (double& v : norms) v = lp_norm(sample_lp_ball(Exponent(1.5), 6, s), Exponent(1.5));
    CHECK(ks_distance(norms, [](double t) { return std::clamp(std::pow(std::max(t, 0.0), 6.0), 0.0, 1.0); },
                      1.63 / std::sqrt(5000.0))
              .pass);
}

TEST_CASE("radial part") {
    RandomStream a(16, 0), b(16, 0);
    const auto radial = sample_radial(Exponent(2.0), 3, 5, a);
    CHECK(radial.size() == 5);
    CHECK(lp_norm(radial, Exponent(2.0)) <= 1.0);
    // p = inf: R_i^n ~ Unif[0, 1] independently
    std::vector<double> powered;
    for (int i = 0; i < 2000; ++i) {
        for (double r : sample_radial(Exponent::infinity(), 4, 3, b)) powered.push_back(std::pow(r, 4.0));
    }
    CHECK(ks_distance(powered, [](double u) { return std::clamp(u, 0.0, 1.0); }, 1.63 / std::sqrt(6000.0)).pass);
}

TEST_CASE("partial rows equal the leading rows of a full draw") {
    RandomStream a(17, 3), b(17, 3);
    const MatrixSample full = sample_mixed_ball(Exponent(1.5), Exponent(0.8), 6, 5, a);
    const Matrix rows = sample_mixed_ball_rows(Exponent(1.5), Exponent(0.8), 6, 5, 2, b);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 5; ++j) CHECK(rows(i, j) == full.values(i, j));
    }
}

TEST_CASE("sampler guards") {
    RandomStream s(18, 0);
    CHECK_THROWS_AS(sample_mixed_ball(Exponent(2.0), Exponent(2.0), 0, 3, s), DomainError);
    CHECK_THROWS_AS(sample_cone_measure(Exponent(2.0), 0, s), DomainError);
}
