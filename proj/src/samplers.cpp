#include "mixnorm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixnorm {
namespace {

void check_dim(std::size_t d) {
    if (d == 0) throw DomainError("dimension must be >= 1");
}

double log_sum_exp(std::span<const double> logs) {
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double v : logs) sum += std::exp(v - top);
    return top + std::log(sum);
}

double random_sign(RandomStream& stream) { return (stream.next_u64() >> 63) ? -1.0 : 1.0; }

// Cone-measure direction for finite q. With eta_j ~ N_q we have
// |eta_j|^q / q = G_j ~ Gamma(1/q), hence eta_j / ||eta||_q = sign_j (G_j / sum G)^{1/q};
// the ratio is formed from log G_j so nothing over- or underflows.
void cone_finite(double q, std::span<double> out, RandomStream& stream) {
    const double shape = 1.0 / q;
    for (double& v : out) v = stream.log_gamma_variate(shape);
    const double log_total = log_sum_exp(out);
    for (double& v : out) v = random_sign(stream) * std::exp((v - log_total) / q);
}

}  // namespace

double sample_p_gaussian(Exponent p, RandomStream& stream) {
    if (p.is_infinite()) return 2.0 * stream.uniform() - 1.0;
    // |X|^p / p ~ Gamma(1/p, 1)
    const double pv = p.value();
    const double log_g = stream.log_gamma_variate(1.0 / pv);
    const double magnitude = std::exp((std::log(pv) + log_g) / pv);
    return random_sign(stream) * magnitude;
}

void sample_cone_measure_into(Exponent q, std::span<double> out, RandomStream& stream) {
    check_dim(out.size());
    if (q.is_finite()) {
        cone_finite(q.value(), out, stream);
        return;
    }
    for (;;) {
        double largest = 0.0;
        for (double& v : out) {
            v = 2.0 * stream.uniform() - 1.0;
            largest = std::max(largest, std::fabs(v));
        }
        // The all-zero draw has probability zero; redraw if it happens.
        if (largest == 0.0) continue;
        for (double& v : out) v /= largest;
        return;
    }
}

std::vector<double> sample_cone_measure(Exponent q, std::size_t n, RandomStream& stream) {
    std::vector<double> out(n);
    sample_cone_measure_into(q, out, stream);
    return out;
}

std::vector<double> sample_lp_ball(Exponent p, std::size_t n, RandomStream& stream) {
    check_dim(n);
    std::vector<double> out(n);
    if (p.is_infinite()) {
        for (double& v : out) v = 2.0 * stream.uniform() - 1.0;
        return out;
    }
    const double radius = std::exp(std::log(stream.uniform_open()) / static_cast<double>(n));
    sample_cone_measure_into(p, out, stream);
    for (double& v : out) v *= radius;
    return out;
}

void sample_radial_into(Exponent p, std::size_t n, std::span<double> out, RandomStream& stream) {
    check_dim(n);
    check_dim(out.size());
    const double nn = static_cast<double>(n);
    if (p.is_infinite()) {
        // |xi_i| ~ Unif[0, 1], R_i = |xi_i|^{1/n}
        for (double& v : out) v = std::exp(std::log(stream.uniform_open()) / nn);
        return;
    }
    // xi_i ~ N_{p/n}: |xi_i|^{p/n} = (p/n) G_i with G_i ~ Gamma(n/p), so
    // |xi_i|^{1/n} / (sum_k |xi_k|^{p/n})^{1/p} = (G_i / sum_k G_k)^{1/p}.
    const double pv = p.value();
    const double mn = static_cast<double>(out.size()) * nn;
    const double log_u = std::log(stream.uniform_open()) / mn;
    for (double& v : out) v = stream.log_gamma_variate(nn / pv);
    const double log_total = log_sum_exp(out);
    for (double& v : out) v = std::exp(log_u + (v - log_total) / pv);
}

std::vector<double> sample_radial(Exponent p, std::size_t n, std::size_t m, RandomStream& stream) {
    check_dim(m);
    std::vector<double> out(m);
    sample_radial_into(p, n, out, stream);
    return out;
}

void sample_mixed_ball_into(Exponent p, Exponent q, std::size_t m, std::size_t n, std::span<double> out,
                            std::span<double> radial, RandomStream& stream) {
    check_dim(m);
    check_dim(n);
    if (radial.size() != m) throw DomainError("radial scratch must have length m");
    const std::size_t rows = out.size() / n;
    if (rows * n != out.size() || rows > m || rows == 0) throw DomainError("output buffer must hold 1..m rows of length n");
    sample_radial_into(p, n, radial, stream);
    for (std::size_t i = 0; i < rows; ++i) {
        auto row = out.subspan(i * n, n);
        sample_cone_measure_into(q, row, stream);
        for (double& v : row) v *= radial[i];
    }
}

Matrix sample_mixed_ball_rows(Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t rows,
                              RandomStream& stream) {
    Matrix out(rows, n);
    std::vector<double> radial(m);
    sample_mixed_ball_into(p, q, m, n, out.data(), radial, stream);
    return out;
}

MatrixSample sample_mixed_ball(Exponent p, Exponent q, std::size_t m, std::size_t n, RandomStream& stream) {
    const std::uint64_t seed = stream.seed();
    const std::uint64_t stream_id = stream.stream_id();
    return {sample_mixed_ball_rows(p, q, m, n, m, stream), p, q, seed, stream_id};
}

}  // namespace mixnorm
