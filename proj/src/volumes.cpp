#include "mixnorm/volumes.hpp"

#include <numbers>

#include "mixnorm/special_functions.hpp"

namespace mixnorm {
namespace {

void check_dim(std::size_t d) {
    if (d == 0) throw DomainError("dimension must be >= 1");
}

// ln Gamma(c/p + 1), zero for p = inf.
double log_gamma_scaled(double c, Exponent p) { return p.is_infinite() ? 0.0 : log_gamma(c / p.value() + 1.0); }

}  // namespace

LogVolume lp_ball_log_volume(std::size_t n, Exponent p) {
    check_dim(n);
    const double nn = static_cast<double>(n);
    return {nn * (std::numbers::ln2 + log_gamma_scaled(1.0, p)) - log_gamma_scaled(nn, p)};
}

LogVolume mixed_ball_log_volume(std::size_t m, std::size_t n, Exponent p, Exponent q) {
    check_dim(m);
    check_dim(n);
    const double mm = static_cast<double>(m);
    const double outer = lp_ball_log_volume(m, p.scaled_down(static_cast<double>(n))).log_value;
    const double inner = lp_ball_log_volume(n, q).log_value;
    return {outer + mm * inner - mm * std::numbers::ln2};
}

LogVolume mixed_ball_log_volume_k(const MixedNormSpec& spec) {
    const auto& levels = spec.levels();
    double log_v = lp_ball_log_volume(levels.front().dim, levels.front().exponent).log_value;
    double inner_dim = static_cast<double>(levels.front().dim);
    for (std::size_t j = 1; j < levels.size(); ++j) {
        const double nk = static_cast<double>(levels[j].dim);
        const double outer = lp_ball_log_volume(levels[j].dim, levels[j].exponent.scaled_down(inner_dim)).log_value;
        log_v = nk * log_v + outer - nk * std::numbers::ln2;
        inner_dim *= nk;
    }
    return {log_v};
}

LogVolume mixed_ball_log_volume_k_explicit(const MixedNormSpec& spec) {
    const auto& levels = spec.levels();
    const std::size_t k = levels.size();
    // tail[j] = n_j * ... * n_k (1-based j), tail[k+1] = 1
    std::vector<double> tail(k + 2, 1.0);
    for (std::size_t j = k; j >= 1; --j) tail[j] = tail[j + 1] * static_cast<double>(levels[j - 1].dim);

    double log_v = tail[1] * std::numbers::ln2;
    double head = 1.0;  // N_{j-1}
    for (std::size_t j = 1; j <= k; ++j) {
        const Exponent pj = levels[j - 1].exponent;
        const double head_next = head * static_cast<double>(levels[j - 1].dim);
        log_v += tail[j] * log_gamma_scaled(head, pj) - tail[j + 1] * log_gamma_scaled(head_next, pj);
        head = head_next;
    }
    return {log_v};
}

double normalized_radius_log(std::size_t m, std::size_t n, Exponent p, Exponent q) {
    return mixed_ball_log_volume(m, n, p, q).log_value / (static_cast<double>(m) * static_cast<double>(n));
}

}  // namespace mixnorm
