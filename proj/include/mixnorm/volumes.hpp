#pragma once

#include <cmath>
#include <cstddef>

#include "mixnorm/exponent.hpp"
#include "mixnorm/norms.hpp"

namespace mixnorm {

/// Natural log of a Lebesgue volume. Volumes of mixed-norm balls over- or
/// underflow doubles for modest dimensions, so everything stays in log space
/// until a caller explicitly asks for value().
struct LogVolume {
    double log_value;

    double value() const { return std::exp(log_value); }
};

/// ln vol(B_p^n) = n ln(2 Gamma(1/p + 1)) - ln Gamma(n/p + 1); n ln 2 for p = inf.
LogVolume lp_ball_log_volume(std::size_t n, Exponent p);

/// ln vol(B_{p,q}^{m,n}) = ln(V_{p/n}^m (V_q^n)^m / 2^m).
LogVolume mixed_ball_log_volume(std::size_t m, std::size_t n, Exponent p, Exponent q);

/// Order-k ball volume by the level recursion
///   V_k = V_{k-1}^{n_k} V_{p_k / (n_1...n_{k-1})}^{n_k} / 2^{n_k}.
LogVolume mixed_ball_log_volume_k(const MixedNormSpec& spec);

/// The same volume by the closed product formula
///   2^{N_k} prod_j Gamma(N_{j-1}/p_j + 1)^{n_j...n_k} / Gamma(N_j/p_j + 1)^{n_{j+1}...n_k},
/// with N_j = n_1...n_j. Used to cross-check the recursion.
LogVolume mixed_ball_log_volume_k_explicit(const MixedNormSpec& spec);

/// ln r_{p,q}^{m,n} = ln vol(B_{p,q}^{m,n}) / (mn).
double normalized_radius_log(std::size_t m, std::size_t n, Exponent p, Exponent q);

}  // namespace mixnorm
