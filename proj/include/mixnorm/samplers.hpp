#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixnorm/exponent.hpp"
#include "mixnorm/norms.hpp"
#include "mixnorm/random.hpp"

namespace mixnorm {

/// One draw X ~ Unif(B_{p,q}^{m,n}) together with its provenance.
struct MatrixSample {
    Matrix values;
    Exponent p;
    Exponent q;
    std::uint64_t seed;
    std::uint64_t stream_id;
};

/// One draw from the p-generalized Gaussian N_p (density proportional to
/// exp(-|x|^p / p)); Unif[-1, 1] for p = inf.
double sample_p_gaussian(Exponent p, RandomStream& stream);

/// Cone measure on the q-sphere S_q^{n-1}: the normalized vector
/// eta / ||eta||_q of i.i.d. N_q entries.
std::vector<double> sample_cone_measure(Exponent q, std::size_t n, RandomStream& stream);

/// Writes a cone-measure draw into `out` (length n).
void sample_cone_measure_into(Exponent q, std::span<double> out, RandomStream& stream);

/// Unif(B_p^n) via U^{1/n} * cone-measure direction; i.i.d. Unif[-1, 1]
/// coordinates for p = inf.
std::vector<double> sample_lp_ball(Exponent p, std::size_t n, RandomStream& stream);

/// The row norms (R_1, ..., R_m) of X ~ Unif(B_{p,q}^{m,n}).
std::vector<double> sample_radial(Exponent p, std::size_t n, std::size_t m, RandomStream& stream);

/// Writes a radial draw into `out` (length m).
void sample_radial_into(Exponent p, std::size_t n, std::span<double> out, RandomStream& stream);

/// X ~ Unif(B_{p,q}^{m,n}) with rows R_i * Theta_i.
MatrixSample sample_mixed_ball(Exponent p, Exponent q, std::size_t m, std::size_t n, RandomStream& stream);

/// The first `rows` rows of a draw from Unif(B_{p,q}^{m,n}). Consumes the
/// stream in the same order as the full sampler, so the result equals the
/// leading rows of sample_mixed_ball on an identical stream.
Matrix sample_mixed_ball_rows(Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t rows,
                              RandomStream& stream);

/// Fills a caller-owned m x n row-major buffer with a ball draw; `radial`
/// is scratch of length m.
void sample_mixed_ball_into(Exponent p, Exponent q, std::size_t m, std::size_t n, std::span<double> out,
                            std::span<double> radial, RandomStream& stream);

}  // namespace mixnorm
