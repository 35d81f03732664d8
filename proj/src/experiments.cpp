#include "mixnorm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixnorm/moments.hpp"
#include "mixnorm/norms.hpp"
#include "mixnorm/parallel.hpp"
#include "mixnorm/samplers.hpp"
#include "mixnorm/special_functions.hpp"
#include "mixnorm/volumes.hpp"

namespace mixnorm {
namespace {

// Child id reserved for auxiliary estimates (E[||Theta||^p2]); chunk ids
// count up from 0 and never get near it.
constexpr std::uint64_t kAuxiliaryStream = 0xA5A5'0000'0000'0001ULL;

// Norm values sit exactly on the boundary when the two balls coincide, so
// comparisons allow a few ulps of round-off.
constexpr double kBoundarySlack = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class T>
std::vector<T> concat(std::vector<std::vector<T>>&& parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<T> out;
    out.reserve(total);
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::size_t chunk_for(std::size_t coords_per_draw) {
    return std::clamp<std::size_t>(65536 / std::max<std::size_t>(coords_per_draw, 1), 1, 4096);
}

MonteCarloResult proportion(std::size_t hits, std::size_t samples, std::uint64_t seed, double wall) {
    const double n = static_cast<double>(samples);
    const double phat = static_cast<double>(hits) / n;
    return {phat, std::sqrt(phat * (1.0 - phat) / n), samples, seed, wall};
}

// |x|^r with the common exponents special-cased.
struct Power {
    double r;
    double operator()(double x) const {
        x = std::fabs(x);
        if (r == 1.0) return x;
        if (r == 2.0) return x * x;
        if (r == 0.5) return std::sqrt(x);
        if (r == 3.0) return x * x * x;
        return std::pow(x, r);
    }
};

bool inside_mixed_ball(std::span<const double> x, std::size_t m, std::size_t n, Exponent p, Exponent q) {
    if (q.is_infinite()) {
        if (p.is_infinite()) return true;  // the cube itself
        const Power outer{p.value()};
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row = std::max(row, std::fabs(x[i * n + j]));
            acc += outer(row);
            if (acc > 1.0) return false;
        }
        return true;
    }
    const Power inner{q.value()};
    if (p.is_infinite()) {
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += inner(x[i * n + j]);
            if (row > 1.0) return false;
        }
        return true;
    }
    const double ratio = p.value() / q.value();
    const Power outer{ratio};
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += inner(x[i * n + j]);
        acc += outer(row);
        if (acc > 1.0) return false;
    }
    return true;
}

struct Normalization {
    double prefactor;
    double scale;
    bool deficit;  // prefactor * (1 - scale ||X||) instead of prefactor * (scale ||X|| - 1)
};

double pow_m(double base, double exponent) { return std::exp(exponent * std::log(base)); }

double theta_moment(const RegimeParams& params, const std::optional<Estimate>& given, bool squared,
                    const RandomStream& stream, std::size_t theta_samples, unsigned workers) {
    if (params.q1 == params.q2 || *params.n == 1) return 1.0;
    if (given) return given->value;
    const RandomStream aux = stream.child(kAuxiliaryStream + (squared ? 1 : 0));
    return expected_theta_norm(params.q1, params.q2, params.p2.value(), *params.n, aux, theta_samples, workers, squared)
        .value;
}

Normalization normalization(Regime regime, const RegimeParams& params, const RandomStream& stream,
                            std::size_t theta_samples, unsigned workers) {
    const double m = static_cast<double>(*params.m);
    const double n = static_cast<double>(*params.n);
    const double inv_p1 = params.p1.reciprocal();
    auto inv_p2 = [&] { return 1.0 / params.p2.value(); };
    auto row_scale_with_theta = [&] {
        const double p2 = params.p2.value();
        const double e1 = theta_moment(params, params.e_theta, false, stream, theta_samples, workers);
        const double mm = moment_M(params.p1.scaled_down(n), p2 / n);
        return pow_m(m, inv_p1 - 1.0 / p2) / std::pow(mm * e1, 1.0 / p2);
    };
    switch (regime) {
        case Regime::RowsGrow:
            return {std::sqrt(m), row_scale_with_theta(), false};
        case Regime::BothGrowGaussian:
            return {std::sqrt(m * n), row_scale_with_theta(), false};
        case Regime::ColsGrowGaussian: {
            const double q2 = params.q2.value();
            const double scale = pow_m(m, inv_p1 - inv_p2()) * pow_m(n, params.q1.reciprocal() - 1.0 / q2) /
                                 std::pow(moment_M(params.q1, q2), 1.0 / q2);
            return {std::sqrt(n), scale, false};
        }
        case Regime::ColsGrowExpChi:
            return {m * n, pow_m(m, inv_p1 - inv_p2()), true};
        case Regime::ColsGrowExpSum:
            return {m * n, pow_m(m, -inv_p2()), true};
        case Regime::BothGrowScaled: {
            const double p2 = params.p2.value();
            const double mm = moment_M(params.p1.scaled_down(n), p2 / n);
            return {std::sqrt(m) * n, pow_m(m, inv_p1 - 1.0 / p2) / std::pow(mm, 1.0 / p2), false};
        }
        case Regime::BothGrowStandard: {
            const double p2 = params.p2.value();
            const double mm = moment_M(Exponent::infinity(), p2 / n);
            return {std::sqrt(m) * n, 1.0 / (pow_m(m, 1.0 / p2) * std::pow(mm, 1.0 / p2)), false};
        }
        case Regime::LpBall: {
            const double q2 = params.q2.value();
            const double scale = pow_m(n, params.q1.reciprocal() - 1.0 / q2) / std::pow(moment_M(params.q1, q2), 1.0 / q2);
            return {std::sqrt(n), scale, false};
        }
    }
    throw DomainError("unknown regime");
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<double> sample_mixed_norms(Exponent p1, Exponent q1, Exponent p2, Exponent q2, std::size_t m,
                                       std::size_t n, std::size_t samples, const RandomStream& stream,
                                       unsigned workers) {
    if (m == 0 || n == 0) throw DomainError("dimensions must be >= 1");
    auto parts = parallel_chunks(samples, chunk_for(m * n), workers, [&](std::size_t begin, std::size_t end) {
        RandomStream s = stream.child(begin);
        std::vector<double> buffer(m * n), radial(m), norms;
        norms.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            sample_mixed_ball_into(p1, q1, m, n, buffer, radial, s);
            norms.push_back(mixed_norm(buffer, m, n, p2, q2));
        }
        return norms;
    });
    return concat(std::move(parts));
}

MonteCarloResult estimate_intersection_volume(Exponent p1, Exponent q1, Exponent p2, Exponent q2, std::size_t m,
                                              std::size_t n, double t, std::size_t samples,
                                              const RandomStream& stream, unsigned workers) {
    if (!(t > 0.0)) throw DomainError("dilation t must be > 0");
    if (samples < 1000) throw DomainError("intersection volume needs at least 1000 samples");
    const auto start = Clock::now();
    const double bound =
        std::exp(normalized_radius_log(m, n, p1, q1) - normalized_radius_log(m, n, p2, q2)) * t * (1.0 + kBoundarySlack);
    const auto norms = sample_mixed_norms(p1, q1, p2, q2, m, n, samples, stream, workers);
    const auto hits = static_cast<std::size_t>(std::count_if(norms.begin(), norms.end(), [&](double v) { return v <= bound; }));
    return proportion(hits, samples, stream.seed(), seconds_since(start));
}

MonteCarloResult hit_or_miss_volume(Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t samples,
                                    const RandomStream& stream, unsigned workers) {
    if (m == 0 || n == 0) throw DomainError("dimensions must be >= 1");
    if (m * n > 20) throw DomainError("hit-or-miss volume requires m n <= 20");
    if (samples == 0) throw DomainError("hit-or-miss volume needs samples");
    const auto start = Clock::now();
    const std::size_t dim = m * n;
    const auto counts = parallel_chunks(samples, 1 << 16, workers, [&](std::size_t begin, std::size_t end) {
        RandomStream s = stream.child(begin);
        std::vector<double> x(dim);
        std::size_t hits = 0;
        for (std::size_t i = begin; i < end; ++i) {
            for (double& v : x) v = 2.0 * s.uniform() - 1.0;
            hits += inside_mixed_ball(x, m, n, p, q) ? 1 : 0;
        }
        return hits;
    });
    const std::size_t hits = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    MonteCarloResult fraction = proportion(hits, samples, stream.seed(), 0.0);
    const double cube = std::ldexp(1.0, static_cast<int>(dim));
    return {cube * fraction.estimate, cube * fraction.std_error, samples, stream.seed(), seconds_since(start)};
}

std::vector<double> clt_statistic_samples(Regime regime, const RegimeParams& params, std::size_t samples,
                                          const RandomStream& stream, unsigned workers, std::size_t theta_samples) {
    check_regime(regime, params);
    if (!params.n) throw DomainError("simulation needs a finite n");
    RegimeParams sim = params;
    if (regime == Regime::LpBall) {
        sim.m = 1;
    } else if (!sim.m) {
        throw DomainError("simulation needs a finite m");
    }
    if (*sim.m == 0 || *sim.n == 0) throw DomainError("dimensions must be >= 1");
    const Normalization norm = normalization(regime, sim, stream, theta_samples, workers);

    // The l_p ball B_{q1}^n is the m = 1 mixed ball for any outer exponent.
    const Exponent ball_p = regime == Regime::LpBall ? Exponent(1.0) : sim.p1;
    const Exponent norm_p = regime == Regime::LpBall ? Exponent(1.0) : sim.p2;
    auto norms = sample_mixed_norms(ball_p, sim.q1, norm_p, sim.q2, *sim.m, *sim.n, samples, stream, workers);
    for (double& v : norms) {
        v = norm.deficit ? norm.prefactor * (1.0 - norm.scale * v) : norm.prefactor * (norm.scale * v - 1.0);
    }
    return norms;
}

KsReport ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf, double threshold,
                     std::string reference) {
    if (samples.size() < 100) throw DomainError("KS distance needs at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, samples.size(), std::move(reference), threshold, d <= threshold};
}

double radial_reference_cdf(Exponent p, std::size_t n, double r) {
    if (n == 0) throw DomainError("n must be >= 1");
    if (!(r > 0.0)) return 0.0;
    if (p.is_infinite()) return r >= 1.0 ? 1.0 : std::pow(r, static_cast<double>(n));
    const double nn = static_cast<double>(n);
    const double pv = p.value();
    return regularized_gamma_cdf(nn / pv, pv / nn, std::pow(r, pv));
}

double p_gaussian_cdf(Exponent q, double x) {
    if (q.is_infinite()) return std::clamp(0.5 * (x + 1.0), 0.0, 1.0);
    if (x == 0.0) return 0.5;
    const double qv = q.value();
    const double half_mass = 0.5 * regularized_gamma_p(1.0 / qv, std::pow(std::fabs(x), qv) / qv);
    return x > 0.0 ? 0.5 + half_mass : 0.5 - half_mass;
}

PmbReport pmb_check(PmbKind kind, Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t k, std::size_t l,
                    std::size_t samples, const RandomStream& stream, double threshold, unsigned workers) {
    if (m == 0 || n == 0) throw DomainError("dimensions must be >= 1");
    if (k == 0 || k > m) throw DomainError("row count k must lie in 1..m");
    if (kind == PmbKind::Entries && (l == 0 || l > n)) throw DomainError("column count l must lie in 1..n");
    const std::size_t width = kind == PmbKind::Radial ? k : k * l;
    const double row_scale = p.is_infinite() ? 1.0 : std::pow(static_cast<double>(m), 1.0 / p.value());
    const double col_scale = q.is_infinite() ? 1.0 : std::pow(static_cast<double>(n), 1.0 / q.value());

    auto parts = parallel_chunks(samples, chunk_for(m + k * n), workers, [&](std::size_t begin, std::size_t end) {
        RandomStream s = stream.child(begin);
        std::vector<double> out;
        out.reserve((end - begin) * width);
        std::vector<double> radial(m);
        std::vector<double> rows(kind == PmbKind::Entries ? k * n : 0);
        for (std::size_t i = begin; i < end; ++i) {
            if (kind == PmbKind::Radial) {
                sample_radial_into(p, n, radial, s);
                for (std::size_t r = 0; r < k; ++r) out.push_back(row_scale * radial[r]);
            } else {
                sample_mixed_ball_into(p, q, m, n, rows, radial, s);
                for (std::size_t r = 0; r < k; ++r) {
                    for (std::size_t c = 0; c < l; ++c) out.push_back(row_scale * col_scale * rows[r * n + c]);
                }
            }
        }
        return out;
    });
    const auto flat = concat(std::move(parts));

    std::vector<std::vector<double>> columns(width, std::vector<double>(samples));
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t c = 0; c < width; ++c) columns[c][i] = flat[i * width + c];
    }

    PmbReport report;
    for (std::size_t c = 0; c < width; ++c) {
        if (kind == PmbKind::Radial) {
            report.coordinates.push_back(ks_distance(columns[c], [&](double r) { return radial_reference_cdf(p, n, r); },
                                                     threshold, "|xi|^(1/n), xi ~ N_(p/n)"));
        } else {
            report.coordinates.push_back(
                ks_distance(columns[c], [&](double x) { return p_gaussian_cdf(q, x); }, threshold, "N_q"));
        }
    }
    for (auto& col : columns) {
        for (double& v : col) v = std::fabs(v);
    }
    for (std::size_t a = 0; a < width; ++a) {
        for (std::size_t b = a + 1; b < width; ++b) {
            report.max_abs_correlation = std::max(report.max_abs_correlation, std::fabs(pearson(columns[a], columns[b])));
        }
    }
    return report;
}

KsReport empirical_measure_check(Exponent p, Exponent q, std::size_t m, std::size_t n, std::size_t trials,
                                 const RandomStream& stream, double threshold, unsigned workers) {
    static_cast<void>(q);  // the radial law does not involve q
    if (m < 1000) throw DomainError("empirical measure check needs m >= 1000");
    if (n == 0) throw DomainError("n must be >= 1");
    if (trials == 0) throw DomainError("empirical measure check needs at least one trial");
    const double row_scale = p.is_infinite() ? 1.0 : std::pow(static_cast<double>(m), 1.0 / p.value());
    auto stats = parallel_chunks(trials, 1, workers, [&](std::size_t begin, std::size_t) {
        RandomStream s = stream.child(begin);
        std::vector<double> radial(m);
        sample_radial_into(p, n, radial, s);
        for (double& v : radial) v *= row_scale;
        return ks_distance(std::move(radial), [&](double r) { return radial_reference_cdf(p, n, r); }, threshold)
            .statistic;
    });
    std::sort(stats.begin(), stats.end());
    const std::size_t mid = stats.size() / 2;
    const double median = stats.size() % 2 == 1 ? stats[mid] : 0.5 * (stats[mid - 1] + stats[mid]);
    return {median, m, "|xi|^(1/n), xi ~ N_(p/n) (median over trials)", threshold, median <= threshold};
}

std::vector<SweepCell> threshold_sweep(const SweepConfig& config, const RandomStream& stream, unsigned workers) {
    if (config.m_schedule.empty() || config.n_schedule.empty() || config.t_values.empty()) {
        throw DomainError("sweep schedules must be nonempty");
    }
    for (double t : config.t_values) {
        if (!(t > 0.0)) throw DomainError("sweep t values must be > 0");
    }
    if (config.samples == 0) throw DomainError("sweep needs samples");

    std::vector<SweepCell> cells;
    std::uint64_t cell_index = 0;
    for (std::size_t m : config.m_schedule) {
        for (std::size_t n : config.n_schedule) {
            const RandomStream cell_stream = stream.child(cell_index++);
            RegimeParams params{config.p1, config.q1, config.p2, config.q2, m, n, std::nullopt, std::nullopt};

            double a = 0.0;
            double a_err = 0.0;
            if (config.regime == VolumeRegime::RowsGrow) {
                if (!(params.q1 == params.q2 || n == 1)) {
                    params.e_theta = expected_theta_norm(config.q1, config.q2, config.p2.value(), n,
                                                         cell_stream.child(kAuxiliaryStream), config.theta_samples,
                                                         workers);
                }
                const ThresholdValue tv = threshold_A_finite_n(params);
                a = tv.value;
                a_err = tv.std_error;
            } else {
                a = volume_threshold(config.regime, params);
            }

            const auto start = Clock::now();
            auto norms = sample_mixed_norms(config.p1, config.q1, config.p2, config.q2, m, n, config.samples,
                                            cell_stream, workers);
            std::sort(norms.begin(), norms.end());
            const double sample_time = seconds_since(start);
            const double ratio =
                std::exp(normalized_radius_log(m, n, config.p1, config.q1) - normalized_radius_log(m, n, config.p2, config.q2));

            for (double t_in : config.t_values) {
                SweepCell cell;
                cell.m = m;
                cell.n = n;
                cell.t_input = t_in;
                cell.t = config.scale == SweepScale::Absolute ? t_in : t_in / a;
                cell.threshold_a = a;
                cell.threshold_a_std_error = a_err;
                cell.regime = config.regime;
                try {
                    cell.predicted_limit = critical_volume_limit(config.regime, params, cell.t, config.critical_m).value;
                } catch (const DomainError&) {
                    cell.predicted_limit = std::numeric_limits<double>::quiet_NaN();
                }
                const double bound = ratio * cell.t * (1.0 + kBoundarySlack);
                const auto hits = static_cast<std::size_t>(std::upper_bound(norms.begin(), norms.end(), bound) - norms.begin());
                cell.volume = proportion(hits, config.samples, stream.seed(), sample_time);
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

}  // namespace mixnorm
