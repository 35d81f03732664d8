#include "mixnorm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mixnorm/experiments.hpp"
#include "mixnorm/io.hpp"
#include "mixnorm/limits.hpp"
#include "mixnorm/norms.hpp"
#include "mixnorm/parallel.hpp"
#include "mixnorm/samplers.hpp"
#include "mixnorm/volumes.hpp"

namespace mixnorm {
namespace {

using io::Config;
using io::Id;
using io::Value;

class InvalidConfig : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Master stream ids under the user seed.
constexpr std::uint64_t kSampleStream = 0;
constexpr std::uint64_t kThetaStream = 1;

Exponent exponent_arg(const std::string& flag, const std::string& text) {
    if (auto e = Exponent::parse(text)) return *e;
    throw InvalidConfig(flag + ": expected a positive number or 'inf', got '" + text + "'");
}

Exponent exponent_arg(const std::string& flag, const std::optional<std::string>& text) {
    if (!text) throw InvalidConfig(flag + " is required");
    return exponent_arg(flag, *text);
}

std::size_t dim_arg(const std::string& flag, const std::optional<std::size_t>& v) {
    if (!v) throw InvalidConfig(flag + " is required");
    if (*v == 0) throw InvalidConfig(flag + " must be >= 1");
    return *v;
}

std::uint64_t seed_arg(const std::optional<std::uint64_t>& seed) {
    if (!seed) throw InvalidConfig("--seed is required for randomized commands");
    return *seed;
}

Value dim_value(std::size_t v) { return static_cast<std::int64_t>(v); }

std::optional<Regime> regime_from(const std::string& token) {
    for (Regime r : {Regime::RowsGrow, Regime::ColsGrowGaussian, Regime::ColsGrowExpChi, Regime::ColsGrowExpSum,
                     Regime::BothGrowGaussian, Regime::BothGrowScaled, Regime::BothGrowStandard, Regime::LpBall}) {
        if (to_string(r) == token) return r;
    }
    return std::nullopt;
}

std::optional<VolumeRegime> volume_regime_from(const std::string& token) {
    for (VolumeRegime r : {VolumeRegime::RowsGrow, VolumeRegime::ColsGrow, VolumeRegime::BothGrow}) {
        if (to_string(r) == token) return r;
    }
    return std::nullopt;
}

std::string kind_name(LimitKind kind) {
    switch (kind) {
        case LimitKind::Zero: return "zero";
        case LimitKind::Half: return "half";
        case LimitKind::One: return "one";
        case LimitKind::ClosedForm: return "closed-form";
        case LimitKind::Gaussian: return "gaussian";
    }
    return "?";
}

// "q:n,p:m,..." innermost level first.
MixedNormSpec parse_spec(const std::string& text) {
    std::vector<NormLevel> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InvalidConfig("--spec: expected exponent:dim pairs, got '" + item + "'");
        const Exponent e = exponent_arg("--spec", item.substr(0, colon));
        std::size_t dim = 0;
        const std::string dim_text = item.substr(colon + 1);
        const auto res = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
        if (res.ec != std::errc{} || res.ptr != dim_text.data() + dim_text.size() || dim == 0) {
            throw InvalidConfig("--spec: invalid dimension '" + dim_text + "'");
        }
        levels.push_back({e, dim});
    }
    if (levels.empty()) throw InvalidConfig("--spec is empty");
    return MixedNormSpec(std::move(levels));
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
            throw InvalidConfig("--values: invalid number '" + item + "'");
        }
        values.push_back(v);
    }
    return values;
}

// Options shared by every subcommand.
struct OutputOptions {
    std::string format = "csv";
    std::string output;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", opts.output, "Write results to this file instead of stdout");
}

class Sink {
  public:
    Sink(const OutputOptions& opts, std::ostream& fallback) : stream_(&fallback) {
        if (!opts.output.empty()) {
            file_.open(opts.output, std::ios::binary);
            if (!file_) throw InvalidConfig("cannot open output file '" + opts.output + "'");
            stream_ = &file_;
        }
        format_ = opts.format == "json" ? io::Format::Json : io::Format::Csv;
    }
    std::ostream& stream() { return *stream_; }
    io::Format format() const { return format_; }

  private:
    std::ofstream file_;
    std::ostream* stream_;
    io::Format format_;
};

struct Geometry {
    std::optional<std::string> p1, q1, p2, q2;
    std::optional<std::size_t> m, n;
};

void add_geometry(CLI::App* cmd, Geometry& g) {
    cmd->add_option("--p1", g.p1, "Outer exponent of the sampled ball");
    cmd->add_option("--q1", g.q1, "Inner exponent of the sampled ball");
    cmd->add_option("--p2", g.p2, "Outer exponent of the measured norm");
    cmd->add_option("--q2", g.q2, "Inner exponent of the measured norm");
    cmd->add_option("--m", g.m, "Number of rows");
    cmd->add_option("--n", g.n, "Number of columns");
}

RegimeParams regime_params(const Geometry& g) {
    RegimeParams params;
    params.p1 = exponent_arg("--p1", g.p1);
    params.q1 = exponent_arg("--q1", g.q1);
    params.p2 = exponent_arg("--p2", g.p2);
    params.q2 = exponent_arg("--q2", g.q2);
    if (g.m) params.m = dim_arg("--m", g.m);
    if (g.n) params.n = dim_arg("--n", g.n);
    return params;
}

void add_geometry_config(Config& cfg, const RegimeParams& params) {
    cfg.emplace_back("p1", params.p1.to_string());
    cfg.emplace_back("q1", params.q1.to_string());
    cfg.emplace_back("p2", params.p2.to_string());
    cfg.emplace_back("q2", params.q2.to_string());
    cfg.emplace_back("m", params.m ? dim_value(*params.m) : Value(std::string("inf")));
    cfg.emplace_back("n", params.n ? dim_value(*params.n) : Value(std::string("inf")));
}

// Fills E[||Theta||^p2] (and the 2 p2 moment) when a regime needs them.
void fill_theta(RegimeParams& params, std::optional<std::uint64_t> seed, std::size_t theta_samples, unsigned workers,
                Config& cfg) {
    if (!params.n || params.q1 == params.q2 || *params.n == 1) return;
    const RandomStream theta(seed_arg(seed), kThetaStream);
    const double p2 = params.p2.value();
    params.e_theta = expected_theta_norm(params.q1, params.q2, p2, *params.n, theta.child(0), theta_samples, workers);
    params.e_theta_sq =
        expected_theta_norm(params.q1, params.q2, p2, *params.n, theta.child(1), theta_samples, workers, true);
    cfg.emplace_back("theta_samples", dim_value(theta_samples));
    cfg.emplace_back("e_theta", params.e_theta->value);
    cfg.emplace_back("e_theta_std_error", params.e_theta->std_error);
    cfg.emplace_back("e_theta_sq", params.e_theta_sq->value);
    cfg.emplace_back("e_theta_sq_std_error", params.e_theta_sq->std_error);
}

bool needs_theta(Regime regime) { return regime == Regime::RowsGrow || regime == Regime::BothGrowGaussian; }

double ks_threshold(std::size_t samples, double bias, std::optional<double> override_value) {
    if (override_value) return *override_value;
    return kKsNullQuantile / std::sqrt(static_cast<double>(samples)) + bias;
}

// --------------------------------------------------------------------------

struct VolumeArgs {
    OutputOptions out;
    std::optional<std::size_t> m, n;
    std::optional<std::string> p, q, spec;
    bool log = false;
    bool verbose = false;
};

int cmd_volume(const VolumeArgs& a, std::ostream& out) {
    Config cfg{{"command", std::string("volume")}};
    std::vector<std::string> columns;
    std::vector<Value> row;
    const char* vol_col = a.log ? "log_volume" : "volume";
    const char* radius_col = a.log ? "log_normalized_radius" : "normalized_radius";
    if (a.spec) {
        if (a.m || a.n || a.p || a.q) throw InvalidConfig("--spec cannot be combined with --m/--n/--p/--q");
        const MixedNormSpec spec = parse_spec(*a.spec);
        const LogVolume v = mixed_ball_log_volume_k(spec);
        const double log_radius = v.log_value / static_cast<double>(spec.total_dim());
        cfg.emplace_back("spec", *a.spec);
        columns = {"dim", vol_col, radius_col};
        row = {dim_value(spec.total_dim()), a.log ? v.log_value : v.value(), a.log ? log_radius : std::exp(log_radius)};
        if (a.verbose) {
            const double explicit_log = mixed_ball_log_volume_k_explicit(spec).log_value;
            columns.insert(columns.end(), {"explicit_log_volume", "recursion_minus_explicit"});
            row.insert(row.end(), {explicit_log, v.log_value - explicit_log});
        }
    } else {
        const std::size_t m = dim_arg("--m", a.m);
        const std::size_t n = dim_arg("--n", a.n);
        const Exponent p = exponent_arg("--p", a.p);
        const Exponent q = exponent_arg("--q", a.q);
        const LogVolume v = mixed_ball_log_volume(m, n, p, q);
        const double log_radius = normalized_radius_log(m, n, p, q);
        cfg.insert(cfg.end(), {{"m", dim_value(m)}, {"n", dim_value(n)}, {"p", p.to_string()}, {"q", q.to_string()}});
        columns = {"m", "n", "p", "q", vol_col, radius_col};
        row = {dim_value(m), dim_value(n), p.to_string(), q.to_string(), a.log ? v.log_value : v.value(),
               a.log ? log_radius : std::exp(log_radius)};
        if (a.verbose) {
            const MixedNormSpec spec = MixedNormSpec::order2(p, q, m, n);
            const double recursion = mixed_ball_log_volume_k(spec).log_value;
            const double explicit_log = mixed_ball_log_volume_k_explicit(spec).log_value;
            columns.insert(columns.end(), {"log_volume", "recursion_log_volume", "explicit_log_volume"});
            row.insert(row.end(), {v.log_value, recursion, explicit_log});
        }
    }
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, columns);
    writer.write(row);
    writer.finish();
    return kExitOk;
}

struct NormArgs {
    OutputOptions out;
    std::optional<std::size_t> m, n;
    std::optional<std::string> p, q, values;
};

int cmd_norm(const NormArgs& a, std::ostream& out) {
    const std::size_t m = dim_arg("--m", a.m);
    const std::size_t n = dim_arg("--n", a.n);
    const Exponent p = exponent_arg("--p", a.p);
    const Exponent q = exponent_arg("--q", a.q);
    if (!a.values) throw InvalidConfig("--values is required");
    const auto values = parse_values(*a.values);
    if (values.size() != m * n) throw InvalidConfig("--values must hold m * n entries");
    Config cfg{{"command", std::string("norm")}, {"m", dim_value(m)}, {"n", dim_value(n)}, {"p", p.to_string()},
               {"q", q.to_string()}};
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, {"norm"});
    writer.write({mixed_norm(values, m, n, p, q)});
    writer.finish();
    return kExitOk;
}

struct ConstantArgs {
    OutputOptions out;
    Geometry geo;
    std::optional<std::string> p, q;
    std::optional<std::uint64_t> seed;
    std::size_t theta_samples = 100000;
    unsigned workers = 0;
};

int cmd_constant(const ConstantArgs& a, std::ostream& out) {
    Config cfg{{"command", std::string("constant")}};
    std::vector<std::string> columns;
    std::vector<Value> row;
    if (a.p || a.q) {
        const Exponent p = exponent_arg("--p", a.p);
        const Exponent q = exponent_arg("--q", a.q);
        if (q.is_infinite()) throw InvalidConfig("--q must be finite");
        cfg.insert(cfg.end(), {{"p", p.to_string()}, {"q", q.to_string()}});
        columns = {"A"};
        row = {threshold_A_lp(p, q.value())};
    } else {
        RegimeParams params = regime_params(a.geo);
        if (!params.n) throw InvalidConfig("--n is required for the finite-n threshold");
        if (params.p2.is_infinite()) throw InvalidConfig("--p2 must be finite");
        add_geometry_config(cfg, params);
        if (!(params.q1 == params.q2 || *params.n == 1)) {
            const RandomStream theta(seed_arg(a.seed), kThetaStream);
            params.e_theta = expected_theta_norm(params.q1, params.q2, params.p2.value(), *params.n, theta.child(0),
                                                 a.theta_samples, resolve_workers(a.workers));
            cfg.emplace_back("seed", Id{*a.seed});
            cfg.emplace_back("theta_samples", dim_value(a.theta_samples));
        }
        const ThresholdValue tv = threshold_A_finite_n(params);
        columns = {"A", "std_error", "lower", "upper"};
        row = {tv.value, tv.std_error, tv.lower, tv.upper};
    }
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, columns);
    writer.write(row);
    writer.finish();
    return kExitOk;
}

struct LimitArgs {
    OutputOptions out;
    Geometry geo;
    std::string regime;
    std::vector<double> x;
    std::optional<double> t;
    std::optional<double> critical_m;
    std::optional<std::uint64_t> seed;
    std::size_t theta_samples = 100000;
    unsigned workers = 0;
};

int cmd_limit(const LimitArgs& a, std::ostream& out) {
    RegimeParams params = regime_params(a.geo);
    Config cfg{{"command", std::string("limit")}, {"regime", a.regime}};
    add_geometry_config(cfg, params);
    if (auto vr = volume_regime_from(a.regime)) {
        if (*vr == VolumeRegime::RowsGrow && params.n && !(params.q1 == params.q2 || *params.n == 1)) {
            const RandomStream theta(seed_arg(a.seed), kThetaStream);
            params.e_theta = expected_theta_norm(params.q1, params.q2, params.p2.value(), *params.n, theta.child(0),
                                                 a.theta_samples, resolve_workers(a.workers));
            cfg.emplace_back("seed", Id{*a.seed});
        }
        const double threshold = volume_threshold(*vr, params);
        const double t = a.t.value_or(1.0 / threshold);
        const VolumeLimit limit = critical_volume_limit(*vr, params, t, a.critical_m);
        cfg.emplace_back("t", t);
        Sink sink(a.out, out);
        io::RecordWriter writer(sink.stream(), sink.format(), cfg, {"A", "tA", "limit", "kind"});
        writer.write({threshold, t * threshold, limit.value, kind_name(limit.kind)});
        writer.finish();
        return kExitOk;
    }
    const auto regime = regime_from(a.regime);
    if (!regime) throw InvalidConfig("unknown regime '" + a.regime + "'");
    if (*regime == Regime::RowsGrow) fill_theta(params, a.seed, a.theta_samples, resolve_workers(a.workers), cfg);
    if (a.seed && *regime == Regime::RowsGrow) cfg.emplace_back("seed", Id{*a.seed});
    const LimitLaw law = limit_law(*regime, params);
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, {"law", "x", "cdf"});
    if (a.x.empty()) {
        writer.write({describe(law), std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
    }
    for (double x : a.x) writer.write({describe(law), x, limit_cdf(law, x)});
    writer.finish();
    return kExitOk;
}

struct SampleArgs {
    OutputOptions out;
    std::optional<std::size_t> m, n;
    std::optional<std::string> p, q;
    std::size_t count = 1;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
    const std::size_t m = dim_arg("--m", a.m);
    const std::size_t n = dim_arg("--n", a.n);
    const Exponent p = exponent_arg("--p", a.p);
    const Exponent q = exponent_arg("--q", a.q);
    const std::uint64_t seed = seed_arg(a.seed);
    Config cfg{{"command", std::string("sample")}, {"m", dim_value(m)},    {"n", dim_value(n)},
               {"p", p.to_string()},               {"q", q.to_string()}, {"count", dim_value(a.count)},
               {"seed", Id{seed}},                 {"stream_id", Id{kSampleStream}}};
    std::vector<std::string> columns{"sample"};
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) columns.push_back("x_" + std::to_string(i) + "_" + std::to_string(j));
    }
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, columns);
    const RandomStream master(seed, kSampleStream);
    const unsigned workers = resolve_workers(a.workers);
    // Draws are generated in bounded batches and written in order, so memory
    // stays constant in --count.
    const std::size_t cells = m * n;
    const std::size_t batch = std::max<std::size_t>(1, (std::size_t{1} << 20) / cells);
    std::vector<Value> row(columns.size());
    for (std::size_t first = 0; first < a.count; first += batch) {
        const std::size_t size = std::min(batch, a.count - first);
        const auto parts = parallel_chunks(size, 64, workers, [&](std::size_t begin, std::size_t end) {
            std::vector<double> values((end - begin) * cells);
            std::vector<double> radial(m);
            for (std::size_t s = begin; s < end; ++s) {
                RandomStream stream = master.child(first + s);
                sample_mixed_ball_into(p, q, m, n, std::span(values).subspan((s - begin) * cells, cells), radial, stream);
            }
            return values;
        });
        std::size_t s = first;
        for (const auto& part : parts) {
            for (std::size_t off = 0; off < part.size(); off += cells, ++s) {
                row[0] = dim_value(s);
                for (std::size_t k = 0; k < cells; ++k) row[k + 1] = part[off + k];
                writer.write(row);
            }
        }
    }
    writer.finish();
    return kExitOk;
}

struct IntersectArgs {
    OutputOptions out;
    Geometry geo;
    double t = 1.0;
    std::size_t samples = 100000;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    bool timing = false;
};

int cmd_intersect(const IntersectArgs& a, std::ostream& out) {
    const RegimeParams params = regime_params(a.geo);
    const std::size_t m = dim_arg("--m", params.m);
    const std::size_t n = dim_arg("--n", params.n);
    const std::uint64_t seed = seed_arg(a.seed);
    if (!(a.t > 0.0)) throw InvalidConfig("--t must be > 0");
    if (a.samples < 1000) throw InvalidConfig("--samples must be >= 1000");
    Config cfg{{"command", std::string("intersect")}};
    add_geometry_config(cfg, params);
    cfg.insert(cfg.end(), {{"t", a.t}, {"samples", dim_value(a.samples)}, {"seed", Id{seed}}});
    const MonteCarloResult r = estimate_intersection_volume(params.p1, params.q1, params.p2, params.q2, m, n, a.t,
                                                            a.samples, RandomStream(seed, kSampleStream),
                                                            resolve_workers(a.workers));
    std::vector<std::string> columns{"estimate", "std_error", "n_samples", "seed"};
    std::vector<Value> row{r.estimate, r.std_error, dim_value(r.n_samples), Id{r.seed}};
    if (a.timing) {
        columns.push_back("wall_time");
        row.push_back(r.wall_time);
    }
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, columns);
    writer.write(row);
    writer.finish();
    return kExitOk;
}

struct SweepArgs {
    OutputOptions out;
    Geometry geo;
    std::string regime = "cor-1-7";
    std::vector<std::size_t> m_list, n_list;
    std::vector<double> t_list{0.8, 1.0, 1.25};
    std::string t_scale = "inverse-a";
    std::size_t samples = 100000;
    std::size_t theta_samples = 100000;
    std::optional<double> critical_m;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
};

SweepConfig sweep_config(const SweepArgs& a, const RegimeParams& params) {
    const auto vr = volume_regime_from(a.regime);
    if (!vr) throw InvalidConfig("sweep needs --regime cor-1-6, cor-1-7 or cor-1-8");
    SweepConfig sc;
    sc.p1 = params.p1;
    sc.q1 = params.q1;
    sc.p2 = params.p2;
    sc.q2 = params.q2;
    sc.regime = *vr;
    sc.m_schedule = a.m_list;
    sc.n_schedule = a.n_list;
    if (sc.m_schedule.empty() && params.m) sc.m_schedule = {*params.m};
    if (sc.n_schedule.empty() && params.n) sc.n_schedule = {*params.n};
    if (sc.m_schedule.empty() || sc.n_schedule.empty()) throw InvalidConfig("sweep needs --m-list/--m and --n-list/--n");
    for (std::size_t v : sc.m_schedule) {
        if (v == 0) throw InvalidConfig("m values must be >= 1");
    }
    for (std::size_t v : sc.n_schedule) {
        if (v == 0) throw InvalidConfig("n values must be >= 1");
    }
    sc.t_values = a.t_list;
    sc.scale = a.t_scale == "absolute" ? SweepScale::Absolute : SweepScale::InverseA;
    sc.samples = a.samples;
    sc.theta_samples = a.theta_samples;
    sc.critical_m = a.critical_m;
    return sc;
}

void add_sweep_config(Config& cfg, const SweepConfig& sc, std::uint64_t seed) {
    auto join = [](const auto& values) {
        std::string s;
        for (const auto& v : values) {
            if (!s.empty()) s += ';';
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
                s += io::format_double(v);
            } else {
                s += std::to_string(v);
            }
        }
        return s;
    };
    cfg.emplace_back("m_schedule", join(sc.m_schedule));
    cfg.emplace_back("n_schedule", join(sc.n_schedule));
    cfg.emplace_back("t_values", join(sc.t_values));
    cfg.emplace_back("t_scale", std::string(sc.scale == SweepScale::Absolute ? "absolute" : "inverse-a"));
    cfg.emplace_back("samples", dim_value(sc.samples));
    cfg.emplace_back("theta_samples", dim_value(sc.theta_samples));
    cfg.emplace_back("critical_m", sc.critical_m ? Value(*sc.critical_m) : Value(std::string("none")));
    cfg.emplace_back("seed", Id{seed});
}

const std::vector<std::string> kSweepColumns{"regime", "m",  "n",     "t_input",         "t",        "A",
                                             "A_std_error", "tA", "predicted_limit", "estimate", "std_error",
                                             "n_samples"};

std::vector<Value> sweep_row(const SweepCell& c) {
    return {to_string(c.regime),
            dim_value(c.m),
            dim_value(c.n),
            c.t_input,
            c.t,
            c.threshold_a,
            c.threshold_a_std_error,
            c.t * c.threshold_a,
            c.predicted_limit,
            c.volume.estimate,
            c.volume.std_error,
            dim_value(c.volume.n_samples)};
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    RegimeParams params = regime_params(a.geo);
    const std::uint64_t seed = seed_arg(a.seed);
    const SweepConfig sc = sweep_config(a, params);
    Config cfg{{"command", std::string("sweep")}, {"regime", a.regime}};
    params.m.reset();
    params.n.reset();
    add_geometry_config(cfg, params);
    add_sweep_config(cfg, sc, seed);
    const auto cells = threshold_sweep(sc, RandomStream(seed, kSampleStream), resolve_workers(a.workers));
    Sink sink(a.out, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, kSweepColumns);
    for (const auto& c : cells) writer.write(sweep_row(c));
    writer.finish();
    return kExitOk;
}

struct VerifyArgs {
    SweepArgs sweep;  // geometry, schedules, seed, workers, samples
    std::optional<std::string> p, q;
    std::size_t k = 1, l = 1;
    std::size_t trials = 11;
    double bias = 0.0;
    std::optional<double> threshold;
    bool calibrate = false;
    double low_max = 0.1;
    double high_min = 0.9;
    double critical_tol = 0.05;
};

const std::vector<std::string> kVerifyColumns{"check", "statistic", "threshold", "pass", "n_samples", "reference"};

struct CheckRow {
    std::string check;
    double statistic;
    double threshold;
    bool pass;
    std::size_t n_samples;
    std::string reference;
};

int emit_checks(const OutputOptions& opts, std::ostream& out, const Config& cfg, const std::vector<CheckRow>& rows,
                bool calibrate) {
    Sink sink(opts, out);
    io::RecordWriter writer(sink.stream(), sink.format(), cfg, kVerifyColumns);
    bool ok = true;
    for (const auto& r : rows) {
        writer.write({r.check, r.statistic, r.threshold, r.pass, dim_value(r.n_samples), r.reference});
        ok = ok && r.pass;
    }
    writer.finish();
    return ok || calibrate ? kExitOk : kExitCheckFailed;
}

int verify_regime(const VerifyArgs& a, Regime regime, std::ostream& out) {
    RegimeParams params = regime_params(a.sweep.geo);
    const std::uint64_t seed = seed_arg(a.sweep.seed);
    const unsigned workers = resolve_workers(a.sweep.workers);
    const std::size_t samples = a.sweep.samples;
    if (samples < 100) throw InvalidConfig("--samples must be >= 100");
    Config cfg{{"command", std::string("verify")}, {"regime", a.sweep.regime}};
    add_geometry_config(cfg, params);
    cfg.insert(cfg.end(), {{"samples", dim_value(samples)}, {"seed", Id{seed}}, {"bias", a.bias}});
    const double threshold = ks_threshold(samples, a.bias, a.threshold);

    // Only the primary run records its theta moments in the config.
    Config scratch;
    auto run = [&](RegimeParams prm, const std::string& label, Config& record) {
        if (needs_theta(regime)) fill_theta(prm, seed, a.sweep.theta_samples, workers, record);
        const LimitLaw law = limit_law(regime, prm);
        const auto stats = clt_statistic_samples(regime, prm, samples, RandomStream(seed, kSampleStream), workers);
        const KsReport ks = ks_distance(stats, [&](double x) { return limit_cdf(law, x); }, threshold, describe(law));
        return CheckRow{label, ks.statistic, ks.threshold, ks.pass, ks.n_samples, ks.reference};
    };

    std::vector<CheckRow> rows;
    rows.push_back(run(params, "ks", cfg));
    if (a.calibrate) {
        // Finite-size bias: KS excess over the null quantile at the given and
        // doubled growing dimension.
        RegimeParams doubled = params;
        if (regime == Regime::RowsGrow) {
            doubled.m = 2 * dim_arg("--m", params.m);
        } else {
            doubled.n = 2 * dim_arg("--n", params.n);
            if (regime == Regime::BothGrowGaussian || regime == Regime::BothGrowScaled ||
                regime == Regime::BothGrowStandard) {
                doubled.m = 2 * dim_arg("--m", params.m);
            }
        }
        rows.push_back(run(doubled, "ks_doubled", scratch));
        const double null_q = kKsNullQuantile / std::sqrt(static_cast<double>(samples));
        rows.push_back({"measured_bias", std::max(0.0, rows[0].statistic - null_q), null_q, true, samples,
                        "KS excess over the null quantile"});
    }
    return emit_checks(a.sweep.out, out, cfg, rows, a.calibrate);
}

int verify_pmb(const VerifyArgs& a, PmbKind kind, std::ostream& out) {
    const Exponent p = exponent_arg("--p", a.p);
    const Exponent q = exponent_arg("--q", a.q);
    const std::size_t m = dim_arg("--m", a.sweep.geo.m);
    const std::size_t n = dim_arg("--n", a.sweep.geo.n);
    const std::uint64_t seed = seed_arg(a.sweep.seed);
    const std::size_t samples = a.sweep.samples;
    if (samples < 100) throw InvalidConfig("--samples must be >= 100");
    if (a.k == 0 || a.k > m || (kind == PmbKind::Entries && (a.l == 0 || a.l > n))) {
        throw InvalidConfig("--k/--l out of range");
    }
    Config cfg{{"command", std::string("verify")}, {"regime", a.sweep.regime}, {"p", p.to_string()},
               {"q", q.to_string()},               {"m", dim_value(m)},         {"n", dim_value(n)},
               {"k", dim_value(a.k)},              {"l", dim_value(a.l)},       {"samples", dim_value(samples)},
               {"seed", Id{seed}},                 {"bias", a.bias}};
    const double threshold = ks_threshold(samples, a.bias, a.threshold);
    const RandomStream stream(seed, kSampleStream);
    const unsigned workers = resolve_workers(a.sweep.workers);
    std::vector<CheckRow> rows;
    if (a.sweep.regime == "empirical-a") {
        const double emp_threshold = a.threshold.value_or(3.0 / std::sqrt(static_cast<double>(m)));
        const KsReport r = empirical_measure_check(p, q, m, n, a.trials, stream, emp_threshold, workers);
        rows.push_back({"empirical_measure_median_ks", r.statistic, r.threshold, r.pass, r.n_samples, r.reference});
        return emit_checks(a.sweep.out, out, cfg, rows, a.calibrate);
    }
    const PmbReport report = pmb_check(kind, p, q, m, n, a.k, a.l, samples, stream, threshold, workers);
    for (std::size_t i = 0; i < report.coordinates.size(); ++i) {
        const KsReport& r = report.coordinates[i];
        std::string label;
        if (kind == PmbKind::Radial) {
            label = "ks_R_" + std::to_string(i + 1);
        } else {
            label = "ks_X_" + std::to_string(i / a.l + 1) + "_" + std::to_string(i % a.l + 1);
        }
        rows.push_back({label, r.statistic, r.threshold, r.pass, r.n_samples, r.reference});
    }
    if (report.coordinates.size() > 1) {
        const double corr_threshold = 4.0 / std::sqrt(static_cast<double>(samples));
        rows.push_back({"max_abs_correlation", report.max_abs_correlation, corr_threshold,
                        report.max_abs_correlation <= corr_threshold, samples, "independence proxy"});
    }
    return emit_checks(a.sweep.out, out, cfg, rows, a.calibrate);
}

int verify_volume(const VerifyArgs& a, std::ostream& out) {
    RegimeParams params = regime_params(a.sweep.geo);
    const std::uint64_t seed = seed_arg(a.sweep.seed);
    SweepArgs sa = a.sweep;
    sa.t_scale = "inverse-a";
    sa.t_list = {0.8, 1.0, 1.25};
    const SweepConfig sc = sweep_config(sa, params);
    Config cfg{{"command", std::string("verify")}, {"regime", a.sweep.regime}};
    params.m.reset();
    params.n.reset();
    add_geometry_config(cfg, params);
    add_sweep_config(cfg, sc, seed);
    const auto cells = threshold_sweep(sc, RandomStream(seed, kSampleStream), resolve_workers(a.sweep.workers));

    // The last (m, n) cell is the largest dimension of the schedule.
    const std::size_t base = cells.size() - 3;
    std::vector<CheckRow> rows;
    for (const auto& c : cells) {
        rows.push_back({"volume_m" + std::to_string(c.m) + "_n" + std::to_string(c.n) + "_tA" +
                            io::format_double(c.t_input),
                        c.volume.estimate, c.predicted_limit, true, c.volume.n_samples, "estimate vs predicted limit"});
    }
    const auto& low = cells[base];
    const auto& crit = cells[base + 1];
    const auto& high = cells[base + 2];
    rows.push_back({"below_threshold", low.volume.estimate, a.low_max, low.volume.estimate <= a.low_max,
                    low.volume.n_samples, "V(0.8/A) <= bound"});
    rows.push_back({"above_threshold", high.volume.estimate, a.high_min, high.volume.estimate >= a.high_min,
                    high.volume.n_samples, "V(1.25/A) >= bound"});
    if (std::isfinite(crit.predicted_limit)) {
        const double dev = std::fabs(crit.volume.estimate - crit.predicted_limit);
        rows.push_back({"critical", dev, a.critical_tol, dev <= a.critical_tol, crit.volume.n_samples,
                        "|V(1/A) - limit|"});
    }
    return emit_checks(a.sweep.out, out, cfg, rows, false);
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    const std::string& token = a.sweep.regime;
    if (token == "pmb-a" || token == "empirical-a") return verify_pmb(a, PmbKind::Radial, out);
    if (token == "pmb-b") return verify_pmb(a, PmbKind::Entries, out);
    if (volume_regime_from(token)) return verify_volume(a, out);
    if (auto r = regime_from(token)) return verify_regime(a, *r, out);
    throw InvalidConfig("unknown regime '" + token + "'");
}

void add_random_options(CLI::App* cmd, std::optional<std::uint64_t>& seed, unsigned& workers) {
    cmd->add_option("--seed", seed, "Master seed (required)");
    cmd->add_option("--workers", workers, "Worker threads (default: MIXNORM_THREADS or 1)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Volumes, sampling and limit laws for mixed-norm balls l_p^m(l_q^n)", "mixnorm"};
    app.require_subcommand(1);

    VolumeArgs volume;
    auto* c_volume = app.add_subcommand("volume", "Volume and normalized radius of B_{p,q}^{m,n}");
    c_volume->add_option("--m", volume.m, "Rows");
    c_volume->add_option("--n", volume.n, "Columns");
    c_volume->add_option("--p", volume.p, "Outer exponent");
    c_volume->add_option("--q", volume.q, "Inner exponent");
    c_volume->add_option("--spec,--order-k", volume.spec, "Order-k spec 'q:n,p:m,...', innermost first");
    c_volume->add_flag("--log", volume.log, "Report log-volume and log-radius");
    c_volume->add_flag("--verbose", volume.verbose, "Include the recursion-vs-product cross-check");
    add_output_options(c_volume, volume.out);

    NormArgs norm;
    auto* c_norm = app.add_subcommand("norm", "Mixed norm of an m x n matrix");
    c_norm->add_option("--m", norm.m, "Rows");
    c_norm->add_option("--n", norm.n, "Columns");
    c_norm->add_option("--p", norm.p, "Outer exponent");
    c_norm->add_option("--q", norm.q, "Inner exponent");
    c_norm->add_option("--values", norm.values, "Row-major comma-separated entries");
    add_output_options(c_norm, norm.out);

    ConstantArgs constant;
    auto* c_constant = app.add_subcommand("constant", "Threshold constants A_{p,q} and A_{p1,q1;p2,q2;n}");
    c_constant->add_option("--p", constant.p, "p of A_{p,q}");
    c_constant->add_option("--q", constant.q, "q of A_{p,q}");
    add_geometry(c_constant, constant.geo);
    c_constant->add_option("--theta-samples", constant.theta_samples, "Draws for E[||Theta||^p2]");
    add_random_options(c_constant, constant.seed, constant.workers);
    add_output_options(c_constant, constant.out);

    LimitArgs limit;
    auto* c_limit = app.add_subcommand("limit", "Limit law or limiting volume of a regime");
    c_limit->add_option("--regime", limit.regime, "Regime token")->required();
    add_geometry(c_limit, limit.geo);
    c_limit->add_option("--x", limit.x, "Points at which to evaluate the limit CDF")->delimiter(',');
    c_limit->add_option("--t", limit.t, "Dilation for volume regimes (default 1/A)");
    c_limit->add_option("--critical-m", limit.critical_m, "Limit M for the cor-1-8 critical case");
    c_limit->add_option("--theta-samples", limit.theta_samples, "Draws for E[||Theta||^p2]");
    add_random_options(c_limit, limit.seed, limit.workers);
    add_output_options(c_limit, limit.out);

    SampleArgs sample;
    auto* c_sample = app.add_subcommand("sample", "Uniform draws from B_{p,q}^{m,n}");
    c_sample->add_option("--m", sample.m, "Rows");
    c_sample->add_option("--n", sample.n, "Columns");
    c_sample->add_option("--p", sample.p, "Outer exponent");
    c_sample->add_option("--q", sample.q, "Inner exponent");
    c_sample->add_option("--count", sample.count, "Number of draws");
    add_random_options(c_sample, sample.seed, sample.workers);
    add_output_options(c_sample, sample.out);

    IntersectArgs intersect;
    auto* c_intersect = app.add_subcommand("intersect", "Monte Carlo intersection volume V^{m,n}(t)");
    add_geometry(c_intersect, intersect.geo);
    c_intersect->add_option("--t", intersect.t, "Dilation factor");
    c_intersect->add_option("--samples", intersect.samples, "Ball draws");
    c_intersect->add_flag("--timing", intersect.timing, "Append wall time (breaks byte reproducibility)");
    add_random_options(c_intersect, intersect.seed, intersect.workers);
    add_output_options(c_intersect, intersect.out);

    auto add_sweep_options = [](CLI::App* cmd, SweepArgs& s) {
        add_geometry(cmd, s.geo);
        cmd->add_option("--regime", s.regime, "Regime token");
        cmd->add_option("--m-list", s.m_list, "Comma-separated m schedule")->delimiter(',');
        cmd->add_option("--n-list", s.n_list, "Comma-separated n schedule")->delimiter(',');
        cmd->add_option("--samples", s.samples, "Draws per cell or check");
        cmd->add_option("--theta-samples", s.theta_samples, "Draws for E[||Theta||^p2]");
        cmd->add_option("--critical-m", s.critical_m, "Limit M for the cor-1-8 critical case");
        add_random_options(cmd, s.seed, s.workers);
        add_output_options(cmd, s.out);
    };

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Intersection volumes over an (m, n, t) grid");
    add_sweep_options(c_sweep, sweep);
    c_sweep->add_option("--t-list", sweep.t_list, "Comma-separated t values")->delimiter(',');
    c_sweep->add_option("--t-scale", sweep.t_scale, "absolute, or inverse-a for t = value / A")
        ->check(CLI::IsMember({"absolute", "inverse-a"}));

    VerifyArgs verify;
    verify.sweep.samples = 10000;
    auto* c_verify = app.add_subcommand("verify", "Check a limit regime by simulation");
    add_sweep_options(c_verify, verify.sweep);
    c_verify->add_option("--p", verify.p, "Ball exponent p (pmb regimes)");
    c_verify->add_option("--q", verify.q, "Ball exponent q (pmb regimes)");
    c_verify->add_option("--k", verify.k, "Rows checked (pmb regimes)");
    c_verify->add_option("--l", verify.l, "Columns checked (pmb-b)");
    c_verify->add_option("--trials", verify.trials, "Independent draws (empirical-a)");
    c_verify->add_option("--bias", verify.bias, "Finite-size allowance added to the KS null quantile");
    c_verify->add_option("--threshold", verify.threshold, "Explicit KS threshold");
    c_verify->add_flag("--calibrate", verify.calibrate, "Measure the finite-size bias instead of gating");
    c_verify->add_option("--low-max", verify.low_max, "Bound for V(0.8/A) in volume regimes");
    c_verify->add_option("--high-min", verify.high_min, "Bound for V(1.25/A) in volume regimes");
    c_verify->add_option("--critical-tol", verify.critical_tol, "Tolerance at t = 1/A in volume regimes");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "mixnorm: " << e.what() << '\n';
        return kExitInvalidConfig;
    }

    try {
        if (c_volume->parsed()) return cmd_volume(volume, out);
        if (c_norm->parsed()) return cmd_norm(norm, out);
        if (c_constant->parsed()) return cmd_constant(constant, out);
        if (c_limit->parsed()) return cmd_limit(limit, out);
        if (c_sample->parsed()) return cmd_sample(sample, out);
        if (c_intersect->parsed()) return cmd_intersect(intersect, out);
        if (c_sweep->parsed()) return cmd_sweep(sweep, out);
        if (c_verify->parsed()) return cmd_verify(verify, out);
    } catch (const InvalidConfig& e) {
        err << "mixnorm: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const DomainError& e) {
        err << "mixnorm: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    err << "mixnorm: no subcommand\n";
    return kExitInvalidConfig;
}

}  // namespace mixnorm
