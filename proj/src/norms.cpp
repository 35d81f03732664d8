#include "mixnorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixnorm {
namespace {

// Neumaier-compensated accumulator in long double.
class CompensatedSum {
  public:
    void add(long double v) {
        const long double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    long double value() const { return sum_ + comp_; }

  private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw DomainError("matrix data size does not match rows * cols");
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> data) : dims_(std::move(dims)), data_(std::move(data)) {
    if (dims_.empty()) throw DomainError("tensor must have order >= 1");
    std::size_t total = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw DomainError("tensor dims must be positive");
        total *= d;
    }
    if (total != data_.size()) throw DomainError("tensor data length does not equal the product of dims");
}

MixedNormSpec::MixedNormSpec(std::vector<NormLevel> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw DomainError("mixed norm spec must have at least one level");
    for (const auto& level : levels_) {
        if (level.dim == 0) throw DomainError("mixed norm spec dims must be positive");
    }
}

MixedNormSpec MixedNormSpec::order2(Exponent p, Exponent q, std::size_t m, std::size_t n) {
    return MixedNormSpec({{q, n}, {p, m}});
}

std::vector<std::size_t> MixedNormSpec::dims() const {
    std::vector<std::size_t> out;
    out.reserve(levels_.size());
    for (const auto& level : levels_) out.push_back(level.dim);
    return out;
}

double MixedNormSpec::total_dim() const {
    double total = 1.0;
    for (const auto& level : levels_) total *= static_cast<double>(level.dim);
    return total;
}

double lp_power_sum(std::span<const double> x, double p) {
    CompensatedSum acc;
    if (p == 1.0) {
        for (double v : x) acc.add(std::fabs(v));
    } else if (p == 2.0) {
        for (double v : x) acc.add(static_cast<long double>(v) * v);
    } else {
        for (double v : x) acc.add(std::pow(std::fabs(v), p));
    }
    return static_cast<double>(acc.value());
}

double lp_norm(std::span<const double> x, Exponent p) {
    if (x.empty()) throw DomainError("lp_norm of an empty vector");
    const double largest = max_abs(x);
    if (p.is_infinite() || largest == 0.0) return largest;
    const double pv = p.value();
    if (pv == 1.0) return lp_power_sum(x, 1.0);

    // Factor out the largest entry so |x_i|^p neither overflows nor underflows.
    CompensatedSum acc;
    if (pv == 2.0) {
        for (double v : x) {
            const long double r = v / largest;
            acc.add(r * r);
        }
        return largest * static_cast<double>(std::sqrt(acc.value()));
    }
    for (double v : x) acc.add(std::pow(std::fabs(v) / largest, pv));
    return largest * std::pow(static_cast<double>(acc.value()), 1.0 / pv);
}

double mixed_norm(std::span<const double> data, std::size_t m, std::size_t n, Exponent p, Exponent q) {
    if (m == 0 || n == 0) throw DomainError("mixed_norm of an empty matrix");
    if (data.size() != m * n) throw DomainError("mixed_norm: data size does not match m * n");
    std::vector<double> row_norms(m);
    for (std::size_t i = 0; i < m; ++i) row_norms[i] = lp_norm(data.subspan(i * n, n), q);
    return lp_norm(row_norms, p);
}

double mixed_norm(const Matrix& x, Exponent p, Exponent q) {
    return mixed_norm(x.data(), x.rows(), x.cols(), p, q);
}

double mixed_norm_k(const Tensor& x, const MixedNormSpec& spec) {
    if (spec.dims() != x.dims()) throw DomainError("mixed norm spec does not match tensor dims");
    std::vector<double> current(x.data().begin(), x.data().end());
    std::vector<double> slice;
    const auto& levels = spec.levels();
    for (const auto& level : levels) {
        // The leading index is the one being reduced; it is the slowest-varying.
        const std::size_t stride = current.size() / level.dim;
        std::vector<double> next(stride);
        slice.resize(level.dim);
        for (std::size_t rest = 0; rest < stride; ++rest) {
            for (std::size_t i = 0; i < level.dim; ++i) slice[i] = current[i * stride + rest];
            next[rest] = lp_norm(slice, level.exponent);
        }
        current = std::move(next);
    }
    return current.front();
}

}  // namespace mixnorm
