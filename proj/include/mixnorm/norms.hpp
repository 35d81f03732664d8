#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mixnorm/exponent.hpp"

namespace mixnorm {

/// Dense real m x n matrix, row-major.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Real order-k array with dims (d_1, ..., d_k), row-major (last index
/// fastest).
class Tensor {
  public:
    Tensor(std::vector<std::size_t> dims, std::vector<double> data);

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::span<const double> data() const { return data_; }
    std::size_t order() const { return dims_.size(); }

  private:
    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

struct NormLevel {
    Exponent exponent;
    std::size_t dim;
};

/// Exponents and dimensions of an order-k mixed norm, innermost level first:
/// level j applies the p_j-norm over tensor index j, after all levels < j.
/// The order-2 norm ||.||_{p,q} on m x n matrices is the spec [(q, n), (p, m)]
/// applied to the transposed (n x m) array.
class MixedNormSpec {
  public:
    explicit MixedNormSpec(std::vector<NormLevel> levels);

    /// Spec of ||.||_{p,q} on m x n matrices: [(q, n), (p, m)].
    static MixedNormSpec order2(Exponent p, Exponent q, std::size_t m, std::size_t n);

    const std::vector<NormLevel>& levels() const { return levels_; }
    std::size_t order() const { return levels_.size(); }
    std::vector<std::size_t> dims() const;
    double total_dim() const;

  private:
    std::vector<NormLevel> levels_;
};

/// (sum |x_i|^p)^(1/p), or max |x_i| for p = inf. Throws on empty input.
double lp_norm(std::span<const double> x, Exponent p);

/// sum |x_i|^p for finite p, accumulated with compensated summation.
double lp_power_sum(std::span<const double> x, double p);

/// ||x||_{p,q}: q-norm of each row, then the p-norm of the row norms.
double mixed_norm(const Matrix& x, Exponent p, Exponent q);

/// Same for a flat row-major m x n buffer.
double mixed_norm(std::span<const double> data, std::size_t m, std::size_t n, Exponent p, Exponent q);

/// Recursive order-k mixed norm, innermost level first.
double mixed_norm_k(const Tensor& x, const MixedNormSpec& spec);

}  // namespace mixnorm
