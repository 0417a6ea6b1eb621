#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wnlab {

/// Thrown when array shapes or dimensions of cooperating objects disagree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Vector = std::vector<double>;

/// Dense cubic rank-3 array T[i][j][k], i,j,k in [0, n), row-major.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(std::size_t n) : n_(n), data_(n * n * n, 0.0) {}

    std::size_t dim() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
        return data_[(i * n_ + j) * n_ + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return data_[(i * n_ + j) * n_ + k];
    }

    std::span<const double> raw() const noexcept { return data_; }
    std::span<double> raw() noexcept { return data_; }

    /// Largest absolute entry; 0 for an empty tensor.
    double max_abs() const noexcept;

    /// Worst violation of T[i][j][k] == T[i][k][j].
    double symmetry_defect() const noexcept;

    /// T[i] contracted twice with x: out_i = sum_jk T[i][j][k] x_j x_k.
    void contract(std::span<const double> x, std::span<double> out) const;

    bool operator==(const Tensor3&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Dense square matrix M[i][j], row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t dim() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    /// x^T M y
    double bilinear(std::span<const double> x, std::span<const double> y) const;
    /// out = M y
    void apply(std::span<const double> y, std::span<double> out) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

double max_norm(std::span<const double> x) noexcept;
double euclidean_norm(std::span<const double> x) noexcept;
bool all_finite(std::span<const double> x) noexcept;

}  // namespace wnlab
