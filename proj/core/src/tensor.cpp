#include "wnlab/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace wnlab {

double Tensor3::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Tensor3::symmetry_defect() const noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = j + 1; k < n_; ++k)
                worst = std::max(worst, std::abs((*this)(i, j, k) - (*this)(i, k, j)));
    return worst;
}

void Tensor3::contract(std::span<const double> x, std::span<double> out) const {
    if (x.size() != n_ || out.size() != n_)
        throw DimensionError("Tensor3::contract: vector length does not match tensor dimension");
    const double* t = data_.data();
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            double row = 0.0;
            for (std::size_t k = 0; k < n_; ++k) row += t[k] * x[k];
            acc += row * x[j];
            t += n_;
        }
        out[i] = acc;
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

double Matrix::bilinear(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != n_ || y.size() != n_)
        throw DimensionError("Matrix::bilinear: vector length does not match matrix dimension");
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_; ++j) row += (*this)(i, j) * y[j];
        acc += x[i] * row;
    }
    return acc;
}

void Matrix::apply(std::span<const double> y, std::span<double> out) const {
    if (y.size() != n_ || out.size() != n_)
        throw DimensionError("Matrix::apply: vector length does not match matrix dimension");
    for (std::size_t i = 0; i < n_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_; ++j) row += (*this)(i, j) * y[j];
        out[i] = row;
    }
}

double max_norm(std::span<const double> x) noexcept {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double euclidean_norm(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

bool all_finite(std::span<const double> x) noexcept {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace wnlab
