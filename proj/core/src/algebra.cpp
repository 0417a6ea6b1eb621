#include "wnlab/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace wnlab {

LieAlgebra::LieAlgebra(Tensor3 structure, std::string label)
    : structure_(std::move(structure)), label_(std::move(label)) {
    if (structure_.dim() == 0) throw DimensionError("LieAlgebra: dimension must be positive");
}

Vector LieAlgebra::bracket(std::span<const double> x, std::span<const double> y) const {
    const std::size_t n = dim();
    if (x.size() != n || y.size() != n) throw DimensionError("LieAlgebra::bracket: dimension mismatch");
    Vector out(n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t a = 0; a < n; ++a) out[c] += structure_(c, b, a) * x[b] * y[a];
    return out;
}

LieAlgebra LieAlgebra::so3() {
    Tensor3 c(3);
    // C^c_{ba} = epsilon_{bac}
    auto eps = [](std::size_t i, std::size_t j, std::size_t k) -> double {
        if (i == j || j == k || i == k) return 0.0;
        return ((i + 1) % 3 == j) ? 1.0 : -1.0;
    };
    for (std::size_t cc = 0; cc < 3; ++cc)
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t a = 0; a < 3; ++a) c(cc, b, a) = eps(b, a, cc);
    return LieAlgebra(std::move(c), "so(3)");
}

LieAlgebra LieAlgebra::abelian(std::size_t n) { return LieAlgebra(Tensor3(n), "abelian"); }

LieAlgebra LieAlgebra::affine_line() {
    Tensor3 c(2);
    c(0, 0, 1) = 1.0;
    c(0, 1, 0) = -1.0;
    return LieAlgebra(std::move(c), "aff(1)");
}

DefinitenessReport inspect_form(const Matrix& form, double tol) {
    DefinitenessReport rep;
    const auto n = static_cast<Eigen::Index>(form.dim());
    if (n == 0) return rep;
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = form(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(m(i, j) - form(j, i)));
        }
    if (!m.allFinite()) return rep;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()),
                                                          Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = solver.eigenvalues().minCoeff();
    rep.max_eigenvalue = solver.eigenvalues().maxCoeff();
    rep.positive_definite = rep.symmetry_defect <= tol && rep.min_eigenvalue > tol;
    return rep;
}

QuadraticHamiltonian::QuadraticHamiltonian(Matrix form) : form_(std::move(form)) {
    if (form_.dim() == 0) throw DimensionError("QuadraticHamiltonian: dimension must be positive");
    const auto rep = inspect_form(form_);
    if (rep.symmetry_defect > kAlgebraTolerance)
        throw std::domain_error("QuadraticHamiltonian: form is not symmetric");
    if (!rep.positive_definite)
        throw std::domain_error("QuadraticHamiltonian: form is not positive definite");
    lambda_min_ = rep.min_eigenvalue;
    lambda_max_ = rep.max_eigenvalue;
}

double QuadraticHamiltonian::norm(std::span<const double> y) const {
    return std::sqrt(std::max(0.0, hamiltonian_value(*this, y)));
}

AlgebraReport validate_algebra(const LieAlgebra& alg, double tol) {
    const Tensor3& C = alg.structure();
    const std::size_t n = alg.dim();
    AlgebraReport rep;

    IdentityViolation anti{"antisymmetry", {}, 0.0};
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t a = b; a < n; ++a) {
                const double r = std::abs(C(c, b, a) + C(c, a, b));
                if (r > anti.residual) anti = {"antisymmetry", {c, b, a, 0}, r};
            }
    rep.worst_antisymmetry = anti.residual;

    IdentityViolation jac{"jacobi", {}, 0.0};
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) {
                    double s = 0.0;
                    for (std::size_t e = 0; e < n; ++e)
                        s += C(e, a, b) * C(d, e, c) + C(e, b, c) * C(d, e, a) + C(e, c, a) * C(d, e, b);
                    const double r = std::abs(s);
                    if (r > jac.residual) jac = {"jacobi", {a, b, c, d}, r};
                }
    rep.worst_jacobi = jac.residual;

    if (anti.residual > tol) rep.violations.push_back(anti);
    if (jac.residual > tol) rep.violations.push_back(jac);
    rep.ok = rep.violations.empty();
    return rep;
}

Tensor3 euler_coefficients(const LieAlgebra& alg, const QuadraticHamiltonian& ham, double factor) {
    const std::size_t n = alg.dim();
    if (ham.dim() != n) throw DimensionError("euler_coefficients: algebra and Hamiltonian dimensions differ");
    const Tensor3& C = alg.structure();
    const Matrix& H = ham.form();
    Tensor3 E(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t d = 0; d < n; ++d) {
                double s = 0.0;
                for (std::size_t b = 0; b < n; ++b) s += C(c, b, a) * H(b, d);
                E(a, c, d) = factor * s;
            }
    return E;
}

Vector euler_rhs(const LieAlgebra& alg, const QuadraticHamiltonian& ham, std::span<const double> y,
                 double factor) {
    const std::size_t n = alg.dim();
    if (ham.dim() != n || y.size() != n) throw DimensionError("euler_rhs: dimension mismatch");
    const Tensor3& C = alg.structure();
    // grad_b = H~^{bd} y_d, then dy_a = factor * C^c_{ba} y_c grad_b
    Vector grad(n);
    ham.form().apply(y, grad);
    Vector out(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t b = 0; b < n; ++b) s += C(c, b, a) * y[c] * grad[b];
        out[a] = factor * s;
    }
    return out;
}

double hamiltonian_value(const QuadraticHamiltonian& ham, std::span<const double> y) {
    if (y.size() != ham.dim()) throw DimensionError("hamiltonian_value: dimension mismatch");
    return ham.form().bilinear(y, y);
}

std::pair<LieAlgebra, QuadraticHamiltonian> rigid_body(double i1, double i2, double i3) {
    for (double i : {i1, i2, i3})
        if (!(i > 0.0) || !std::isfinite(i))
            throw std::domain_error("rigid_body: moments of inertia must be positive and finite");
    const std::array<double, 3> d{1.0 / (2.0 * i1), 1.0 / (2.0 * i2), 1.0 / (2.0 * i3)};
    return {LieAlgebra::so3(), QuadraticHamiltonian(Matrix::diagonal(d))};
}

}  // namespace wnlab
