#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wnlab/tensor.hpp"

namespace wnlab {

/// Finite-dimensional Lie algebra in a basis e_a, stored through its
/// structure constants. structure(c, b, a) = C^c_{ba} where
/// [e_b, e_a] = C^c_{ba} e_c (output index first).
///
/// Construction only checks shape. Whether the constants actually define a
/// Lie algebra is answered by validate_algebra().
class LieAlgebra {
public:
    LieAlgebra(Tensor3 structure, std::string label = {});

    std::size_t dim() const noexcept { return structure_.dim(); }
    const Tensor3& structure() const noexcept { return structure_; }
    const std::string& label() const noexcept { return label_; }

    /// [x, y]_c = C^c_{ba} x_b y_a
    Vector bracket(std::span<const double> x, std::span<const double> y) const;

    static LieAlgebra so3();
    static LieAlgebra abelian(std::size_t n);
    /// Two-dimensional non-abelian algebra, [e_1, e_2] = e_1.
    static LieAlgebra affine_line();

private:
    Tensor3 structure_;
    std::string label_;
};

/// Positive-definite quadratic form on the dual space, H(y) = H~^{ab} y_a y_b.
/// The constructor rejects non-square, non-symmetric or non-positive-definite
/// input with std::domain_error (DimensionError for shape problems).
class QuadraticHamiltonian {
public:
    explicit QuadraticHamiltonian(Matrix form);

    std::size_t dim() const noexcept { return form_.dim(); }
    const Matrix& form() const noexcept { return form_; }
    double min_eigenvalue() const noexcept { return lambda_min_; }
    double max_eigenvalue() const noexcept { return lambda_max_; }

    /// Norm induced by the form, |y|_H = sqrt(H(y)).
    double norm(std::span<const double> y) const;

private:
    Matrix form_;
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
};

/// Symmetric-part eigenvalue check without throwing; used by callers that
/// need to report rather than reject.
struct DefinitenessReport {
    double symmetry_defect = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool positive_definite = false;
};
DefinitenessReport inspect_form(const Matrix& form, double tol = 1e-12);

struct IdentityViolation {
    std::string identity;              // "antisymmetry" or "jacobi"
    std::array<std::size_t, 4> index{};  // (c,b,a,-) or (a,b,c,d)
    double residual = 0.0;
};

struct AlgebraReport {
    bool ok = true;
    double worst_antisymmetry = 0.0;
    double worst_jacobi = 0.0;
    /// Worst offending entry per violated identity.
    std::vector<IdentityViolation> violations;
};

inline constexpr double kAlgebraTolerance = 1e-12;

AlgebraReport validate_algebra(const LieAlgebra& alg, double tol = kAlgebraTolerance);

/// Default overall factor of the Euler generator. With H~ = diag(1/(2 I_a)) it
/// reproduces I_1 dOmega_1/ds = (I_2 - I_3) Omega_2 Omega_3 for y_a = I_a Omega_a.
inline constexpr double kEulerFactor = 2.0;

/// dy_a/ds = factor * C^c_{ba} H~^{bd} y_c y_d
Vector euler_rhs(const LieAlgebra& alg, const QuadraticHamiltonian& ham,
                 std::span<const double> y, double factor = kEulerFactor);

/// Quadratic coefficients E[a][c][d] = factor * sum_b C^c_{ba} H~^{bd}
/// (not symmetrized), so that dy_a/ds = E[a][c][d] y_c y_d.
Tensor3 euler_coefficients(const LieAlgebra& alg, const QuadraticHamiltonian& ham,
                           double factor = kEulerFactor);

double hamiltonian_value(const QuadraticHamiltonian& ham, std::span<const double> y);

/// so(3) with H~ = diag(1/(2 I_a)); throws std::domain_error for I_a <= 0.
std::pair<LieAlgebra, QuadraticHamiltonian> rigid_body(double i1, double i2, double i3);

}  // namespace wnlab
