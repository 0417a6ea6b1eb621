#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wnlab/algebra.hpp"
#include "wnlab/tensor.hpp"

namespace wnlab {

/// Lie-algebraic origin of a system, carried along so that consumers can use
/// the conserved quantity. Never inferred from raw coefficients.
struct HamiltonianStructure {
    LieAlgebra algebra;
    QuadraticHamiltonian hamiltonian;
};

/// N coupled semilinear scalar waves
///
///   box phi_A = F[A][B][C] (d_t phi_B)(d_t phi_C) + G[A][B][C] m^-1(d phi_B, d phi_C)
///
/// with m^-1(d f, d g) = -(d_t f)(d_t g) + sum_i (d_i f)(d_i g). Both arrays are
/// symmetric in their last two indices. The wave operator sign convention is
/// box = d_t^2 - Laplacian; see wave1d.hpp.
class WaveSystemSpec {
public:
    /// Throws std::invalid_argument on asymmetric or non-finite coefficients,
    /// DimensionError when the arrays disagree with n_fields.
    WaveSystemSpec(std::size_t n_fields, Tensor3 bad_coeffs, Tensor3 nullform_coeffs,
                   std::string label = {}, std::optional<HamiltonianStructure> structure = {});

    std::size_t n_fields() const noexcept { return n_; }
    const Tensor3& bad_coeffs() const noexcept { return bad_; }
    const Tensor3& nullform_coeffs() const noexcept { return null_; }
    const std::string& label() const noexcept { return label_; }
    const std::optional<HamiltonianStructure>& structure() const noexcept { return structure_; }

private:
    std::size_t n_;
    Tensor3 bad_;
    Tensor3 null_;
    std::string label_;
    std::optional<HamiltonianStructure> structure_;
};

/// dPhi_A/ds = A[A][B][C] Phi_B Phi_C with A = F/4.
class AsymptoticSystem {
public:
    AsymptoticSystem(Tensor3 coeffs, std::string provenance,
                     std::optional<HamiltonianStructure> structure = {});

    std::size_t n_fields() const noexcept { return coeffs_.dim(); }
    const Tensor3& coeffs() const noexcept { return coeffs_; }
    const std::string& provenance() const noexcept { return provenance_; }
    const std::optional<HamiltonianStructure>& structure() const noexcept { return structure_; }

    void rhs(std::span<const double> phi, std::span<double> out) const { coeffs_.contract(phi, out); }
    Vector rhs(std::span<const double> phi) const;

    /// max_A sum_BC |A[A][B][C]|, so |rhs(phi)|_inf <= quadratic_bound() |phi|_inf^2.
    double quadratic_bound() const noexcept { return bound_; }

    /// Same system with every coefficient negated.
    AsymptoticSystem negated() const;

private:
    Tensor3 coeffs_;
    std::string provenance_;
    std::optional<HamiltonianStructure> structure_;
    double bound_ = 0.0;
};

AsymptoticSystem asymptotic_system(const WaveSystemSpec& spec);

/// Wave system whose asymptotic system is the Euler flow of (alg, ham):
/// F = 4 * sym(E) with E from euler_coefficients().
WaveSystemSpec from_hamiltonian(const LieAlgebra& alg, const QuadraticHamiltonian& ham,
                                std::string label = "hamiltonian");

/// Built-in systems: "null_form", "john", "weak_null_chain", "super_exponential",
/// "rigid_body" (three inertias). Throws std::invalid_argument for unknown names
/// or wrong parameter counts.
WaveSystemSpec catalogue(std::string_view name, std::span<const double> params = {});

struct CatalogueEntry {
    std::string name;
    std::size_t n_fields;
    std::size_t n_params;
    std::string equation;
    std::string behaviour;
};

const std::vector<CatalogueEntry>& catalogue_entries();

}  // namespace wnlab
