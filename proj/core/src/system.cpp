#include "wnlab/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wnlab {

namespace {

void check_coefficients(const Tensor3& t, std::size_t n, const char* what) {
    if (t.dim() != n)
        throw DimensionError(std::string("WaveSystemSpec: ") + what + " has wrong dimension");
    if (!all_finite(t.raw()))
        throw std::invalid_argument(std::string("WaveSystemSpec: ") + what + " has non-finite entries");
    if (t.symmetry_defect() > 1e-12 * std::max(1.0, t.max_abs()))
        throw std::invalid_argument(std::string("WaveSystemSpec: ") + what +
                                    " is not symmetric in its last two indices");
}

double quadratic_bound_of(const Tensor3& t) {
    const std::size_t n = t.dim();
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) row += std::abs(t(a, b, c));
        worst = std::max(worst, row);
    }
    return worst;
}

std::string format_params(std::string_view name, std::span<const double> params) {
    std::ostringstream os;
    os << name << '(';
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
    os << ')';
    return os.str();
}

}  // namespace

WaveSystemSpec::WaveSystemSpec(std::size_t n_fields, Tensor3 bad_coeffs, Tensor3 nullform_coeffs,
                               std::string label, std::optional<HamiltonianStructure> structure)
    : n_(n_fields),
      bad_(std::move(bad_coeffs)),
      null_(std::move(nullform_coeffs)),
      label_(std::move(label)),
      structure_(std::move(structure)) {
    if (n_ == 0) throw DimensionError("WaveSystemSpec: n_fields must be positive");
    check_coefficients(bad_, n_, "bad_coeffs");
    check_coefficients(null_, n_, "nullform_coeffs");
    if (structure_ && (structure_->algebra.dim() != n_ || structure_->hamiltonian.dim() != n_))
        throw DimensionError("WaveSystemSpec: Hamiltonian structure dimension differs from n_fields");
}

AsymptoticSystem::AsymptoticSystem(Tensor3 coeffs, std::string provenance,
                                   std::optional<HamiltonianStructure> structure)
    : coeffs_(std::move(coeffs)), provenance_(std::move(provenance)), structure_(std::move(structure)) {
    if (coeffs_.dim() == 0) throw DimensionError("AsymptoticSystem: dimension must be positive");
    if (structure_ && structure_->hamiltonian.dim() != coeffs_.dim())
        throw DimensionError("AsymptoticSystem: Hamiltonian structure dimension differs");
    bound_ = quadratic_bound_of(coeffs_);
}

Vector AsymptoticSystem::rhs(std::span<const double> phi) const {
    Vector out(n_fields());
    coeffs_.contract(phi, out);
    return out;
}

AsymptoticSystem AsymptoticSystem::negated() const {
    Tensor3 c = coeffs_;
    for (double& v : c.raw()) v = -v;
    // Negation destroys the Euler form's sign convention but not its conservation
    // law: H is conserved by -E as well.
    return AsymptoticSystem(std::move(c), "-(" + provenance_ + ")", structure_);
}

AsymptoticSystem asymptotic_system(const WaveSystemSpec& spec) {
    Tensor3 a = spec.bad_coeffs();
    for (double& v : a.raw()) v *= 0.25;
    return AsymptoticSystem(std::move(a), spec.label(), spec.structure());
}

WaveSystemSpec from_hamiltonian(const LieAlgebra& alg, const QuadraticHamiltonian& ham, std::string label) {
    const std::size_t n = alg.dim();
    if (ham.dim() != n) throw DimensionError("from_hamiltonian: algebra and Hamiltonian dimensions differ");
    const Tensor3 e = euler_coefficients(alg, ham);
    Tensor3 f(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) f(a, b, c) = 2.0 * (e(a, b, c) + e(a, c, b));
    return WaveSystemSpec(n, std::move(f), Tensor3(n), std::move(label), HamiltonianStructure{alg, ham});
}

const std::vector<CatalogueEntry>& catalogue_entries() {
    static const std::vector<CatalogueEntry> entries{
        {"null_form", 1, 0, "box phi = (d_t phi)^2 - |grad phi|^2",
         "satisfies the classical null condition; small data exist globally"},
        {"john", 1, 0, "John's example, box phi = (d_t phi)^2",
         "all nontrivial solutions blow up"},
        {"weak_null_chain", 2, 0, "box phi_0 = 0, box phi_1 = (d_t phi_0)^2",
         "fails the null condition, satisfies the weak null condition (growth eps^2 s)"},
        {"super_exponential", 3, 0,
         "box phi_0 = 0, box phi_1 = (d_t phi_0)(d_t phi_1), box phi_2 = (d_t phi_1)(d_t phi_2)",
         "fails weak null condition (growth exp(exp(eps s)))"},
        {"rigid_body", 3, 3, "model Euler equations for a rigid body with inertias (I1,I2,I3)",
         "bounded and stable: H = sum y_a^2 / (2 I_a) is conserved"},
    };
    return entries;
}

WaveSystemSpec catalogue(std::string_view name, std::span<const double> params) {
    const CatalogueEntry* entry = nullptr;
    for (const auto& e : catalogue_entries())
        if (e.name == name) entry = &e;
    if (!entry) throw std::invalid_argument("catalogue: unknown system '" + std::string(name) + "'");
    if (params.size() != entry->n_params) {
        std::ostringstream os;
        os << "catalogue: system '" << name << "' takes " << entry->n_params << " parameter(s), got "
           << params.size();
        throw std::invalid_argument(os.str());
    }
    const std::size_t n = entry->n_fields;
    Tensor3 f(n), g(n);
    if (name == "null_form") {
        g(0, 0, 0) = -1.0;
    } else if (name == "john") {
        f(0, 0, 0) = 1.0;
    } else if (name == "weak_null_chain") {
        f(1, 0, 0) = 1.0;
    } else if (name == "super_exponential") {
        f(1, 0, 1) = f(1, 1, 0) = 0.5;
        f(2, 1, 2) = f(2, 2, 1) = 0.5;
    } else {
        auto [alg, ham] = rigid_body(params[0], params[1], params[2]);
        return from_hamiltonian(alg, ham, format_params(name, params));
    }
    return WaveSystemSpec(n, std::move(f), std::move(g), std::string(name));
}

}  // namespace wnlab
