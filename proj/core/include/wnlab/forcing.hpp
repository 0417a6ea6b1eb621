#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "wnlab/tensor.hpp"

namespace wnlab {

enum class ForcingKind { zero, random_piecewise, adversarial_aligned };

/// Norm in which the forcing envelope |f(s)| <= C eps exp(-delta s) holds.
enum class ForcingNorm { max_norm, hamiltonian };

std::string to_string(ForcingKind k);
std::string to_string(ForcingNorm k);
ForcingKind forcing_kind_from_string(const std::string& s);

struct ForcingParams {
    double amplitude = 1.0;  // C
    double epsilon = 0.0;    // eps
    double decay = 1.0;      // delta
    std::uint64_t seed = 0;
    double segment_length = 1.0;
};

/// Exponentially decaying perturbation f(s, Phi) of an asymptotic system.
///
/// random_piecewise: a random unit direction (in the declared norm) held
/// constant on each segment [k L, (k+1) L); the direction of segment k is a
/// pure function of (seed, k), so evaluation is reentrant.
///
/// adversarial_aligned: f = env(s) Phi / |Phi|, which saturates
/// d|Phi|/ds <= |f| in the declared norm. Zero at Phi = 0.
class Forcing {
public:
    /// Identically zero forcing.
    Forcing() = default;

    Forcing(ForcingKind kind, std::size_t n_fields, ForcingParams params,
            std::optional<Matrix> hamiltonian_form = {});

    ForcingKind kind() const noexcept { return kind_; }
    ForcingNorm norm_kind() const noexcept { return form_ ? ForcingNorm::hamiltonian : ForcingNorm::max_norm; }
    const ForcingParams& params() const noexcept { return params_; }
    std::size_t n_fields() const noexcept { return n_; }

    /// C eps exp(-delta s); 0 for the zero kind.
    double envelope(double s) const noexcept;

    /// Norm of x in the declared norm.
    double norm(std::span<const double> x) const;

    /// The segment (random_piecewise) is taken from segment_s when given, so a
    /// solver step ending exactly on a breakpoint keeps one direction.
    void evaluate(double s, std::span<const double> phi, std::span<double> out,
                  double segment_s = std::numeric_limits<double>::quiet_NaN()) const;

    /// First discontinuity strictly after s, or +infinity.
    double next_breakpoint(double s) const noexcept;

    /// Direction used on segment k (unit in the declared norm).
    Vector segment_direction(std::uint64_t k) const;

private:
    void fill_direction(std::uint64_t k, std::span<double> out) const;

    ForcingKind kind_ = ForcingKind::zero;
    std::size_t n_ = 0;
    ForcingParams params_{};
    std::optional<Matrix> form_;
};

/// Validating factory. Non-zero kinds require C, eps, delta > 0 (and a
/// positive segment length); otherwise std::invalid_argument.
Forcing make_forcing(ForcingKind kind, std::size_t n_fields, double amplitude, double epsilon, double decay,
                     std::uint64_t seed = 0, std::optional<Matrix> hamiltonian_form = {},
                     double segment_length = 1.0);

}  // namespace wnlab
