#include "wnlab/forcing.hpp"

#include "random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wnlab {

using detail::splitmix64;

std::string to_string(ForcingKind k) {
    switch (k) {
        case ForcingKind::zero: return "zero";
        case ForcingKind::random_piecewise: return "random_piecewise";
        case ForcingKind::adversarial_aligned: return "adversarial_aligned";
    }
    return "unknown";
}

std::string to_string(ForcingNorm k) { return k == ForcingNorm::hamiltonian ? "hamiltonian" : "max_norm"; }

ForcingKind forcing_kind_from_string(const std::string& s) {
    if (s == "zero") return ForcingKind::zero;
    if (s == "random_piecewise") return ForcingKind::random_piecewise;
    if (s == "adversarial_aligned") return ForcingKind::adversarial_aligned;
    throw std::invalid_argument("unknown forcing kind '" + s + "'");
}

Forcing::Forcing(ForcingKind kind, std::size_t n_fields, ForcingParams params, std::optional<Matrix> hamiltonian_form)
    : kind_(kind), n_(n_fields), params_(params), form_(std::move(hamiltonian_form)) {
    if (form_ && form_->dim() != n_) throw DimensionError("Forcing: Hamiltonian form dimension differs");
}

double Forcing::envelope(double s) const noexcept {
    if (kind_ == ForcingKind::zero) return 0.0;
    return params_.amplitude * params_.epsilon * std::exp(-params_.decay * s);
}

double Forcing::norm(std::span<const double> x) const {
    if (form_) return std::sqrt(std::max(0.0, form_->bilinear(x, x)));
    return max_norm(x);
}

void Forcing::fill_direction(std::uint64_t k, std::span<double> out) const {
    // Counter-based Box-Muller: component i of segment k depends only on (seed, k, i).
    const std::uint64_t key = splitmix64(params_.seed ^ splitmix64(k + 1));
    constexpr double inv53 = 1.0 / 9007199254740992.0;
    double nrm = 0.0;
    for (std::uint64_t attempt = 0; nrm == 0.0; ++attempt) {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::uint64_t c = key + 2 * (i + n_ * attempt);
            const double u1 = (static_cast<double>(splitmix64(c) >> 11) + 0.5) * inv53;
            const double u2 = (static_cast<double>(splitmix64(c + 1) >> 11) + 0.5) * inv53;
            out[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
        nrm = norm(out);
    }
    for (double& v : out) v /= nrm;
}

Vector Forcing::segment_direction(std::uint64_t k) const {
    Vector d(n_);
    fill_direction(k, d);
    return d;
}

void Forcing::evaluate(double s, std::span<const double> phi, std::span<double> out, double segment_s) const {
    if (out.size() != n_ && kind_ != ForcingKind::zero)
        throw DimensionError("Forcing::evaluate: output length mismatch");
    switch (kind_) {
        case ForcingKind::zero:
            for (double& v : out) v = 0.0;
            return;
        case ForcingKind::random_piecewise: {
            const double at = std::isnan(segment_s) ? s : segment_s;
            const auto k = static_cast<std::uint64_t>(std::max(0.0, std::floor(at / params_.segment_length)));
            fill_direction(k, out);
            const double env = envelope(s);
            for (double& v : out) v *= env;
            return;
        }
        case ForcingKind::adversarial_aligned: {
            const double nrm = norm(phi);
            if (nrm == 0.0 || !std::isfinite(nrm)) {
                for (double& v : out) v = 0.0;
                return;
            }
            const double scale = envelope(s) / nrm;
            for (std::size_t i = 0; i < n_; ++i) out[i] = scale * phi[i];
            return;
        }
    }
}

double Forcing::next_breakpoint(double s) const noexcept {
    if (kind_ != ForcingKind::random_piecewise) return std::numeric_limits<double>::infinity();
    const double L = params_.segment_length;
    double next = (std::floor(s / L) + 1.0) * L;
    if (next <= s) next += L;
    return next;
}

Forcing make_forcing(ForcingKind kind, std::size_t n_fields, double amplitude, double epsilon, double decay,
                     std::uint64_t seed, std::optional<Matrix> hamiltonian_form, double segment_length) {
    if (kind != ForcingKind::zero) {
        if (!(amplitude > 0.0) || !(epsilon > 0.0) || !(decay > 0.0))
            throw std::invalid_argument("make_forcing: C, eps and delta must be positive");
        if (!(segment_length > 0.0)) throw std::invalid_argument("make_forcing: segment length must be positive");
    }
    return Forcing(kind, n_fields, ForcingParams{amplitude, epsilon, decay, seed, segment_length},
                   std::move(hamiltonian_form));
}

}  // namespace wnlab
