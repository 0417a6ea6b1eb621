#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wnlab/algebra.hpp"
#include "wnlab/ode.hpp"
#include "wnlab/system.hpp"

namespace wnlab {

enum class Verdict {
    classical_null,
    bounded_stable,
    linear_growth,
    exponential_growth,
    super_exponential,
    blowup,
    /// Condition 1 failure without blow-up: some trial exceeded fail_threshold * eps.
    unbounded,
};
std::string to_string(Verdict v);

/// Least-squares fit of one growth model to the sup-norm envelope E(s) over the
/// final half of a trajectory. sse is measured on log E for every model so the
/// models are comparable; r_squared is measured in the model's own linearised
/// coordinates (E, log E or log log E).
struct GrowthFit {
    std::string model;  // "constant", "linear", "exponential", "super_exponential"
    bool admissible = false;
    double intercept = 0.0;
    double rate = 0.0;
    double sse = 0.0;
    double r_squared = 0.0;
};

struct TrialSummary {
    std::size_t id = 0;
    std::string forcing = "zero";
    Vector phi0;
    TrajectoryStatus status = TrajectoryStatus::completed;
    double status_s = 0.0;
    double sup_norm = 0.0;  // sup_s max_A |Phi_A|
    /// Present when the system carries a Hamiltonian structure.
    std::optional<double> h_norm0;
    std::optional<double> h_norm_sup;
    std::optional<double> h_norm_final;
    /// sup |y|_H <= |y0|_H + C eps / delta + slack; empty without a certificate.
    std::optional<bool> within_certificate;
};

struct Certificate {
    bool certified = false;
    std::string reason;
    double epsilon = 0.0, decay = 0.0, amplitude = 0.0;
    /// C eps / delta: bound on the growth of |y|_H.
    double increment = 0.0;
    double lambda_min = 0.0, lambda_max = 0.0;
    /// |y|_inf <= h_to_max * |y|_H
    double h_to_max = 0.0;
    /// |y|_H <= max_to_h * |y|_inf
    double max_to_h = 0.0;
    /// Analytic C~: sup |y|_inf / eps for data with |y0|_inf <= eps.
    double c_tilde_bound = 0.0;

    /// Bound on sup_s |y(s)|_H given |y(0)|_H.
    double h_norm_bound(double h_norm0) const { return h_norm0 + increment; }
};

struct ClassificationReport {
    Verdict verdict = Verdict::bounded_stable;
    /// C~_empirical, growth rate or s* depending on the verdict.
    double value = 0.0;
    bool pass = true;
    std::string note;
    double c_tilde_empirical = 0.0;
    std::size_t worst_trial = 0;
    std::vector<GrowthFit> fits;  // of the worst trial (classify_growth)
    std::vector<TrialSummary> trials;
    std::optional<Certificate> certificate;
    std::vector<std::string> warnings;
};

/// F == 0 entrywise; null-form coefficients are unrestricted.
bool classical_null_condition(const WaveSystemSpec& spec);

struct GrowthOptions {
    std::size_t trials = 8;
    std::uint64_t seed = 0;
    IntegrateOptions integrate{};
    /// Relative envelope increase over the final half below which the
    /// trajectory counts as bounded.
    double bounded_tolerance = 1e-3;
    unsigned threads = 1;
    /// Multiplies every datum; -1 with a negated system reproduces the verdict.
    double data_sign = 1.0;
};

/// Unforced ensemble with data of max-norm exactly eps (trial 0 is the
/// positive corner). Verdict from the trial with the largest final envelope.
ClassificationReport classify_growth(const AsymptoticSystem& sys, double eps, double s_max,
                                     const GrowthOptions& options = {});

/// Fit all growth models to samples (s_i, E_i) restricted to s >= s_from.
std::vector<GrowthFit> fit_growth_models(const Trajectory& traj, double s_from);

struct Condition1Params {
    double epsilon = 0.01;
    double decay = 0.5;
    double amplitude = 1.0;
    std::size_t trials = 200;
    double s_max = 100.0;
    std::uint64_t seed = 0;
    double fail_threshold = 100.0;
    double segment_length = 1.0;
    IntegrateOptions integrate{};
    unsigned threads = 1;
};

/// Data sampled in the max-norm ball of radius eps; sign corners come first and
/// are always run. Trial t uses seed ^ t. Each datum runs under random_piecewise
/// and adversarial_aligned forcing.
ClassificationReport check_condition_1(const AsymptoticSystem& sys, const Condition1Params& params);

/// Initial datum used by trial t of check_condition_1.
Vector condition1_datum(std::size_t n_fields, double epsilon, std::uint64_t seed, std::size_t trial);
std::size_t condition1_corner_count(std::size_t n_fields);

/// Analytic bound sup |y|_H <= |y(0)|_H + C eps / delta for Euler flows.
/// Uncertified (with a reason) when the structure constants are not
/// antisymmetric.
Certificate certify_hamiltonian(const LieAlgebra& alg, const QuadraticHamiltonian& ham, double epsilon,
                                double decay, double amplitude);
/// Raw-form variant: an indefinite or asymmetric form yields no certificate.
Certificate certify_hamiltonian(const LieAlgebra& alg, const Matrix& form, double epsilon, double decay,
                                double amplitude);

}  // namespace wnlab
