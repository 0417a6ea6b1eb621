#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wnlab/forcing.hpp"
#include "wnlab/system.hpp"

namespace wnlab {

/// overflow: |Phi| passed overflow_ceiling without a pole signature (finite
/// but unrepresentable growth, e.g. exp(exp(s))).
enum class TrajectoryStatus { completed, blowup, step_underflow, overflow };
std::string to_string(TrajectoryStatus s);

struct IntegrateOptions {
    /// Normwise relative local error target:
    /// |err|_inf <= tol * max(|Phi|_inf, |Phi0|_inf, |f(0)|).
    double tol = 1e-10;
    double h_min = 1e-12;
    /// Largest step; 0 means s_max / 512, which guarantees >= 512 samples.
    double h_max = 0.0;
    /// Crossing this max-norm triggers the pole test.
    double blowup_threshold = 1e6;
    /// Growth is a pole when L |Phi| K <= pole_factor, with L the local
    /// e-folding length of |Phi| and K the system's quadratic bound. Quadratic
    /// poles sit at O(1); growth that is merely fast (e.g. exp(exp(s))) sits
    /// many orders higher.
    double pole_factor = 100.0;
    /// Hard stop; ends in overflow unless the pole test fires.
    double overflow_ceiling = 1e200;
    std::size_t max_steps = 20'000'000;
    /// Parameter values the solver must land on exactly (each appears in the samples).
    std::vector<double> checkpoints;
};

struct TrajectoryStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    double max_norm = 0.0;  // sup over accepted steps of |Phi|_inf

    bool operator==(const TrajectoryStats&) const = default;
};

/// Sampled solution of an asymptotic system. Samples are the accepted steps of
/// the solver, starting with s = 0.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::size_t n_fields) : n_(n_fields) {}

    std::size_t n_fields() const noexcept { return n_; }
    std::size_t size() const noexcept { return s_.size(); }
    bool empty() const noexcept { return s_.empty(); }

    double s(std::size_t i) const noexcept { return s_[i]; }
    std::span<const double> phi(std::size_t i) const noexcept { return {phi_.data() + i * n_, n_}; }
    std::span<const double> s_values() const noexcept { return s_; }
    std::span<const double> back() const noexcept { return phi(size() - 1); }

    TrajectoryStatus status() const noexcept { return status_; }
    /// s_max for completed, the extrapolated singular time for blowup, the last
    /// reached s for step_underflow and overflow.
    double status_s() const noexcept { return status_s_; }
    const TrajectoryStats& stats() const noexcept { return stats_; }

    /// Index of the sample whose s equals the given value exactly.
    std::optional<std::size_t> find(double s) const;

    void push(double s, std::span<const double> phi);
    void finish(TrajectoryStatus status, double status_s) {
        status_ = status;
        status_s_ = status_s;
    }
    TrajectoryStats& mutable_stats() noexcept { return stats_; }

    bool operator==(const Trajectory&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> s_;
    std::vector<double> phi_;
    TrajectoryStatus status_ = TrajectoryStatus::completed;
    double status_s_ = 0.0;
    TrajectoryStats stats_{};
};

/// Dormand-Prince 5(4) with PI step control for dPhi/ds = A(Phi, Phi) + f(s, Phi).
/// Throws std::invalid_argument for non-finite data, s_max <= 0 or tol outside
/// (1e-14, 1e-3).
Trajectory integrate(const AsymptoticSystem& sys, std::span<const double> phi0, double s_max,
                     const Forcing& forcing = {}, const IntegrateOptions& options = {});

/// Singular time from a linear fit of 1/|Phi|_inf against s over the last
/// decade of growth. Empty unless the trajectory ended in blowup.
std::optional<double> blowup_time_estimate(const Trajectory& traj);

/// Same fit without the status gate.
std::optional<double> fit_pole(const Trajectory& traj);

}  // namespace wnlab
