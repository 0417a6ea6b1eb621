#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wnlab/algebra.hpp"
#include "wnlab/ode.hpp"
#include "wnlab/system.hpp"

// Spherically symmetric waves in double-null coordinates u = t - r, v = t + r.
//
// Conventions: box = d_t^2 - Laplacian, psi_A = r phi_A, r = (v - u) / 2, so
//
//   d_u d_v psi_A = (r / 4) RHS_A
//   d_t phi   = (psi_u + psi_v) / r
//   d_u phi   = psi_u / r + psi / (2 r^2),   d_v phi = psi_v / r - psi / (2 r^2)
//   m^-1(d f, d g) = -2 (f_u g_v + f_v g_u)
//
// The radiation field is Phi_A = r (d_t - d_r) phi_A = 2 psi_u + psi / r, and
// s = log r along an outgoing ray u = const.

namespace wnlab {

/// Smooth compact bump a * exp(1 - 1 / (1 - x^2)), x = (u - center) / width;
/// peak value a at the center.
struct BumpProfile {
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;

    double operator()(double u) const noexcept;
};

/// Two-cone characteristic data on [u0, u1] x [v0, v1]: psi_A(u, v0) on the
/// ingoing cone and psi_A(u0, v) on the outgoing cone.
struct CharacteristicData {
    using Profile = std::function<double(double)>;

    std::size_t n_fields = 0;
    double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;
    std::vector<Profile> ingoing;   // psi_A(u, v0)
    std::vector<Profile> outgoing;  // psi_A(u0, v)

    /// Throws std::invalid_argument when the ranges are empty, r_min <= 0,
    /// profiles are missing or the two cones disagree at (u0, v0) by more than
    /// 1e-12 (relative to max(1, |psi|)).
    void validate() const;
    double r_min() const noexcept { return 0.5 * (v0 - u1); }
};

/// Bumps on the ingoing cone; each field is constant along the outgoing cone,
/// equal to its bump value at u0, so the corner matches by construction.
CharacteristicData bump_data(double u0, double u1, double v0, double v1, std::vector<BumpProfile> bumps);

/// Extra term added to d_u d_v psi_A; used for manufactured solutions.
using WaveSource = std::function<double(std::size_t field, double u, double v)>;

struct EvolveOptions {
    /// Blow-up when |psi|/r or |psi_u|, |psi_v| exceeds this, or on NaN.
    double blowup_threshold = 1e6;
    /// Rows (u values) to keep. Empty keeps every row. Each kept row also keeps
    /// its neighbours so that radiation_trace can difference in u.
    std::vector<double> keep_u;
    WaveSource source;
};

enum class GridStatus { completed, blowup };
std::string to_string(GridStatus s);

struct GridStats {
    std::size_t cells = 0;
    double max_phi = 0.0;    // sup |psi| / r
    double max_psi_u = 0.0;  // sup |d_u psi| at cell centres
    double max_psi_v = 0.0;
};

/// Result of evolve(). Row i sits at u0 + i h, column j at v0 + j h.
class CharacteristicGrid {
public:
    CharacteristicGrid(std::size_t n_fields, double u0, double v0, double h, std::size_t rows,
                       std::size_t cols, std::vector<std::size_t> stored_rows);

    std::size_t n_fields() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double u(std::size_t i) const noexcept { return u0_ + static_cast<double>(i) * h_; }
    double v(std::size_t j) const noexcept { return v0_ + static_cast<double>(j) * h_; }
    double r(std::size_t i, std::size_t j) const noexcept { return 0.5 * (v(j) - u(i)); }
    double u_min() const noexcept { return u(0); }
    double u_max() const noexcept { return u(rows_ - 1); }
    double v_min() const noexcept { return v(0); }
    double v_max() const noexcept { return v(cols_ - 1); }

    /// Row index of a u value lying on a grid line (to 1e-9 h).
    std::optional<std::size_t> row_of(double u) const noexcept;

    bool has_row(std::size_t i) const noexcept;
    const std::vector<std::size_t>& stored_rows() const noexcept { return stored_; }
    /// Number of valid columns in row i (cols() unless blow-up cut the row short).
    std::size_t extent(std::size_t i) const noexcept;

    /// Requires has_row(i) and j < extent(i).
    double psi(std::size_t field, std::size_t i, std::size_t j) const;
    std::span<const double> row(std::size_t field, std::size_t i) const;

    GridStatus status() const noexcept { return status_; }
    /// North corner of the first failing diamond in sweep order (v outer, u
    /// inner), so blowup_v() is the earliest v reached by the singularity.
    /// NaN when completed.
    double blowup_u() const noexcept { return blowup_u_; }
    double blowup_v() const noexcept { return blowup_v_; }
    const GridStats& stats() const noexcept { return stats_; }

    // Used by evolve().
    std::span<double> mutable_row(std::size_t field, std::size_t i);
    void set_extent(std::size_t i, std::size_t extent);
    void mark_blowup(double u, double v) noexcept;
    GridStats& mutable_stats() noexcept { return stats_; }

private:
    std::size_t slot_of(std::size_t i) const;

    std::size_t n_;
    double u0_, v0_, h_;
    std::size_t rows_, cols_;
    std::vector<std::size_t> stored_;
    std::vector<std::size_t> slot_;  // per row: index into stored_ or npos
    std::vector<std::size_t> extent_;
    std::vector<double> data_;  // [slot][field][col]
    GridStatus status_ = GridStatus::completed;
    double blowup_u_, blowup_v_;
    GridStats stats_{};
};

/// Diamond integration with one predictor-corrector pass. Throws
/// std::invalid_argument for h <= 0, h not dividing the ranges, dimension
/// mismatch or invalid data.
CharacteristicGrid evolve(const WaveSystemSpec& spec, const CharacteristicData& data, double h,
                          const EvolveOptions& options = {});

struct RadiationTrace {
    double u_fixed = 0.0;
    std::size_t n_fields = 0;
    std::vector<double> s;
    std::vector<double> phi;  // [sample][field]

    std::size_t size() const noexcept { return s.size(); }
    std::span<const double> at(std::size_t i) const noexcept { return {phi.data() + i * n_fields, n_fields}; }
};

/// Phi = 2 psi_u + psi / r along row u_fixed (centred u-differences, one-sided
/// second order on the first and last rows), s = log r. Throws
/// std::invalid_argument when u_fixed is off-grid or its neighbours were not kept.
RadiationTrace radiation_trace(const CharacteristicGrid& grid, double u_fixed);

struct CompareOptions {
    /// Added to sup |Phi_trace| in the denominator of the relative deviation.
    double epsilon = 0.0;
    /// End of the comparison window; NaN means the end of the trace.
    double s_end = std::numeric_limits<double>::quiet_NaN();
    /// Required length of the window in s.
    double min_window = 2.302585092994046;  // ln 10
    IntegrateOptions integrate{};
};

struct TraceComparison {
    double s_start = 0.0, s_end = 0.0;
    /// sup_s |Phi_trace - Phi_ode|_inf / (epsilon + sup |Phi_trace|_inf)
    double sup_deviation = 0.0;
    double s_at_sup = 0.0;
    double scale = 0.0;
    std::vector<double> s;
    std::vector<double> deviation;  // per sample, relative
    std::vector<double> residual;   // |dPhi/ds - A(Phi, Phi)|_inf per sample
    std::vector<double> ode_phi;    // [sample][field]
};

/// Integrates the asymptotic system from the trace value at s_start (snapped
/// to the first sample at or after it) and compares over the window.
/// Throws std::invalid_argument when the window is shorter than min_window.
TraceComparison compare_to_asymptotic(const RadiationTrace& trace, const AsymptoticSystem& sys, double s_start,
                                      const CompareOptions& options = {});

struct HamiltonianDrift {
    std::vector<double> s;
    std::vector<double> h;  // H(Phi(s))
    double tail_window = 0.0;
    double tail_mean = 0.0;
    double tail_oscillation = 0.0;  // max - min over the tail window
    double relative_oscillation = 0.0;  // tail_oscillation / |tail_mean|, 0 when both vanish
    /// Least-squares slope of log |dH/ds| against s (negative when decaying);
    /// NaN when |dH/ds| vanishes identically.
    double decay_rate = 0.0;
};

/// Throws DimensionError when the trace and form dimensions differ.
HamiltonianDrift hamiltonian_drift(const RadiationTrace& trace, const QuadraticHamiltonian& ham,
                                   double tail_window = 2.302585092994046);

}  // namespace wnlab
