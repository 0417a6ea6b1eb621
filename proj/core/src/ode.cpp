#include "wnlab/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wnlab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants (Hairer-Norsett-Wanner, DOPRI5).
constexpr double kBeta = 0.04;
constexpr double kAlpha = 0.2 - 0.75 * kBeta;
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;

class Stepper {
public:
    Stepper(const AsymptoticSystem& sys, const Forcing& forcing, std::size_t n)
        : sys_(sys), forcing_(forcing), n_(n), k_(7, Vector(n)), tmp_(n), fbuf_(n) {}

    void rhs(double s, std::span<const double> y, std::span<double> out, double seg) {
        sys_.rhs(y, out);
        if (forcing_.kind() != ForcingKind::zero) {
            forcing_.evaluate(s, y, fbuf_, seg);
            for (std::size_t i = 0; i < n_; ++i) out[i] += fbuf_[i];
        }
        ++evaluations;
    }

    /// One trial step from (s, y) with k_[0] = f(s, y) already set. Writes the
    /// 5th-order solution to y_new and returns the scaled error norm.
    double attempt(double s, double h, std::span<const double> y, std::span<double> y_new, double tol,
                   double floor) {
        const double seg = s + 0.5 * h;
        auto& k = k_;
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * a21 * k[0][i];
        rhs(s + c2 * h, tmp_, k[1], seg);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        rhs(s + c3 * h, tmp_, k[2], seg);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        rhs(s + c4 * h, tmp_, k[3], seg);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
        rhs(s + c5 * h, tmp_, k[4], seg);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] + a65 * k[4][i]);
        rhs(s + h, tmp_, k[5], seg);
        for (std::size_t i = 0; i < n_; ++i)
            y_new[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] + a76 * k[5][i]);
        rhs(s + h, y_new, k[6], seg);

        // Normwise relative: |err|_inf <= tol * max(|y|_inf, |y_new|_inf, floor).
        double err = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                                  e7 * k[6][i]);
            err = std::max(err, std::abs(e));
        }
        err /= tol * std::max({max_norm(y), max_norm(y_new), floor});
        if (!all_finite(y_new)) return std::numeric_limits<double>::infinity();
        return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
    }

    Vector& first() { return k_[0]; }
    void accept_fsal() { std::swap(k_[0], k_[6]); }

    std::size_t evaluations = 0;

private:
    const AsymptoticSystem& sys_;
    const Forcing& forcing_;
    std::size_t n_;
    std::vector<Vector> k_;
    Vector tmp_;
    Vector fbuf_;
};

double initial_step(const AsymptoticSystem& sys, std::span<const double> y, std::span<const double> f,
                    double tol, double h_max) {
    const double d0 = max_norm(y) + tol;
    const double d1 = max_norm(f);
    double h = d1 > 0.0 ? 0.01 * d0 / d1 : h_max;
    // Quadratic systems evolve on the scale 1 / (K |y|).
    const double k = sys.quadratic_bound() * max_norm(y);
    if (k > 0.0) h = std::min(h, 0.01 / k);
    return std::clamp(h, 1e-10, h_max);
}

}  // namespace

std::string to_string(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::completed: return "completed";
        case TrajectoryStatus::blowup: return "blowup";
        case TrajectoryStatus::step_underflow: return "step_underflow";
        case TrajectoryStatus::overflow: return "overflow";
    }
    return "unknown";
}

void Trajectory::push(double s, std::span<const double> phi) {
    s_.push_back(s);
    phi_.insert(phi_.end(), phi.begin(), phi.end());
}

std::optional<std::size_t> Trajectory::find(double s) const {
    auto it = std::lower_bound(s_.begin(), s_.end(), s);
    if (it == s_.end() || *it != s) return std::nullopt;
    return static_cast<std::size_t>(it - s_.begin());
}

std::optional<double> fit_pole(const Trajectory& traj) {
    const std::size_t m = traj.size();
    if (m < 3) return std::nullopt;
    const double last = max_norm(traj.back());
    if (!(last > 0.0)) return std::nullopt;
    std::size_t first = m - 1;
    while (first > 0 && max_norm(traj.phi(first - 1)) >= 0.1 * last) --first;
    if (m - first < 3) first = m - 3;

    const double s_ref = traj.s(m - 1);
    double ss = 0, sg = 0, sss = 0, ssg = 0;
    const double cnt = static_cast<double>(m - first);
    for (std::size_t i = first; i < m; ++i) {
        const double x = traj.s(i) - s_ref;
        const double g = 1.0 / max_norm(traj.phi(i));
        ss += x;
        sg += g;
        sss += x * x;
        ssg += x * g;
    }
    const double denom = cnt * sss - ss * ss;
    if (!(denom > 0.0)) return std::nullopt;
    const double slope = (cnt * ssg - ss * sg) / denom;
    const double intercept = (sg - slope * ss) / cnt;
    if (!(slope < 0.0)) return std::nullopt;
    return s_ref - intercept / slope;
}

std::optional<double> blowup_time_estimate(const Trajectory& traj) {
    if (traj.status() != TrajectoryStatus::blowup) return std::nullopt;
    return traj.status_s();
}

Trajectory integrate(const AsymptoticSystem& sys, std::span<const double> phi0, double s_max,
                     const Forcing& forcing, const IntegrateOptions& opt) {
    const std::size_t n = sys.n_fields();
    if (phi0.size() != n) throw DimensionError("integrate: initial data length differs from system size");
    if (forcing.kind() != ForcingKind::zero && forcing.n_fields() != n)
        throw DimensionError("integrate: forcing size differs from system size");
    if (!all_finite(phi0)) throw std::invalid_argument("integrate: initial data must be finite");
    if (!(s_max > 0.0) || !std::isfinite(s_max)) throw std::invalid_argument("integrate: s_max must be positive");
    if (!(opt.tol > 1e-14 && opt.tol < 1e-3)) throw std::invalid_argument("integrate: tol must lie in (1e-14, 1e-3)");

    const double h_max = opt.h_max > 0.0 ? opt.h_max : s_max / 512.0;

    std::vector<double> stops;
    for (double c : opt.checkpoints)
        if (c > 0.0 && c < s_max) stops.push_back(c);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    stops.push_back(s_max);
    std::size_t next_stop = 0;

    Trajectory traj(n);
    Stepper stepper(sys, forcing, n);
    Vector y(phi0.begin(), phi0.end());
    Vector y_new(n);
    double s = 0.0;
    traj.push(s, y);
    auto& stats = traj.mutable_stats();
    stats.max_norm = max_norm(y);
    const double norm0 = max_norm(y);
    const double floor = std::max({norm0, forcing.envelope(0.0), 1e-12});

    stepper.rhs(s, y, stepper.first(), s);
    double h = initial_step(sys, y, stepper.first(), opt.tol, h_max);
    double err_old = 1e-4;
    bool last_rejected = false;

    // Blow-up is declared only for a pole-like approach: the local e-folding
    // length 1 / (d log|Phi| / ds) times K |Phi| stays O(1) near a quadratic pole.
    auto pole_estimate = [&](double norm) -> std::optional<double> {
        const std::size_t m = traj.size();
        if (m < 2) return std::nullopt;
        const double prev = max_norm(traj.phi(m - 2));
        const double ds = traj.s(m - 1) - traj.s(m - 2);
        if (!(prev > 0.0) || !(ds > 0.0) || !(norm > prev)) return std::nullopt;
        const double efold = ds / std::log(norm / prev);
        const double k = std::max(sys.quadratic_bound(), std::numeric_limits<double>::min());
        if (efold * norm * k > opt.pole_factor) return std::nullopt;
        const auto fit = fit_pole(traj);
        return (fit && *fit >= s) ? *fit : s + efold;
    };

    while (true) {
        if (stats.accepted + stats.rejected >= opt.max_steps) {
            traj.finish(TrajectoryStatus::step_underflow, s);
            break;
        }
        double target = stops[next_stop];
        const double bp = forcing.next_breakpoint(s);
        bool at_breakpoint = false;
        if (bp <= target) {
            target = bp;
            at_breakpoint = true;
        }
        double step = std::min(h, h_max);
        bool landing = false;
        if (s + 1.01 * step >= target) {
            step = target - s;
            landing = true;
        }

        if (step < opt.h_min && !landing) {
            const double norm = max_norm(y);
            if (norm > 10.0 * std::max(norm0, 1e-300)) {
                if (auto est = pole_estimate(norm)) {
                    traj.finish(TrajectoryStatus::blowup, *est);
                    break;
                }
            }
            traj.finish(TrajectoryStatus::step_underflow, s);
            break;
        }

        const double err = stepper.attempt(s, step, y, y_new, opt.tol, floor);
        if (err <= 1.0) {
            ++stats.accepted;
            s = landing ? target : s + step;
            std::swap(y, y_new);
            traj.push(s, y);
            const double norm = max_norm(y);
            stats.max_norm = std::max(stats.max_norm, norm);

            double fac = std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_old, kBeta);
            fac = std::clamp(kSafety * fac, kFacMin, last_rejected ? 1.0 : kFacMax);
            err_old = std::max(err, 1e-4);
            last_rejected = false;
            // Keep the controller's proposal when the step was shortened to land.
            if (!(landing && step < h)) h = step * fac;

            if (norm > opt.blowup_threshold) {
                if (auto est = pole_estimate(norm)) {
                    traj.finish(TrajectoryStatus::blowup, *est);
                    break;
                }
                if (norm > opt.overflow_ceiling) {
                    traj.finish(TrajectoryStatus::overflow, s);
                    break;
                }
            }
            if (landing && target == stops[next_stop]) {
                ++next_stop;
                if (next_stop == stops.size()) {
                    traj.finish(TrajectoryStatus::completed, s_max);
                    break;
                }
            }
            if (landing && at_breakpoint) {
                stepper.rhs(s, y, stepper.first(), s);
            } else {
                stepper.accept_fsal();
            }
        } else {
            ++stats.rejected;
            last_rejected = true;
            const double fac = std::isfinite(err) ? std::max(kFacMin, kSafety * std::pow(err, -0.2)) : kFacMin;
            h = step * fac;
        }
    }
    stats.rhs_evaluations = stepper.evaluations;
    return traj;
}

}  // namespace wnlab
