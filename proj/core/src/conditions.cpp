#include "wnlab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "random.hpp"

namespace wnlab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::classical_null: return "classical_null";
        case Verdict::bounded_stable: return "bounded_stable";
        case Verdict::linear_growth: return "linear_growth";
        case Verdict::exponential_growth: return "exponential_growth";
        case Verdict::super_exponential: return "super_exponential";
        case Verdict::blowup: return "blowup";
        case Verdict::unbounded: return "unbounded";
    }
    return "unknown";
}

bool classical_null_condition(const WaveSystemSpec& spec) { return spec.bad_coeffs().max_abs() == 0.0; }

namespace {

constexpr std::size_t kFitPoints = 256;

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sse += r * r;
    }
    f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    return f;
}

/// Running sup of |Phi|_inf, linearly interpolated onto a uniform grid over [s_from, s_end].
void envelope_on_grid(const Trajectory& traj, double s_from, std::vector<double>& s_out, std::vector<double>& e_out) {
    const std::size_t m = traj.size();
    std::vector<double> env(m);
    double run = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        run = std::max(run, max_norm(traj.phi(i)));
        env[i] = run;
    }
    const double s_end = traj.s(m - 1);
    s_from = std::clamp(s_from, traj.s(0), s_end);
    s_out.resize(kFitPoints);
    e_out.resize(kFitPoints);
    std::size_t j = 0;
    for (std::size_t k = 0; k < kFitPoints; ++k) {
        const double s = s_from + (s_end - s_from) * static_cast<double>(k) / (kFitPoints - 1);
        while (j + 1 < m && traj.s(j + 1) < s) ++j;
        double e = env[j];
        if (j + 1 < m) {
            const double w = (s - traj.s(j)) / (traj.s(j + 1) - traj.s(j));
            e = env[j] + std::clamp(w, 0.0, 1.0) * (env[j + 1] - env[j]);
        }
        s_out[k] = s;
        e_out[k] = e;
    }
}

}  // namespace

std::vector<GrowthFit> fit_growth_models(const Trajectory& traj, double s_from) {
    std::vector<GrowthFit> fits;
    if (traj.size() < 2) return fits;
    std::vector<double> s, e;
    envelope_on_grid(traj, s_from, s, e);

    const bool positive = std::all_of(e.begin(), e.end(), [](double v) { return v > 0.0; });
    std::vector<double> loge(e.size());
    if (positive)
        for (std::size_t i = 0; i < e.size(); ++i) loge[i] = std::log(e[i]);

    auto log_sse = [&](auto&& predict_log) {
        double sse = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double r = loge[i] - predict_log(s[i]);
            sse += r * r;
        }
        return sse;
    };

    {
        GrowthFit f{"constant"};
        f.admissible = positive;
        if (positive) {
            double mean = 0.0;
            for (double v : loge) mean += v;
            mean /= static_cast<double>(loge.size());
            f.intercept = std::exp(mean);
            f.sse = log_sse([&](double) { return mean; });
            f.r_squared = f.sse == 0.0 ? 1.0 : 0.0;
        }
        fits.push_back(f);
    }
    {
        GrowthFit f{"linear"};
        const LineFit lf = fit_line(s, e);
        f.intercept = lf.intercept;
        f.rate = lf.slope;
        f.r_squared = lf.r_squared;
        f.admissible = positive && std::all_of(s.begin(), s.end(), [&](double x) {
                           return lf.intercept + lf.slope * x > 0.0;
                       });
        if (f.admissible) f.sse = log_sse([&](double x) { return std::log(lf.intercept + lf.slope * x); });
        fits.push_back(f);
    }
    {
        GrowthFit f{"exponential"};
        f.admissible = positive;
        if (positive) {
            const LineFit lf = fit_line(s, loge);
            f.intercept = lf.intercept;
            f.rate = lf.slope;
            f.r_squared = lf.r_squared;
            f.sse = log_sse([&](double x) { return lf.intercept + lf.slope * x; });
        }
        fits.push_back(f);
    }
    {
        GrowthFit f{"super_exponential"};
        f.admissible = positive && std::all_of(loge.begin(), loge.end(), [](double v) { return v > 0.0; });
        if (f.admissible) {
            std::vector<double> loglog(loge.size());
            for (std::size_t i = 0; i < loge.size(); ++i) loglog[i] = std::log(loge[i]);
            const LineFit lf = fit_line(s, loglog);
            f.intercept = lf.intercept;
            f.rate = lf.slope;
            f.r_squared = lf.r_squared;
            f.sse = log_sse([&](double x) { return std::exp(lf.intercept + lf.slope * x); });
        }
        fits.push_back(f);
    }
    return fits;
}

namespace {

double h_norm(const QuadraticHamiltonian& ham, std::span<const double> y) { return ham.norm(y); }

void fill_h_norms(TrialSummary& t, const Trajectory& traj, const AsymptoticSystem& sys) {
    if (!sys.structure()) return;
    const auto& ham = sys.structure()->hamiltonian;
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) sup = std::max(sup, h_norm(ham, traj.phi(i)));
    t.h_norm0 = h_norm(ham, traj.phi(0));
    t.h_norm_sup = sup;
    t.h_norm_final = h_norm(ham, traj.back());
}

TrialSummary summarize(std::size_t id, std::string forcing, std::span<const double> phi0, const Trajectory& traj,
                       const AsymptoticSystem& sys) {
    TrialSummary t;
    t.id = id;
    t.forcing = std::move(forcing);
    t.phi0.assign(phi0.begin(), phi0.end());
    t.status = traj.status();
    t.status_s = traj.status_s();
    t.sup_norm = traj.stats().max_norm;
    fill_h_norms(t, traj, sys);
    return t;
}

Vector growth_datum(std::size_t n, double eps, std::uint64_t seed, std::size_t trial) {
    Vector x(n, eps);
    if (trial == 0) return x;
    detail::SplitMix rng(detail::splitmix64(seed ^ static_cast<std::uint64_t>(trial)));
    double m = 0.0;
    while (m == 0.0) {
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        m = max_norm(x);
    }
    for (double& v : x) v = eps * (v / m);
    return x;
}

}  // namespace

ClassificationReport classify_growth(const AsymptoticSystem& sys, double eps, double s_max,
                                     const GrowthOptions& options) {
    if (!(eps > 0.0)) throw std::invalid_argument("classify_growth: eps must be positive");
    if (!(s_max > 0.0)) throw std::invalid_argument("classify_growth: s_max must be positive");
    const std::size_t trials = std::max<std::size_t>(1, options.trials);
    const std::size_t n = sys.n_fields();

    std::vector<Trajectory> trajs(trials);
    std::vector<Vector> data(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        data[t] = growth_datum(n, eps, options.seed, t);
        for (double& x : data[t]) x *= options.data_sign;
    }
    detail::parallel_for(trials, options.threads, [&](std::size_t t) {
        trajs[t] = integrate(sys, data[t], s_max, Forcing{}, options.integrate);
    });

    ClassificationReport rep;
    if (eps > 0.5) rep.warnings.push_back("eps above 0.5 is outside the small-data regime");
    double best_final = -1.0;
    double earliest_blowup = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        const auto& tr = trajs[t];
        rep.trials.push_back(summarize(t, "zero", data[t], tr, sys));
        rep.c_tilde_empirical = std::max(rep.c_tilde_empirical, tr.stats().max_norm / eps);
        if (tr.status() == TrajectoryStatus::blowup) {
            if (tr.status_s() < earliest_blowup) {
                earliest_blowup = tr.status_s();
                rep.worst_trial = t;
            }
        }
    }
    if (std::isfinite(earliest_blowup)) {
        rep.verdict = Verdict::blowup;
        rep.value = earliest_blowup;
        rep.pass = false;
        rep.note = "at least one trajectory blows up";
        return rep;
    }

    for (std::size_t t = 0; t < trials; ++t) {
        const auto& tr = trajs[t];
        double run = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i) run = std::max(run, max_norm(tr.phi(i)));
        if (run > best_final) {
            best_final = run;
            rep.worst_trial = t;
        }
    }
    const Trajectory& worst = trajs[rep.worst_trial];
    if (worst.status() == TrajectoryStatus::step_underflow)
        rep.warnings.push_back("worst trajectory stopped by step underflow before s_max");
    if (worst.status() == TrajectoryStatus::overflow) {
        std::ostringstream os;
        os << "worst trajectory overflowed at s = " << worst.status_s() << "; growth fitted up to there";
        rep.warnings.push_back(os.str());
    }
    const double s_end = worst.s(worst.size() - 1);
    rep.fits = fit_growth_models(worst, 0.5 * s_end);

    // Relative envelope increase over the final half.
    double e_half = 0.0, e_end = 0.0;
    for (std::size_t i = 0; i < worst.size(); ++i) {
        const double v = max_norm(worst.phi(i));
        if (worst.s(i) <= 0.5 * s_end) e_half = std::max(e_half, v);
        e_end = std::max(e_end, v);
    }
    const bool bounded = e_end <= e_half * (1.0 + options.bounded_tolerance);
    if (bounded) {
        rep.verdict = Verdict::bounded_stable;
        rep.value = rep.c_tilde_empirical;
        rep.note = "envelope saturated over the final half";
        return rep;
    }

    const GrowthFit* best = nullptr;
    for (const auto& f : rep.fits) {
        if (!f.admissible || f.model == "constant") continue;
        if (!best || f.sse < best->sse) best = &f;
    }
    if (!best) {
        rep.verdict = Verdict::bounded_stable;
        rep.value = rep.c_tilde_empirical;
        rep.warnings.push_back("no growth model admissible; reporting bounded");
        return rep;
    }
    rep.value = best->rate;
    if (best->model == "linear") {
        rep.verdict = Verdict::linear_growth;
        rep.note = "polynomial (linear) growth of the envelope";
    } else if (best->model == "exponential") {
        rep.verdict = Verdict::exponential_growth;
        std::ostringstream os;
        os << "exponential rate " << best->rate << " to be compared with eps = " << eps;
        rep.note = os.str();
    } else {
        rep.verdict = Verdict::super_exponential;
        rep.pass = false;
        rep.note = "log log of the envelope grows linearly: weak null condition fails";
    }
    return rep;
}

std::size_t condition1_corner_count(std::size_t n_fields) {
    return n_fields <= 10 ? (std::size_t{1} << n_fields) : 2;
}

Vector condition1_datum(std::size_t n, double eps, std::uint64_t seed, std::size_t trial) {
    Vector x(n);
    const std::size_t corners = condition1_corner_count(n);
    if (trial < corners) {
        // Corner 0 is the positive corner.
        if (n <= 10) {
            for (std::size_t a = 0; a < n; ++a) x[a] = ((trial >> a) & 1u) ? -eps : eps;
        } else {
            for (double& v : x) v = trial == 0 ? eps : -eps;
        }
        return x;
    }
    detail::SplitMix rng(detail::splitmix64(seed ^ static_cast<std::uint64_t>(trial)));
    for (double& v : x) v = rng.uniform(-eps, eps);
    if (trial % 4 == 0) {
        // Push every fourth random datum onto the boundary of the ball.
        const double m = max_norm(x);
        if (m > 0.0)
            for (double& v : x) v = eps * (v / m);
    }
    return x;
}

Certificate certify_hamiltonian(const LieAlgebra& alg, const QuadraticHamiltonian& ham, double epsilon, double decay,
                                double amplitude) {
    if (!(epsilon > 0.0) || !(decay > 0.0) || !(amplitude > 0.0))
        throw std::invalid_argument("certify_hamiltonian: eps, delta and C must be positive");
    if (alg.dim() != ham.dim()) throw DimensionError("certify_hamiltonian: dimension mismatch");
    Certificate c;
    c.epsilon = epsilon;
    c.decay = decay;
    c.amplitude = amplitude;
    const auto rep = validate_algebra(alg);
    if (rep.worst_antisymmetry > kAlgebraTolerance) {
        c.reason = "structure constants are not antisymmetric; H is not conserved";
        return c;
    }
    c.certified = true;
    c.reason = "certified bounded-stable: H conserved by the Euler flow, d|y|_H/ds <= |f|_H";
    c.increment = amplitude * epsilon / decay;
    c.lambda_min = ham.min_eigenvalue();
    c.lambda_max = ham.max_eigenvalue();
    c.h_to_max = 1.0 / std::sqrt(c.lambda_min);
    c.max_to_h = std::sqrt(static_cast<double>(ham.dim()) * c.lambda_max);
    c.c_tilde_bound = (c.max_to_h + amplitude / decay) * c.h_to_max;
    return c;
}

Certificate certify_hamiltonian(const LieAlgebra& alg, const Matrix& form, double epsilon, double decay,
                                double amplitude) {
    const auto rep = inspect_form(form);
    if (!rep.positive_definite) {
        if (!(epsilon > 0.0) || !(decay > 0.0) || !(amplitude > 0.0))
            throw std::invalid_argument("certify_hamiltonian: eps, delta and C must be positive");
        Certificate c;
        c.epsilon = epsilon;
        c.decay = decay;
        c.amplitude = amplitude;
        c.lambda_min = rep.min_eigenvalue;
        c.lambda_max = rep.max_eigenvalue;
        c.reason = "Hamiltonian form is not symmetric positive definite";
        return c;
    }
    return certify_hamiltonian(alg, QuadraticHamiltonian(form), epsilon, decay, amplitude);
}

ClassificationReport check_condition_1(const AsymptoticSystem& sys, const Condition1Params& p) {
    if (!(p.epsilon > 0.0) || !(p.decay > 0.0) || !(p.amplitude > 0.0) || !(p.s_max > 0.0) || p.trials == 0 ||
        !(p.fail_threshold > 0.0))
        throw std::invalid_argument("check_condition_1: parameters must be positive");
    const std::size_t n = sys.n_fields();
    ClassificationReport rep;
    if (std::exp(-p.decay * p.s_max) > 1e-8)
        rep.warnings.push_back("s_max is short: exp(-delta s_max) > 1e-8, forcing has not decayed");

    std::optional<Matrix> form;
    if (sys.structure()) {
        form = sys.structure()->hamiltonian.form();
        rep.certificate = certify_hamiltonian(sys.structure()->algebra, sys.structure()->hamiltonian, p.epsilon,
                                              p.decay, p.amplitude);
    }

    const std::size_t n_data = std::max(p.trials, condition1_corner_count(n));
    std::vector<Vector> data(n_data);
    for (std::size_t t = 0; t < n_data; ++t) data[t] = condition1_datum(n, p.epsilon, p.seed, t);

    const std::size_t jobs = 2 * n_data;
    std::vector<TrialSummary> out(jobs);
    detail::parallel_for(jobs, p.threads, [&](std::size_t j) {
        const std::size_t t = j / 2;
        const bool adversarial = (j % 2) == 1;
        const ForcingKind kind = adversarial ? ForcingKind::adversarial_aligned : ForcingKind::random_piecewise;
        const std::uint64_t fseed = detail::splitmix64(p.seed ^ static_cast<std::uint64_t>(t));
        const Forcing f =
            make_forcing(kind, n, p.amplitude, p.epsilon, p.decay, fseed, form, p.segment_length);
        const Trajectory tr = integrate(sys, data[t], p.s_max, f, p.integrate);
        out[j] = summarize(j, to_string(kind), data[t], tr, sys);
        if (rep.certificate && rep.certificate->certified && out[j].h_norm_sup)
            out[j].within_certificate = *out[j].h_norm_sup <= rep.certificate->h_norm_bound(*out[j].h_norm0) +
                                                                  10.0 * p.integrate.tol;
    });
    rep.trials = std::move(out);

    double earliest_blowup = std::numeric_limits<double>::infinity();
    std::size_t blowup_trial = 0;
    bool exceeded = false;
    double worst = -1.0;
    for (const auto& t : rep.trials) {
        rep.c_tilde_empirical = std::max(rep.c_tilde_empirical, t.sup_norm / p.epsilon);
        if (t.sup_norm > worst) {
            worst = t.sup_norm;
            rep.worst_trial = t.id;
        }
        if (t.status == TrajectoryStatus::blowup && t.status_s < earliest_blowup) {
            earliest_blowup = t.status_s;
            blowup_trial = t.id;
        }
        if (t.sup_norm > p.fail_threshold * p.epsilon) exceeded = true;
    }
    if (std::isfinite(earliest_blowup)) {
        rep.verdict = Verdict::blowup;
        rep.value = earliest_blowup;
        rep.worst_trial = blowup_trial;
        rep.pass = false;
        rep.note = "counterexample: trajectory blows up";
    } else if (exceeded) {
        rep.verdict = Verdict::unbounded;
        rep.value = rep.c_tilde_empirical;
        rep.pass = false;
        rep.note = "counterexample: trajectory exceeds fail_threshold * eps";
    } else {
        rep.verdict = Verdict::bounded_stable;
        rep.value = rep.c_tilde_empirical;
        rep.pass = true;
        rep.note = "no counterexample found";
    }
    return rep;
}

}  // namespace wnlab
