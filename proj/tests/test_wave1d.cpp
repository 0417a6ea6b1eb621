#include <gtest/gtest.h>

#include <cmath>

#include "wnlab/wave1d.hpp"

using namespace wnlab;

namespace {

// d/dx by Richardson-extrapolated central differences (error ~ h^4 f^(5)).
template <class F>
double deriv(F&& f, double x, double h = 1e-3) {
    const double d1 = (f(x + h) - f(x - h)) / (2 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4 * d2 - d1) / 3;
}

// Manufactured psi(u, v) and its mixed derivative.
double mms_psi(double u, double v) { return std::sin(u) * std::exp(-v / 10); }
double mms_psi_uv(double u, double v) { return -0.1 * std::cos(u) * std::exp(-v / 10); }

// phi(t, r) = psi(t - r, t + r) / r.
double mms_phi(double t, double r) { return mms_psi(t - r, t + r) / r; }

// RHS of box phi_0 = F (d_t phi)^2 + G m^-1(d phi, d phi), with the derivatives
// taken in (t, r) and m^-1 = -dt dt + dr dr.
double rhs_tr(double f, double g, double u, double v) {
    const double t = 0.5 * (u + v), r = 0.5 * (v - u);
    const double pt = deriv([&](double x) { return mms_phi(x, r); }, t);
    const double pr = deriv([&](double x) { return mms_phi(t, x); }, r);
    return f * pt * pt + g * (-pt * pt + pr * pr);
}

WaveSystemSpec scalar(double f, double g) {
    Tensor3 F(1), G(1);
    F(0, 0, 0) = f;
    G(0, 0, 0) = g;
    return WaveSystemSpec(1, F, G, "scalar");
}

// Error at (u, v) = (2.5, 8.5) of the manufactured solution on [0,5] x [6,11].
double mms_error(double f, double g, double h) {
    CharacteristicData d;
    d.n_fields = 1;
    d.u0 = 0;
    d.u1 = 5;
    d.v0 = 6;
    d.v1 = 11;
    d.ingoing = {[](double u) { return mms_psi(u, 6.0); }};
    d.outgoing = {[](double v) { return mms_psi(0.0, v); }};
    EvolveOptions o;
    // (r/4) box phi = psi_uv for the exact solution, so the source is the defect.
    o.source = [f, g](std::size_t, double u, double v) {
        return mms_psi_uv(u, v) - 0.25 * (0.5 * (v - u)) * rhs_tr(f, g, u, v);
    };
    const auto grid = evolve(scalar(f, g), d, h, o);
    EXPECT_EQ(grid.status(), GridStatus::completed);
    const auto i = grid.row_of(2.5);
    const auto j = static_cast<std::size_t>(std::lround(2.5 / h));
    return std::abs(grid.psi(0, *i, j) - mms_psi(2.5, 8.5));
}

CharacteristicData free_data() {
    CharacteristicData d;
    d.n_fields = 2;
    d.u0 = 0;
    d.u1 = 5;
    d.v0 = 6;
    d.v1 = 11;
    d.ingoing = {[](double u) { return std::sin(3 * u); }, [](double u) { return std::cos(u); }};
    d.outgoing = {[](double v) { return std::cos(v - 6) - 1; }, [](double v) { return 1.0 + 0.1 * std::sin(v - 6); }};
    return d;
}

RadiationTrace synthetic_trace(std::size_t n, double s0, double s1, std::function<Vector(double)> f) {
    RadiationTrace t;
    t.n_fields = f(s0).size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n - 1);
        t.s.push_back(s);
        for (double x : f(s)) t.phi.push_back(x);
    }
    return t;
}

}  // namespace

TEST(Evolve, DalembertIsExactForFreeWaves) {
    const auto d = free_data();
    const auto g = evolve(WaveSystemSpec(2, Tensor3(2), Tensor3(2)), d, 0.01);
    ASSERT_EQ(g.status(), GridStatus::completed);
    EXPECT_EQ(g.rows(), 501u);
    EXPECT_EQ(g.cols(), 501u);
    double err = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            for (std::size_t a = 0; a < 2; ++a) {
                const double exact = d.ingoing[a](g.u(i)) + d.outgoing[a](g.v(j)) - d.ingoing[a](0.0);
                err = std::max(err, std::abs(g.psi(a, i, j) - exact));
            }
    EXPECT_LE(err, 1e-12);
}

TEST(Evolve, SecondOrderForBadQuadratic) {
    const double e1 = mms_error(1.0, 0.0, 0.02), e2 = mms_error(1.0, 0.0, 0.01);
    EXPECT_GE(e1 / e2, 3.5);
    EXPECT_LE(e1 / e2, 4.5);
}

TEST(Evolve, SecondOrderForNullForm) {
    // Fails unless the u/v reduction of m^-1 agrees with the (t, r) one.
    const double e1 = mms_error(0.0, -1.0, 0.02), e2 = mms_error(0.0, -1.0, 0.01);
    EXPECT_GE(e1 / e2, 3.5);
    EXPECT_LE(e1 / e2, 4.5);
}

TEST(Evolve, WrongSignSourceDoesNotConverge) {
    // Sanity check on the oracle: the flipped box sign leaves an O(1) defect.
    auto bad = [](double h) {
        CharacteristicData d;
        d.n_fields = 1;
        d.u0 = 0;
        d.u1 = 5;
        d.v0 = 6;
        d.v1 = 11;
        d.ingoing = {[](double u) { return mms_psi(u, 6.0); }};
        d.outgoing = {[](double v) { return mms_psi(0.0, v); }};
        EvolveOptions o;
        o.source = [](std::size_t, double u, double v) {
            return mms_psi_uv(u, v) + 0.25 * (0.5 * (v - u)) * rhs_tr(1.0, 0.0, u, v);
        };
        const auto g = evolve(scalar(1.0, 0.0), d, h, o);
        return std::abs(g.psi(0, *g.row_of(2.5), std::lround(2.5 / h)) - mms_psi(2.5, 8.5));
    };
    EXPECT_LT(bad(0.02) / bad(0.01), 1.5);
}

TEST(Evolve, DomainOfDependence) {
    // Changing outgoing data beyond v = 8 leaves every column before it untouched.
    const auto spec = catalogue("rigid_body", std::vector<double>{1.0, 2.0, 3.0});
    auto d = bump_data(0, 2, 4, 12, {{0.3, 1.0, 0.5}, {0.2, 0.9, 0.5}, {-0.2, 1.1, 0.5}});
    const auto a = evolve(spec, d, 0.02);
    auto base = d.outgoing[1];
    d.outgoing[1] = [base](double v) { return v > 8.0 ? base(v) + 0.1 * (v - 8.0) : base(v); };
    const auto b = evolve(spec, d, 0.02);
    const auto jc = static_cast<std::size_t>(std::lround((8.0 - 4.0) / 0.02));
    bool differs = false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t f = 0; f < 3; ++f) {
                if (j <= jc) ASSERT_EQ(a.psi(f, i, j), b.psi(f, i, j)) << i << ' ' << j;
                else differs |= a.psi(f, i, j) != b.psi(f, i, j);
            }
    EXPECT_TRUE(differs);
}

TEST(Evolve, JohnBlowsUpAndMovesInward) {
    const auto john = catalogue("john");
    double prev_v = INFINITY;
    for (double a : {1.0, 2.0, 4.0}) {
        const auto g = evolve(john, bump_data(0, 2, 4, 54, {{a, 1.0, 0.5}}), 0.01);
        ASSERT_EQ(g.status(), GridStatus::blowup) << a;
        EXPECT_GE(g.blowup_u(), 0.0);
        EXPECT_LE(g.blowup_u(), 2.0);
        EXPECT_LT(g.blowup_v(), prev_v);
        prev_v = g.blowup_v();
        // Stored values stay finite.
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.extent(i); ++j) ASSERT_TRUE(std::isfinite(g.psi(0, i, j)));
    }
}

TEST(Evolve, SmallDataCompletesForNullAndHamiltonianSystems) {
    for (const char* name : {"null_form", "rigid_body"}) {
        std::vector<double> p;
        if (std::string(name) == "rigid_body") p = {1.0, 2.0, 3.0};
        const auto spec = catalogue(name, p);
        std::vector<BumpProfile> bumps;
        for (std::size_t a = 0; a < spec.n_fields(); ++a) bumps.push_back({0.1 * (1.0 + a), 1.0, 0.5});
        const auto g = evolve(spec, bump_data(0, 2, 4, 54, bumps), 0.01);
        EXPECT_EQ(g.status(), GridStatus::completed) << name;
        EXPECT_LT(g.stats().max_phi, 1.0) << name;
        EXPECT_LT(g.stats().max_psi_u, 10.0) << name;
        EXPECT_LT(g.stats().max_psi_v, 10.0) << name;
    }
}

TEST(Evolve, KeepRowsStoresNeighbours) {
    EvolveOptions o;
    o.keep_u = {1.0};
    const auto g = evolve(catalogue("null_form"), bump_data(0, 2, 4, 8, {{0.1, 1.0, 0.5}}), 0.05, o);
    const auto i = *g.row_of(1.0);
    EXPECT_TRUE(g.has_row(i - 1) && g.has_row(i) && g.has_row(i + 1));
    EXPECT_FALSE(g.has_row(0));
    EXPECT_THROW(g.psi(0, 0, 0), std::out_of_range);
}

TEST(Evolve, Errors) {
    const auto spec = catalogue("john");
    const auto d = bump_data(0, 2, 4, 10, {{0.1, 1.0, 0.5}});
    EXPECT_THROW(evolve(spec, d, 0.0), std::invalid_argument);
    EXPECT_THROW(evolve(spec, d, 0.3), std::invalid_argument);
    EXPECT_THROW(evolve(catalogue("weak_null_chain"), d, 0.1), DimensionError);
    auto bad_corner = d;
    bad_corner.outgoing[0] = [](double) { return 1.0; };
    EXPECT_THROW(evolve(spec, bad_corner, 0.1), std::invalid_argument);
    EXPECT_THROW(bump_data(0, 2, 2, 10, {{0.1, 1.0, 0.5}}).validate(), std::invalid_argument);
    EvolveOptions o;
    o.keep_u = {0.55};
    EXPECT_THROW(evolve(spec, d, 0.1, o), std::invalid_argument);
}

TEST(RadiationTrace, FreeWaveClosedForm) {
    // psi = f(u) exactly, so Phi = 2 f'(u) + f(u) e^{-s}.
    const BumpProfile f{0.1, 1.0, 0.5};
    const auto g = evolve(WaveSystemSpec(1, Tensor3(1), Tensor3(1)), bump_data(0, 2, 4, 44, {f}), 0.01, {});
    ASSERT_EQ(g.status(), GridStatus::completed);
    for (double u : {0.0, 0.75, 1.2, 2.0}) {
        const auto tr = radiation_trace(g, u);
        const double fp = deriv(f, u, 1e-4);
        ASSERT_EQ(tr.size(), g.cols());
        for (std::size_t k = 0; k < tr.size(); k += 97) {
            const double expect = 2 * fp + f(u) * std::exp(-tr.s[k]);
            EXPECT_NEAR(tr.at(k)[0], expect, 2e-4) << u;
        }
        EXPECT_NEAR(tr.s.back(), std::log(0.5 * (44 - u)), 1e-12);
    }
}

TEST(RadiationTrace, NullFormResidualDecays) {
    const auto g = evolve(catalogue("null_form"), bump_data(0, 2, 4, 204, {{0.5, 1.0, 0.5}}), 0.01);
    const auto tr = radiation_trace(g, 0.75);
    const auto sys = asymptotic_system(catalogue("null_form"));
    CompareOptions o;
    const auto cmp = compare_to_asymptotic(tr, sys, 1.0, o);
    const double early = cmp.residual[1], late = cmp.residual[cmp.residual.size() - 2];
    EXPECT_LT(late, 0.05 * early);
}

TEST(RadiationTrace, WeakNullChainGrowsLinearlyInS) {
    // Phi_1 grows like (Phi_0^2 / 4) s once Phi_0 has settled.
    const double u = 0.75;
    const auto spec = catalogue("weak_null_chain");
    const auto g = evolve(spec, bump_data(0, 2, 4, 404, {{0.2, 1.0, 0.5}, {0.0, 1.0, 0.5}}), 0.01);
    ASSERT_EQ(g.status(), GridStatus::completed);
    const auto tr = radiation_trace(g, u);
    const double s_end = tr.s.back(), s_from = s_end - std::log(10.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.s[k] < s_from) continue;
        const double x = tr.s[k], y = tr.at(k)[1];
        sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double phi0 = tr.at(tr.size() - 1)[0];
    EXPECT_NEAR(slope, phi0 * phi0 / 4, 0.15 * phi0 * phi0 / 4);
}

TEST(RadiationTrace, Errors) {
    EvolveOptions o;
    o.keep_u = {1.0};
    const auto g = evolve(catalogue("null_form"), bump_data(0, 2, 4, 8, {{0.1, 1.0, 0.5}}), 0.05, o);
    EXPECT_THROW(radiation_trace(g, 1.025), std::invalid_argument);
    EXPECT_THROW(radiation_trace(g, 0.5), std::invalid_argument);
    const auto tr = radiation_trace(g, 1.0);
    EXPECT_THROW(compare_to_asymptotic(tr, asymptotic_system(catalogue("null_form")), 1.0), std::invalid_argument);
    EXPECT_THROW(compare_to_asymptotic(tr, asymptotic_system(catalogue("weak_null_chain")), 0.5), DimensionError);
}

TEST(Compare, ExactAsymptoticSolutionHasNoDeviation) {
    // Trace sampled from the closed-form weak-null chain flow.
    const auto tr = synthetic_trace(400, 0.0, 6.0, [](double s) { return Vector{0.2, 0.01 * s}; });
    const auto cmp = compare_to_asymptotic(tr, asymptotic_system(catalogue("weak_null_chain")), 1.0);
    EXPECT_GE(cmp.s_start, 1.0);
    EXPECT_LT(cmp.s_start, 1.0 + 6.0 / 399.0);
    EXPECT_LE(cmp.sup_deviation, 1e-8);
    for (double r : cmp.residual) EXPECT_LE(r, 1e-6);
}

TEST(HamiltonianDrift, ConstantAndDecayingTraces) {
    const QuadraticHamiltonian ham(Matrix::identity(2));
    const auto flat = hamiltonian_drift(synthetic_trace(200, 0.0, 5.0, [](double) { return Vector{0.3, 0.4}; }), ham);
    EXPECT_NEAR(flat.tail_mean, 0.25, 1e-15);
    EXPECT_EQ(flat.tail_oscillation, 0.0);
    EXPECT_EQ(flat.relative_oscillation, 0.0);
    EXPECT_TRUE(std::isnan(flat.decay_rate));

    const auto decaying =
        hamiltonian_drift(synthetic_trace(2000, 0.0, 10.0, [](double s) { return Vector{1.0 + std::exp(-s), 0.0}; }), ham);
    // H = (1 + e^{-s})^2, dH/ds ~ -2 e^{-s}.
    EXPECT_NEAR(decaying.decay_rate, -1.0, 0.05);
    const double lo = std::pow(1 + std::exp(-10.0), 2), hi = std::pow(1 + std::exp(-(10.0 - std::log(10.0))), 2);
    EXPECT_NEAR(decaying.tail_oscillation, hi - lo, 1e-2 * (hi - lo));
    const auto one_field = synthetic_trace(10, 0.0, 1.0, [](double) { return Vector{1.0}; });
    EXPECT_THROW(hamiltonian_drift(one_field, ham), DimensionError);
}
