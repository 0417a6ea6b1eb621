#include <gtest/gtest.h>

#include <cmath>

#include "wnlab/conditions.hpp"

using namespace wnlab;

namespace {

AsymptoticSystem rigid() { return asymptotic_system(catalogue("rigid_body", std::vector<double>{1.0, 2.0, 3.0})); }

const GrowthFit& fit_named(const ClassificationReport& rep, const std::string& model) {
    for (const auto& f : rep.fits)
        if (f.model == model) return f;
    throw std::runtime_error("no fit " + model);
}

}  // namespace

TEST(ClassicalNull, OnlyNullFormPasses) {
    EXPECT_TRUE(classical_null_condition(catalogue("null_form")));
    for (const char* name : {"john", "weak_null_chain", "super_exponential"})
        EXPECT_FALSE(classical_null_condition(catalogue(name))) << name;
    EXPECT_FALSE(classical_null_condition(catalogue("rigid_body", std::vector<double>{1.0, 2.0, 3.0})));
}

TEST(ClassifyGrowth, John) {
    const auto rep = classify_growth(asymptotic_system(catalogue("john")), 0.1, 100.0);
    EXPECT_EQ(rep.verdict, Verdict::blowup);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.value, 40.0, 0.4);
    EXPECT_EQ(rep.worst_trial, 0u);  // positive corner
}

TEST(ClassifyGrowth, WeakNullChainIsLinear) {
    const auto rep = classify_growth(asymptotic_system(catalogue("weak_null_chain")), 0.1, 100.0);
    EXPECT_EQ(rep.verdict, Verdict::linear_growth);
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.value, 0.01 / 4.0, 1e-6);
}

TEST(ClassifyGrowth, RigidBodyIsBounded) {
    const auto rep = classify_growth(rigid(), 0.05, 1000.0);
    EXPECT_EQ(rep.verdict, Verdict::bounded_stable);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.c_tilde_empirical, 2.0);
    for (const auto& t : rep.trials) {
        ASSERT_TRUE(t.h_norm0 && t.h_norm_final);
        EXPECT_NEAR(*t.h_norm_final, *t.h_norm0, 1e-8 * *t.h_norm0);
    }
}

TEST(ClassifyGrowth, SuperExponential) {
    const auto rep = classify_growth(asymptotic_system(catalogue("super_exponential")), 0.3, 100.0);
    EXPECT_EQ(rep.verdict, Verdict::super_exponential);
    EXPECT_FALSE(rep.pass);
    EXPECT_GE(fit_named(rep, "super_exponential").r_squared, 0.99);
}

TEST(ClassifyGrowth, ZeroSystemHasUnitConstant) {
    AsymptoticSystem zero(Tensor3(3), "zero");
    const auto rep = classify_growth(zero, 0.01, 50.0);
    EXPECT_EQ(rep.verdict, Verdict::bounded_stable);
    EXPECT_EQ(rep.c_tilde_empirical, 1.0);
    EXPECT_EQ(rep.value, 1.0);
}

TEST(ClassifyGrowth, SignEquivariance) {
    for (const char* name : {"john", "weak_null_chain", "super_exponential"}) {
        const auto sys = asymptotic_system(catalogue(name));
        GrowthOptions flipped;
        flipped.data_sign = -1.0;
        const auto a = classify_growth(sys, 0.2, 60.0);
        const auto b = classify_growth(sys.negated(), 0.2, 60.0, flipped);
        EXPECT_EQ(a.verdict, b.verdict) << name;
        EXPECT_EQ(a.value, b.value) << name;
        EXPECT_EQ(a.c_tilde_empirical, b.c_tilde_empirical) << name;
    }
}

TEST(ClassifyGrowth, ThreadCountDoesNotMatter) {
    const auto sys = rigid();
    GrowthOptions one, four;
    four.threads = 4;
    const auto a = classify_growth(sys, 0.05, 200.0, one);
    const auto b = classify_growth(sys, 0.05, 200.0, four);
    EXPECT_EQ(a.value, b.value);
    ASSERT_EQ(a.trials.size(), b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].sup_norm, b.trials[i].sup_norm);
}

TEST(FitGrowthModels, SyntheticEnvelopes) {
    auto make = [](auto&& f) {
        Trajectory t(1);
        for (int i = 0; i <= 1000; ++i) {
            const double s = 0.1 * i;
            const double v = f(s);
            t.push(s, std::span<const double>(&v, 1));
        }
        return t;
    };
    auto best = [](const std::vector<GrowthFit>& fits) {
        const GrowthFit* b = nullptr;
        for (const auto& f : fits)
            if (f.admissible && f.model != "constant" && (!b || f.sse < b->sse)) b = &f;
        return b->model;
    };
    const auto lin = fit_growth_models(make([](double s) { return 1.0 + 0.5 * s; }), 50.0);
    EXPECT_EQ(best(lin), "linear");
    EXPECT_NEAR(lin[1].rate, 0.5, 1e-9);
    const auto ex = fit_growth_models(make([](double s) { return 2.0 * std::exp(0.03 * s); }), 50.0);
    EXPECT_EQ(best(ex), "exponential");
    EXPECT_NEAR(ex[2].rate, 0.03, 1e-6);
    const auto sup = fit_growth_models(make([](double s) { return std::exp(std::exp(0.02 * s)); }), 50.0);
    EXPECT_EQ(best(sup), "super_exponential");
    EXPECT_NEAR(sup[3].rate, 0.02, 1e-6);
    EXPECT_GE(sup[3].r_squared, 0.999);
}

TEST(Certificate, RigidBodyBound) {
    // H~ = diag(1/2, 1/4, 1/6): |y|_inf <= sqrt(6)|y|_H, |y|_H <= sqrt(3/2)|y|_inf.
    auto [alg, ham] = rigid_body(1, 2, 3);
    const auto c = certify_hamiltonian(alg, ham, 0.01, 0.5, 1.0);
    ASSERT_TRUE(c.certified);
    EXPECT_NEAR(c.increment, 0.02, 1e-15);
    EXPECT_NEAR(c.h_to_max, std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(c.max_to_h, std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(c.c_tilde_bound, (std::sqrt(1.5) + 2.0) * std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(c.h_norm_bound(0.1), 0.12, 1e-15);
}

TEST(Certificate, Refusals) {
    Tensor3 broken = LieAlgebra::so3().structure();
    broken(2, 0, 1) = 2.0;
    const auto ham = QuadraticHamiltonian(Matrix::identity(3));
    EXPECT_FALSE(certify_hamiltonian(LieAlgebra(broken), ham, 0.01, 0.5, 1.0).certified);
    Matrix indef = Matrix::identity(3);
    indef(2, 2) = -0.5;
    const auto c = certify_hamiltonian(LieAlgebra::so3(), indef, 0.01, 0.5, 1.0);
    EXPECT_FALSE(c.certified);
    EXPECT_FALSE(c.reason.empty());
    EXPECT_TRUE(certify_hamiltonian(LieAlgebra::so3(), Matrix::identity(3), 0.01, 0.5, 1.0).certified);
    EXPECT_THROW(certify_hamiltonian(LieAlgebra::so3(), ham, 0.0, 0.5, 1.0), std::invalid_argument);
}

TEST(Condition1, RigidBodyRespectsCertificate) {
    Condition1Params p;
    const auto rep = check_condition_1(rigid(), p);
    ASSERT_TRUE(rep.certificate && rep.certificate->certified);
    EXPECT_EQ(rep.verdict, Verdict::bounded_stable);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.trials.size(), 400u);
    for (const auto& t : rep.trials) {
        ASSERT_TRUE(t.within_certificate);
        EXPECT_TRUE(*t.within_certificate) << t.id;
    }
    EXPECT_LE(rep.c_tilde_empirical, rep.certificate->c_tilde_bound);
}

TEST(Condition1, AbelianControlAttainsBound) {
    // No nonlinearity: aligned forcing grows |y|_H by exactly C eps / delta (1 - e^{-delta s_max}).
    const auto spec = from_hamiltonian(LieAlgebra::abelian(3), QuadraticHamiltonian(Matrix::identity(3)));
    const auto sys = asymptotic_system(spec);
    Condition1Params p;
    p.trials = 16;
    const auto rep = check_condition_1(sys, p);
    ASSERT_TRUE(rep.certificate && rep.certificate->certified);
    double best_gap = 1.0;
    for (const auto& t : rep.trials) {
        ASSERT_TRUE(t.within_certificate && *t.within_certificate);
        if (t.forcing == "adversarial_aligned") {
            const double bound = rep.certificate->h_norm_bound(*t.h_norm0);
            EXPECT_NEAR(*t.h_norm_sup, bound, 1e-6 * bound);
            best_gap = std::min(best_gap, std::abs(*t.h_norm_sup - bound) / bound);
        }
    }
    EXPECT_LE(best_gap, 1e-6);
}

TEST(Condition1, JohnFails) {
    Condition1Params p;
    p.epsilon = 0.1;
    p.trials = 16;
    const auto rep = check_condition_1(asymptotic_system(catalogue("john")), p);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(rep.verdict, Verdict::blowup);
    EXPECT_LT(rep.value, 40.0);  // forcing only accelerates the positive corner
    EXPECT_FALSE(rep.certificate.has_value());
}

TEST(Condition1, MoreTrialsNeverLowerTheConstant) {
    const auto sys = rigid();
    Condition1Params p;
    p.trials = 20;
    p.s_max = 60.0;
    const auto a = check_condition_1(sys, p);
    p.trials = 40;
    const auto b = check_condition_1(sys, p);
    EXPECT_GE(b.c_tilde_empirical, a.c_tilde_empirical);
    if (!a.pass) {
        EXPECT_FALSE(b.pass);
    }
    for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].sup_norm, b.trials[i].sup_norm);
}

TEST(Condition1, DeterministicAcrossThreads) {
    const auto sys = rigid();
    Condition1Params p;
    p.trials = 24;
    p.s_max = 60.0;
    const auto a = check_condition_1(sys, p);
    p.threads = 5;
    const auto b = check_condition_1(sys, p);
    EXPECT_EQ(a.c_tilde_empirical, b.c_tilde_empirical);
    EXPECT_EQ(a.worst_trial, b.worst_trial);
    ASSERT_EQ(a.trials.size(), b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].h_norm_sup, b.trials[i].h_norm_sup);
}

TEST(Condition1, CornerData) {
    EXPECT_EQ(condition1_corner_count(3), 8u);
    EXPECT_EQ(condition1_datum(3, 0.01, 0, 0), (Vector{0.01, 0.01, 0.01}));
    EXPECT_EQ(condition1_datum(3, 0.01, 0, 5), (Vector{-0.01, 0.01, -0.01}));
    for (std::size_t t = 8; t < 100; ++t) {
        const auto x = condition1_datum(3, 0.01, 7, t);
        EXPECT_LE(max_norm(x), 0.01);
        EXPECT_EQ(x, condition1_datum(3, 0.01, 7, t));
    }
}

TEST(Condition1, Errors) {
    Condition1Params p;
    p.epsilon = 0.0;
    EXPECT_THROW(check_condition_1(rigid(), p), std::invalid_argument);
    EXPECT_THROW(classify_growth(rigid(), -1.0, 10.0), std::invalid_argument);
}
