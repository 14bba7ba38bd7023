#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnsk/initial_data.hpp"
#include "qnsk/lognls_solver.hpp"

using namespace qnsk;

namespace {

WaveFunction wave(const Grid& g, double eps, double lift = 0.0) {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::perturbed_gaussian;
    spec.velocity = 0.4;
    spec.lift = lift;
    return generate_wave(g, spec, eps);
}

ScalarField modulus(const WaveFunction& p) { return map(p.re * p.re + p.im * p.im, [](double x) { return std::sqrt(x); }); }

}  // namespace

TEST(LogNls, PotentialSubstepKeepsModulus) {
    const Grid g(2, 5.0, 32);
    WaveFunction psi = wave(g, 0.8);
    const ScalarField a0 = modulus(psi);
    nls_potential_substep(psi, 1e-12, 0.37, true);
    const ScalarField a1 = modulus(psi);
    for (size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a1[i], a0[i], 1e-15 * std::max(1.0, a0[i]));
}

TEST(LogNls, KineticSubstepIsUnitary) {
    const Grid g(1, 6.0, 128);
    WaveFunction psi = wave(g, 1.0);
    const double m0 = psi.mass(), g0 = grad_norm_sq(psi);
    nls_kinetic_substep(psi, 0.3, 1.2);
    EXPECT_NEAR(psi.mass(), m0, 1e-14 * m0);
    EXPECT_NEAR(grad_norm_sq(psi), g0, 1e-12 * g0);
}

TEST(LogNls, KineticSubstepsCompose) {
    const Grid g(1, 6.0, 64);
    WaveFunction a = wave(g, 1.0), b = a;
    nls_kinetic_substep(a, 0.2, 1.5);
    nls_kinetic_substep(a, 0.3, 1.5);
    nls_kinetic_substep(b, 0.5, 1.5);
    for (size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.re[i], b.re[i], 1e-13);
}

TEST(LogNls, GaussianPotentialVanishesInRescaledVariables) {
    // log|psi|^2 + |y|^2 = 0 for |psi|^2 = e^{-|y|^2}, so the potential flow is the identity.
    const Grid g(1, 8.0, 128);
    WaveFunction psi(g, 1.0);
    psi.re = map(coordinate(g, 0), [](double y) { return std::exp(-0.5 * y * y); });
    WaveFunction w = psi;
    nls_potential_substep(w, 0.0, 0.5, true);
    for (size_t i = 0; i < g.size(); ++i) {
        if (psi.re[i] < 1e-150) continue;
        EXPECT_NEAR(w.re[i], psi.re[i], 1e-14);
        EXPECT_NEAR(w.im[i], 0.0, 1e-14);
    }
}

TEST(LogNls, MassExactAndDissipationIdentity) {
    const Grid g(1, 8.0, 256);
    const WaveFunction psi = generate_wave(g, GeneratorSpec{}, 1.0);
    NlsParams p;
    p.eps = 1.0;
    std::vector<double> r;
    for (double dt : {0.02, 0.01}) {
        p.dt = dt;
        const NlsTrajectory tr = nls_run(psi, p, 1.0);
        EXPECT_LE(tr.max_step_mass_drift, 1e-12);
        r.push_back(psi_dissipation_identity(tr.samples));
    }
    EXPECT_NEAR(r[0] / r[1], 4.0, 0.2);
}

TEST(LogNls, OriginalVariantHasNoDissipation) {
    const Grid g(1, 8.0, 128);
    NlsParams p;
    p.variant = NlsParams::Variant::original;
    const WaveFunction psi = wave(g, 1.0);
    EXPECT_EQ(nls_dissipation(psi, p, TauValue{2.0, 1.0}), 0.0);
    p.variant = NlsParams::Variant::rescaled;
    EXPECT_GT(nls_dissipation(psi, p, TauValue{2.0, 1.0}), 0.0);
}

TEST(LogNls, ResolveMuDefault) {
    const Grid g(1, 5.0, 64);
    const WaveFunction psi = wave(g, 1.0);
    NlsParams p;
    double m = 0.0;
    for (size_t i = 0; i < g.size(); ++i) m = std::max(m, psi.re[i] * psi.re[i] + psi.im[i] * psi.im[i]);
    EXPECT_DOUBLE_EQ(resolve_mu(p, psi), 1e-12 * m);
    p.mu = 0.25;
    EXPECT_DOUBLE_EQ(resolve_mu(p, psi), 0.25);
}

TEST(Crosscheck, ZeroHorizonGivesZeroDifference) {
    const Grid g(1, 8.0, 128);
    GeneratorSpec spec;
    spec.lift = 0.01;
    const CrosscheckReport r = nls_to_hydro_crosscheck(generate_wave(g, spec, 1.0), 0.0, CrosscheckPolicy{});
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.difference, 0.0);
}

TEST(Crosscheck, UnliftedGaussianReportsFailureInsteadOfThrowing) {
    const Grid g(1, 8.0, 256);
    CrosscheckReport r;
    EXPECT_NO_THROW(r = nls_to_hydro_crosscheck(generate_wave(g, GeneratorSpec{}, 1.0), 0.25, CrosscheckPolicy{}));
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.status, "completed");
}

TEST(Crosscheck, LiftedDataAgreesAtStabilizationScale) {
    const Grid g(1, 8.0, 256);
    GeneratorSpec spec;
    spec.lift = 0.01;
    CrosscheckPolicy pol;
    pol.dt = 2e-3;
    pol.delta_stab = 1e-4;
    const CrosscheckReport r = nls_to_hydro_crosscheck(generate_wave(g, spec, 1.0), 0.25, pol);
    ASSERT_TRUE(r.ok) << r.status;
    EXPECT_LT(r.difference, 1e-4);
    EXPECT_NEAR(r.mass_nls, r.mass_hydro, 1e-8 * r.mass_initial);
}

TEST(Rescaled, ThetaAndInitialScaling) {
    const Grid g(1, 6.0, 64);
    const TauSolution tau = tau_solve(2.0, 1e-12, 1e-14);
    EXPECT_NEAR(nls_theta(tau, 2.0, 1, 1.0), tau.integral_log_tau(2.0), 1e-15);
    EXPECT_NEAR(nls_theta(tau, 2.0, 2, std::exp(1.0)), 2.0 * tau.integral_log_tau(2.0) - 2.0, 1e-14);
    const WaveFunction psi = wave(g, 1.0);
    const WaveFunction P = rescaled_initial(psi, 2.0 * psi.mass());
    EXPECT_NEAR(P.mass(), 2.0 * psi.mass(), 1e-12);
}
