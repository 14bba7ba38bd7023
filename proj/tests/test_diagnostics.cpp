#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qnsk/diagnostics.hpp"
#include "qnsk/initial_data.hpp"

using namespace qnsk;

namespace {

constexpr double pi = std::numbers::pi;

FluidState perturbed(const Grid& g, double lift = 0.0) {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::perturbed_gaussian;
    spec.amplitude = 0.2;
    spec.mode = 2;
    spec.velocity = 0.3;
    spec.lift = lift;
    return generate(g, spec);
}

}  // namespace

TEST(Energy, GaussianAtRest) {
    // R = e^{-y^2} on the line: \int R y^2 = -\int R log R = \int |grad sqrt R|^2 = sqrt(pi)/2.
    const Grid g(1, 10.0, 256);
    FluidState s(g);
    s.sqrtR = map(coordinate(g, 0), [](double y) { return std::exp(-0.5 * y * y); });
    const double eps = 0.5, sp = std::sqrt(pi);
    EXPECT_NEAR(energy(s, TauValue{2.0, 1.0}, eps), eps * eps * sp / 2.0 / 8.0, 1e-12);
    EXPECT_NEAR(dissipation(s, TauValue{2.0, 1.0}, eps, 0.3), eps * eps * sp / 2.0 / 8.0, 1e-12);
    EXPECT_NEAR(relative_entropy(s.density()), 0.0, 1e-12);
    EXPECT_NEAR(csiszar_kullback_gap(s.density()), 0.0, 1e-10);
}

TEST(Energy, RegularizedReducesToPlainWhenOff) {
    const Grid g(1, 6.0, 128);
    const FluidState s = perturbed(g);
    ParamSet p;
    p.nu = 0.4;
    p.eps = 0.5;
    const TauValue tau{1.4, 0.9};
    EXPECT_DOUBLE_EQ(energy_reg(s, p, tau), energy(s, tau, p.eps));
    EXPECT_NEAR(dissipation_reg(s, p, tau), dissipation(s, tau, p.eps, p.nu), 1e-12);
}

TEST(BdEntropy, KineticPartVanishesForGradientVelocity) {
    // U = -nu grad log R makes the effective velocity zero.
    const Grid g(1, 6.0, 128);
    const double nu = 0.3;
    FluidState s(g);
    s.sqrtR = map(coordinate(g, 0), [](double y) { return std::exp(-0.5 * y * y) + 0.05; });
    const ScalarField R = s.density();
    const ScalarField L = map(R, [](double r) { return std::log(r); });
    const VectorField gL = gradient(L);
    s.Lambda[0] = s.sqrtR * (-nu * gL[0]);
    FluidState s0 = s;
    s0.Lambda[0] = ScalarField(g);
    const double eps = 0.5;
    const TauValue tau{1.0, 0.0};
    const double rest = bd_entropy(s0, tau, eps, 0.0);
    EXPECT_NEAR(bd_entropy(s, tau, eps, nu), rest, 1e-9 * std::abs(rest));
}

TEST(BdIdentity, AllTermsVanishWithoutViscosity) {
    const Grid g(1, 5.0, 64);
    ParamSet p;
    p.eps = 0.5;
    p.delta1 = 0.01;
    p.r1 = 0.1;
    const BdTerms t = bd_identity_terms(perturbed(g, 0.05), p, TauValue{1.2, 0.5});
    EXPECT_EQ(t.bracket, 0.0);
    EXPECT_EQ(t.lhs_rate, 0.0);
    EXPECT_EQ(t.rhs_rate, 0.0);
}

TEST(Identities, KortewegAndLogHessianOnGaussian) {
    for (int d : {1, 2}) {
        const Grid g(d, 8.0, d == 1 ? 128 : 64);
        const ScalarField a = map(radius_squared(g), [](double r2) { return std::exp(-0.5 * r2); });
        EXPECT_LE(korteweg_identity_residual(a), 1e-8) << d;
        EXPECT_LE(loghess_identity_residual(a * a), 1e-8) << d;
    }
}

TEST(Identities, KortewegResidualConvergesSpectrally) {
    // A Gaussian narrow enough that coarse grids under-resolve it.
    double prev = INFINITY;
    for (int n : {16, 32, 64}) {
        const Grid g(1, 4.0, n);
        const ScalarField a = map(coordinate(g, 0), [](double y) { return std::exp(-2.0 * y * y) + 0.1; });
        const double r = korteweg_identity_residual(a);
        EXPECT_LT(r, prev) << n;
        prev = r;
    }
    EXPECT_LT(prev, 1e-8);
}

TEST(Compatibility, ConstantAndUniformVelocity) {
    const Grid g(1, 4.0, 64);
    FluidState c(g);
    c.sqrtR = ScalarField(g, 0.8);
    CompatResiduals r = compatibility_residuals(c);
    EXPECT_EQ(r.tN, 0.0);
    EXPECT_EQ(r.sK, 0.0);
    FluidState s(Grid(1, 8.0, 256));
    s.sqrtR = map(coordinate(s.grid, 0), [](double y) { return std::exp(-0.5 * y * y) + 0.1; });
    s.Lambda[0] = 0.7 * s.sqrtR;
    r = compatibility_residuals(s);
    EXPECT_LE(r.tN, 1e-10);
    EXPECT_LE(r.sK, 1e-8);
}

TEST(Csiszar, GapNonnegativeOnRandomFields) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    const Grid g(1, 6.0, 128);
    for (int k = 0; k < 20; ++k) {
        const double a = U(rng), b = U(rng), c = 1.0 + U(rng);
        ScalarField R = map(coordinate(g, 0), [&](double y) { return std::exp(-c * y * y + a * std::sin(y) + b * y); });
        R *= gaussian_mass(g) / integrate(R);
        EXPECT_GE(csiszar_kullback_gap(R), -1e-10);
    }
}

TEST(LlogL, ValueBelowBound) {
    const Grid g(2, 5.0, 32);
    for (double amp : {0.5, 1.0, 3.0}) {
        const ScalarField f = map(radius_squared(g), [&](double r2) { return amp * std::exp(-0.5 * r2); });
        const LlogLResult r = llogl_bound(f, 0.5);
        EXPECT_GT(r.c_beta, 0.0);
        EXPECT_LE(r.value, r.bound) << amp;
    }
    EXPECT_THROW(llogl_bound(ScalarField(g, 1.0), 1.0), std::invalid_argument);
}

TEST(Record, ColumnsMatchValues) {
    const Grid g(1, 5.0, 64);
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    const DiagnosticsRecord r = compute_record(perturbed(g, 0.05), p, TauValue{1.0, 0.0});
    EXPECT_EQ(record_values(r).size(), record_columns().size());
    EXPECT_EQ(record_column_docs().size(), record_columns().size());
    EXPECT_EQ(record_columns().front(), "t");
    EXPECT_GT(r.mass, 0.0);
    EXPECT_LE(r.llogl_value, r.llogl_bound);
}
