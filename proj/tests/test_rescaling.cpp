#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnsk/diagnostics.hpp"
#include "qnsk/initial_data.hpp"
#include "qnsk/rescaling.hpp"

using namespace qnsk;

namespace {

constexpr double pi = std::numbers::pi;

// psi = A exp(i S / eps) with A = exp(-y^2/2) (1 + 0.1 cos y), S = 0.3 sin(pi y / ell).
WaveFunction polar_wave(const Grid& g, double eps) {
    WaveFunction psi(g, eps);
    const double ell = g.ell();
    for (size_t i = 0; i < g.size(); ++i) {
        const double y = g.y(0)[i];
        const double A = std::exp(-0.5 * y * y) * (1.0 + 0.1 * std::cos(y));
        const double S = 0.3 * std::sin(pi * y / ell);
        psi.re[i] = A * std::cos(S / eps);
        psi.im[i] = A * std::sin(S / eps);
    }
    return psi;
}

}  // namespace

TEST(Madelung, PolarDecomposition) {
    const Grid g(1, 8.0, 256);
    const double eps = 0.7;
    const FluidState s = madelung(polar_wave(g, eps));
    double err_a = 0.0, err_l = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const double y = g.y(0)[i];
        const double A = std::exp(-0.5 * y * y) * (1.0 + 0.1 * std::cos(y));
        const double dS = 0.3 * pi / 8.0 * std::cos(pi * y / 8.0);
        err_a = std::max(err_a, std::abs(s.sqrtR[i] - A));
        err_l = std::max(err_l, std::abs(s.Lambda[0][i] - A * dS));
    }
    EXPECT_LT(err_a, 1e-15);
    EXPECT_LT(err_l, 1e-10);
}

TEST(Madelung, VacuumGetsZeroLambda) {
    const Grid g(1, 4.0, 64);
    WaveFunction psi(g, 1.0);
    for (size_t i = 0; i < g.size(); ++i) {
        const double y = g.y(0)[i];
        psi.re[i] = std::abs(y) < 1.0 ? std::cos(0.5 * pi * y) : 0.0;
        psi.im[i] = 0.2 * psi.re[i];
    }
    const FluidState s = madelung(psi);
    for (size_t i = 0; i < g.size(); ++i)
        if (s.sqrtR[i] == 0.0) EXPECT_EQ(s.Lambda[0][i], 0.0);
}

TEST(Madelung, Irrotational) {
    const Grid g(2, 6.0, 64);
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::perturbed_gaussian;
    spec.velocity = 0.5;
    spec.lift = 0.05;
    EXPECT_LE(irrotationality_residual(madelung(generate_wave(g, spec, 1.0))), 1e-8);
}

TEST(SelfSimilar, RoundTrip) {
    const Grid gp(1, 12.0, 128);
    const TauValue tau{1.5, 0.8};
    ScalarField rho = sample(gp, [](const double* x) { return std::exp(-x[0] * x[0] / 2.25) / 1.5; });
    VectorField u(gp);
    u[0] = sample(gp, [](const double* x) { return 0.3 * std::sin(x[0] / 4.0); });
    const FluidState s = to_self_similar(rho, u, tau, integrate(rho));
    EXPECT_DOUBLE_EQ(s.grid.ell(), 8.0);
    EXPECT_NEAR(s.mass(), gaussian_mass(s.grid), 1e-12);
    const auto [rho2, u2] = from_self_similar(s, tau);
    EXPECT_EQ(rho2.grid, gp);
    for (size_t i = 0; i < gp.size(); ++i) {
        EXPECT_NEAR(rho2[i], rho[i], 1e-14);
        if (rho[i] > 1e-20) EXPECT_NEAR(u2[0][i], u[0][i], 1e-12);
    }
}

TEST(SelfSimilar, GaussianMapsToGaussian) {
    // rho = tau^-1 exp(-x^2/tau^2) with the expansion velocity u = (tau'/tau) x is the
    // image of Gamma with U = 0.
    const TauValue tau{2.0, 1.3};
    const Grid gp(1, 16.0, 128);
    const ScalarField rho = sample(gp, [&](const double* x) { return std::exp(-x[0] * x[0] / 4.0) / 2.0; });
    VectorField u(gp);
    u[0] = sample(gp, [&](const double* x) { return tau.dtau / tau.tau * x[0]; });
    const FluidState s = to_self_similar(rho, u, tau, gaussian_mass(Grid(1, 8.0, 128)));
    for (size_t i = 0; i < s.grid.size(); ++i) {
        const double y = s.grid.y(0)[i];
        EXPECT_NEAR(s.sqrtR[i], std::exp(-0.5 * y * y), 1e-14);
        EXPECT_NEAR(s.Lambda[0][i], 0.0, 1e-13);
    }
}

TEST(SelfSimilar, EnergyTransportAtInitialTime) {
    // At tau = 1, tau' = 0 with unit mass ratio the pseudo-energy is E(0) + \int R |y|^2.
    const Grid g(1, 8.0, 256);
    const ScalarField rho = mass_matched_gaussian(g, gaussian_mass(g)) *
                            map(coordinate(g, 0), [](double y) { return 1.0 + 0.2 * std::cos(y); });
    VectorField u(g);
    u[0] = map(coordinate(g, 0), [](double y) { return 0.4 * std::sin(y / 2.0); });
    const double eps = 0.6;
    const FluidState s = to_self_similar(rho, u, TauValue{1.0, 0.0}, gaussian_mass(g));
    ASSERT_DOUBLE_EQ(s.mass_ratio, 1.0);
    const double expected = original_energy(rho, u, eps) + moment(rho, Weight::r2);
    EXPECT_NEAR(energy(s, TauValue{1.0, 0.0}, eps), expected, 1e-12 * std::abs(expected));
}

TEST(SelfSimilar, RejectsBadInput) {
    const Grid g(1, 2.0, 16);
    ScalarField rho(g, 1.0);
    VectorField u(g);
    EXPECT_THROW(to_self_similar(rho, u, TauValue{0.0, 0.0}, 1.0), std::invalid_argument);
    EXPECT_THROW(to_self_similar(rho, u, TauValue{1.0, 0.0}, 0.0), std::invalid_argument);
    rho[3] = -1.0;
    EXPECT_THROW(to_self_similar(rho, u, TauValue{1.0, 0.0}, 1.0), std::domain_error);
}

TEST(Hydro, RoundTrip) {
    const Grid g(1, 5.0, 64);
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::perturbed_gaussian;
    spec.velocity = 0.3;
    const FluidState s = generate(g, spec);
    const FluidState b = from_hydro(to_hydro(s), 0.0);
    for (size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(b.sqrtR[i], s.sqrtR[i], 1e-15);
        if (s.sqrtR[i] > 1e-6) EXPECT_NEAR(b.Lambda[0][i], s.Lambda[0][i], 1e-12);
    }
}
