#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qnsk/galerkin_solver.hpp"
#include "qnsk/initial_data.hpp"

using namespace qnsk;

namespace {

FluidState gaussian_at_rest(const Grid& g) {
    FluidState s(g);
    s.sqrtR = map(radius_squared(g), [](double r2) { return std::exp(-0.5 * r2); });
    return s;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(Rhs, ConstantStateFeelsOnlyConfinement) {
    const Grid g(1, 3.0, 32);
    FluidState s(g);
    s.sqrtR = ScalarField(g, std::sqrt(0.7));
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    p.delta1 = 0.01;
    const Tendency t = rhs(s, p, TauValue{1.3, 0.4});
    EXPECT_LT(max_abs(t.dR), 1e-14);
    const ScalarField expect = -2.0 * 0.7 * coordinate(g, 0);
    EXPECT_LT(max_diff(t.dM[0], expect), 1e-12);
}

TEST(Rhs, GaussianPressureBalancesConfinement) {
    const Grid g(2, 6.0, 64);
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.0;
    const Tendency t = rhs(gaussian_at_rest(g), p, TauValue{1.0, 0.0});
    EXPECT_LT(max_abs(t.dR), 1e-12);
    EXPECT_LT(max_abs(t.dM[0]), 1e-12);
    EXPECT_LT(max_abs(t.dM[1]), 1e-12);
}

TEST(Step, GaussianAtRestIsSteadyOnlyWhileTauDotVanishes) {
    // The viscous change of variables leaves (nu tau'/tau) grad R in the momentum equation,
    // so the resting Gaussian balances exactly at t = 0 and then follows the ansatz ODE.
    const Grid g(1, 6.0, 128);
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.0;
    const FluidState s0 = gaussian_at_rest(g);
    EXPECT_LT(max_abs(rhs(s0, p, TauValue{1.0, 0.0}).dM[0]), 1e-12);
    EXPECT_GT(max_abs(rhs(s0, p, TauValue{1.5, 0.9}).dM[0]), 1e-2);
    const TauSolution tau = tau_solve(1.5, 1e-12, 1e-14);
    FluidState s = s0;
    for (int k = 0; k < 200; ++k) s = step(s, p, 5e-3, tau);
    const double b = oracle::ansatz_width(0.5, 0.0, 1.0);
    EXPECT_NEAR(moment(s.density(), Weight::r2) / s.mass() * 2.0 * b * b, 1.0, 1e-5);
}

TEST(Step, CapillarityForcesTheGaussianAtFirstOrder) {
    // Not a steady state for eps > 0: the momentum picks up O(dt eps^2) in one step.
    const Grid g(1, 6.0, 128);
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    const TauSolution tau = tau_solve(0.1, 1e-12, 1e-14);
    const FluidState s0 = gaussian_at_rest(g);
    const double m1 = l2_norm(step(s0, p, 1e-3, tau).Lambda[0]);
    const double m2 = l2_norm(step(s0, p, 5e-4, tau).Lambda[0]);
    EXPECT_GT(m1, 0.0);
    EXPECT_NEAR(m1 / m2, 2.0, 0.05);
}

TEST(Step, MassConservedToRoundOff) {
    // Coarse grid: the explicit part of the eta2 term limits dt like k^(2s+2).
    const Grid g(2, 5.0, 32);
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::two_bump;
    spec.velocity = 0.3;
    spec.lift = 0.1;
    const FluidState s0 = generate(g, spec);
    ParamSet p;
    p.nu = 0.3;
    p.eps = 0.4;
    p.delta1 = 0.01;
    p.delta2 = 1e-4;
    p.eta2 = 1e-8;
    p.r1 = 0.2;
    const TauSolution tau = tau_solve(1.0, 1e-12, 1e-14);
    FluidState s = s0;
    for (int k = 0; k < 20; ++k) s = step(s, p, 1e-3, tau);
    EXPECT_LE(std::abs(s.mass() - s0.mass()) / s0.mass(), 1e-13);
}

TEST(Korteweg, ForceMatchesDivergenceForm) {
    // (1/4)(grad Delta R - Div(grad R (x) grad R / R)) against 2 Div(sqrt R grad^2 sqrt R - grad sqrt R (x) grad sqrt R) / 4.
    const Grid g(2, 8.0, 128);
    FluidState s(g);
    s.sqrtR = map(radius_squared(g), [](double r2) { return std::exp(-0.5 * r2) + 0.1; });
    const ScalarField R = s.density();
    const VectorField F = korteweg_force(R, 0.0);
    const TensorField H = hessian(s.sqrtR);
    const VectorField ga = gradient(s.sqrtR);
    TensorField T(4, ScalarField(g));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) T[a * 2 + b] = s.sqrtR * H[a * 2 + b] - ga[a] * ga[b];
    const VectorField D = divergence(T, g);
    for (int a = 0; a < 2; ++a) EXPECT_LT(max_diff(F[a], 0.5 * D[a]), 1e-9 * max_abs(D[a]));
}

TEST(Korteweg, QuotientVelocityGradient) {
    const Grid g(1, 5.0, 128);
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::perturbed_gaussian;
    spec.velocity = 0.4;
    spec.lift = 0.1;
    const FluidState s = generate(g, spec);
    const HydroFields h = to_hydro(s);
    const VectorField U = s.velocity();
    const TensorField RgU = density_weighted_velocity_gradient(h.M, U, gradient(h.R));
    const TensorField gU = gradient(U);
    EXPECT_LT(max_diff(RgU[0], h.R * gU[0]), 1e-9);
}

TEST(Run, FloorViolationIsReportedNotThrown) {
    const Grid g(1, 4.0, 64);
    FluidState s(g);
    for (size_t i = 0; i < g.size(); ++i) {
        const double y = g.y(0)[i];
        s.sqrtR[i] = std::abs(y) < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * y), 4) : 0.0;
        s.Lambda[0][i] = s.sqrtR[i] * 3.0 * y;
    }
    ParamSet p;
    p.nu = 0.0;
    p.eps = 0.1;
    p.R_min = 1e-12;
    RunOptions o;
    o.t_end = 2.0;
    const Trajectory tr = run(s, p, o);
    EXPECT_NE(tr.status, RunStatus::completed);
    EXPECT_FALSE(tr.message.empty());
    EXPECT_LT(tr.t_last, 2.0);
}

TEST(Run, RecordsAndSnapshotsAtCadence) {
    const Grid g(1, 5.0, 64);
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    p.dt.kind = DtPolicy::Kind::fixed;
    p.dt.dt = 0.01;
    RunOptions o;
    o.t_end = 0.1;
    o.diag_every = 2;
    o.snapshot_every = 5;
    const Trajectory tr = run(generate(g, GeneratorSpec{}), p, o);
    ASSERT_EQ(tr.status, RunStatus::completed);
    EXPECT_EQ(tr.steps, 10);
    EXPECT_EQ(tr.records.size(), 6u);
    EXPECT_EQ(tr.snapshots.size(), 3u);
    EXPECT_NEAR(tr.records.back().t, 0.1, 1e-12);
}

TEST(Run, GaussianAnsatzSecondMoment) {
    // Gaussian data with zero velocity stays Gaussian; its width follows the ansatz ODE.
    const Grid g(1, 5.0, 128);
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    p.dt.kind = DtPolicy::Kind::fixed;
    p.dt.dt = 2e-3;
    RunOptions o;
    o.t_end = 1.0;
    const FluidState s0 = generate(g, GeneratorSpec{});
    const Trajectory tr = run(s0, p, o);
    ASSERT_EQ(tr.status, RunStatus::completed) << tr.message;
    const FluidState s = tr.final_state();
    const double per_mass = moment(s.density(), Weight::r2) / s.mass();
    const double b = oracle::ansatz_width(0.5, 0.5, 1.0);
    EXPECT_NEAR(per_mass * 2.0 * b * b, 1.0, 1e-4);
    // Frozen oracle output.
    EXPECT_NEAR(oracle::ansatz_moment_error(0.5, 0.5, 1.0), 0.10528, 5e-5);
}

TEST(Params, Validation) {
    ParamSet p;
    EXPECT_THROW(p.validate(1), ConfigError);  // nu = eps = 0
    p.nu = 0.5;
    EXPECT_NO_THROW(p.validate(1));
    p.delta1 = -1.0;
    EXPECT_THROW(p.validate(1), ConfigError);
}
