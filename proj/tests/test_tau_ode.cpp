#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qnsk/tau_ode.hpp"

using namespace qnsk;

TEST(TauOracle, FrozenValues) {
    // Frozen outputs of the closed-form oracle; guards the oracle itself.
    EXPECT_NEAR(oracle::time_of_tau(1.00998341061096), 0.1, 1e-13);
    EXPECT_NEAR(oracle::tau_of_time(1e3) / 5463.40903812363, 1.0, 1e-11);
    EXPECT_NEAR(oracle::tau_of_time(1e4) / 63107.1871902624, 1.0, 1e-11);
    EXPECT_NEAR(oracle::tau_of_time(1e5) / 704054.168954978, 1.0, 1e-11);
    EXPECT_NEAR(oracle::tau_of_time(1e6) / 7693538.0084866, 1.0, 1e-11);
}

TEST(TauSolve, InitialValuesExact) {
    const TauSolution s = tau_solve(1.0, 1e-10, 1e-12);
    EXPECT_EQ(s.nodes().front().t, 0.0);
    EXPECT_EQ(s.nodes().front().tau, 1.0);
    EXPECT_EQ(s.nodes().front().dtau, 0.0);
    const TauValue v = s.eval(0.0);
    EXPECT_EQ(v.tau, 1.0);
    EXPECT_EQ(v.dtau, 0.0);
    EXPECT_EQ(s.interpolation_order(), 5);
}

TEST(TauSolve, FirstIntegralAtNodesAndBetween) {
    for (double rel : {1e-8, 1e-10, 1e-12}) {
        const double abs_tol = 1e-2 * rel;
        const TauSolution s = tau_solve(100.0, rel, abs_tol);
        const double limit = 10.0 * std::max(rel, abs_tol);
        for (const TauNode& n : s.nodes()) ASSERT_LE(tau_first_integral_residual(n.tau, n.dtau), limit) << n.t;
        for (int i = 0; i <= 20000; ++i) {
            const double t = 100.0 * i / 20000.0;
            const TauValue v = s.eval(t);
            ASSERT_LE(tau_first_integral_residual(v.tau, v.dtau), limit) << t;
        }
    }
}

TEST(TauSolve, MatchesClosedForm) {
    const TauSolution s = tau_solve(1e6, 1e-12, 1e-14);
    for (double t : {0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
        const double ref = oracle::tau_of_time(t);
        EXPECT_NEAR(s.eval(t).tau / ref, 1.0, 1e-9) << t;
        EXPECT_NEAR(s.eval(t).dtau, 2.0 * std::sqrt(std::log(ref)), 1e-8 * std::max(1.0, t)) << t;
    }
}

TEST(TauSolve, MonotoneAndConvex) {
    const TauSolution s = tau_solve(50.0, 1e-10, 1e-12);
    double prev_tau = 0.0, prev_dtau = -1.0;
    for (const TauNode& n : s.nodes()) {
        EXPECT_GT(n.tau, prev_tau);
        EXPECT_GT(n.dtau, prev_dtau);
        prev_tau = n.tau;
        prev_dtau = n.dtau;
    }
}

TEST(TauSolve, AsymptoticRatio) {
    const TauSolution s = tau_solve(1e6, 1e-10, 1e-12);
    for (double t : {1e3, 1e4, 1e5, 1e6}) {
        const double ref = oracle::tau_of_time(t) / (2.0 * t * std::sqrt(std::log(t)));
        EXPECT_NEAR(tau_asymptotic_ratio(s, t), ref, 1e-8 * ref) << t;
    }
    EXPECT_THROW(tau_asymptotic_ratio(s, 2.0), std::invalid_argument);
}

TEST(TauSolve, Integrals) {
    // With u = sqrt(log tau) and dt = exp(u^2) du:
    //   \int_0^T log tau dt = \int_0^U u^2 exp(u^2) du,  \int_0^T tau^-2 dt = (sqrt(pi)/2) erf(U).
    const TauSolution s = tau_solve(10.0, 1e-12, 1e-14);
    const double U = std::sqrt(std::log(oracle::tau_of_time(10.0)));
    const double ref_log = oracle::simpson([](double u) { return u * u * std::exp(u * u); }, 0.0, U);
    const double ref_inv = 0.5 * std::sqrt(M_PI) * std::erf(U);
    EXPECT_NEAR(s.integral_log_tau(10.0), ref_log, 1e-8 * ref_log);
    EXPECT_NEAR(s.integral_inv_tau2(10.0), ref_inv, 1e-9);
}

TEST(TauSolve, RejectsBadArguments) {
    EXPECT_THROW(tau_solve(0.0, 1e-10, 1e-12), std::invalid_argument);
    EXPECT_THROW(tau_solve(1.0, 0.0, 1e-12), std::invalid_argument);
    EXPECT_THROW(tau_solve(1.0, 1e-10, 1.5), std::invalid_argument);
    const TauSolution s = tau_solve(1.0, 1e-10, 1e-12);
    EXPECT_THROW(s.eval(-0.1), std::out_of_range);
    EXPECT_THROW(s.eval(1.5), std::out_of_range);
    EXPECT_THROW(s.integral_log_tau(2.0), std::out_of_range);
}
