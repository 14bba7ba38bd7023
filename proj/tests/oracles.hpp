#pragma once

// Independent reference computations. Nothing here calls into the library.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Time at which the solution of tau'' = 2/tau, tau(0) = 1, tau'(0) = 0 reaches tau.
/// Along the solution tau' = 2 sqrt(log tau); with u = sqrt(log tau) this is
/// t = \int_0^u exp(s^2) ds.
inline double time_of_tau(double tau) {
    const double u = std::sqrt(std::log(tau));
    return simpson([](double s) { return std::exp(s * s); }, 0.0, u);
}

/// Inverse of time_of_tau by bisection in log tau.
inline double tau_of_time(double t) {
    double lo = 1.0, hi = 2.0;
    while (time_of_tau(hi) < t) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (time_of_tau(mid) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// d = 1 Gaussian family R = m b / sqrt(pi) exp(-b^2 y^2), U = c y is invariant under the
/// self-similar flow with nu, eps and no regularization. State (tau, tau', b, c).
using Ansatz = std::array<double, 4>;

inline Ansatz ansatz_rhs(const Ansatz& z, double nu, double eps) {
    const double tau = z[0], dtau = z[1], b = z[2], c = z[3];
    const double t2 = tau * tau, b2 = b * b;
    return {dtau, 2.0 / tau, -b * c / t2,
            -c * c / t2 - 2.0 + 2.0 * b2 + eps * eps * b2 * b2 / t2 - 2.0 * nu * b2 * c / t2 -
                2.0 * nu * (dtau / tau) * b2};
}

/// Classical RK4 from (1, 0, 1, 0) to t_end; returns b(t_end).
inline double ansatz_width(double nu, double eps, double t_end, int steps = 20000) {
    Ansatz z{1.0, 0.0, 1.0, 0.0};
    const double h = t_end / steps;
    auto add = [](const Ansatz& a, const Ansatz& k, double s) {
        Ansatz r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + s * k[i];
        return r;
    };
    for (int i = 0; i < steps; ++i) {
        const Ansatz k1 = ansatz_rhs(z, nu, eps);
        const Ansatz k2 = ansatz_rhs(add(z, k1, 0.5 * h), nu, eps);
        const Ansatz k3 = ansatz_rhs(add(z, k2, 0.5 * h), nu, eps);
        const Ansatz k4 = ansatz_rhs(add(z, k3, h), nu, eps);
        for (int q = 0; q < 4; ++q) z[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
    }
    return z[2];
}

/// Relative deviation of the second moment per unit mass, 1/(2 b^2), from the target 1/2.
inline double ansatz_moment_error(double nu, double eps, double t_end) {
    const double b = ansatz_width(nu, eps, t_end, static_cast<int>(std::max(2000.0, 400.0 * t_end)));
    return std::abs(1.0 / (b * b) - 1.0);
}

}  // namespace oracle
