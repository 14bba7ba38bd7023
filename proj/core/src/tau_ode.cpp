#include "qnsk/tau_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace qnsk {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Y {
    double x, v;
};

inline Y f(const Y& y) { return {y.v, 2.0 / y.x}; }
inline Y axpy(const Y& y, double h, std::initializer_list<std::pair<double, Y>> terms) {
    Y r = y;
    for (const auto& [c, k] : terms) {
        r.x += h * c * k.x;
        r.v += h * c * k.v;
    }
    return r;
}

// Quintic Hermite on [0, 1]; m and a already scaled by h and h^2.
inline double hermite5(double p0, double m0, double a0, double p1, double m1, double a1, double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    return (1 - 10 * s3 + 15 * s4 - 6 * s5) * p0 + (s - 6 * s3 + 8 * s4 - 3 * s5) * m0 +
           0.5 * (s2 - 3 * s3 + 3 * s4 - s5) * a0 + 0.5 * (s3 - 2 * s4 + s5) * a1 +
           (-4 * s3 + 7 * s4 - 3 * s5) * m1 + (10 * s3 - 15 * s4 + 6 * s5) * p1;
}

constexpr std::array<double, 5> gl_x = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                        0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_w = {0.2369268850561891, 0.4786286704993665,
                                        0.5688888888888889, 0.4786286704993665,
                                        0.2369268850561891};

}  // namespace

TauSolution::TauSolution(std::vector<TauNode> nodes, double rel_tol, double abs_tol)
    : nodes_(std::move(nodes)), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

TauValue TauSolution::eval(double t) const {
    if (nodes_.empty() || t < 0.0 || t > t_max())
        throw std::out_of_range("tau_eval: t = " + std::to_string(t) + " outside [0, " +
                                std::to_string(t_max()) + "]");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                               [](double v, const TauNode& n) { return v < n.t; });
    if (it == nodes_.begin()) return {nodes_.front().tau, nodes_.front().dtau};
    const TauNode& a = *(it - 1);
    if (t == a.t || it == nodes_.end()) return {a.tau, a.dtau};
    const TauNode& b = *it;
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    // Higher derivatives come from the ODE itself: tau'' = 2/tau, tau''' = -2 tau'/tau^2.
    const double h2 = h * h;
    const double tau =
        hermite5(a.tau, h * a.dtau, h2 * 2.0 / a.tau, b.tau, h * b.dtau, h2 * 2.0 / b.tau, s);
    const double dtau = hermite5(a.dtau, h * 2.0 / a.tau, -h2 * 2.0 * a.dtau / (a.tau * a.tau),
                                 b.dtau, h * 2.0 / b.tau, -h2 * 2.0 * b.dtau / (b.tau * b.tau), s);
    return {tau, dtau};
}

template <class F>
double TauSolution::integrate_(double t, F&& fn) const {
    if (t < 0.0 || t > t_max()) throw std::out_of_range("tau integral: t outside stored range");
    double acc = 0.0;
    for (size_t i = 0; i + 1 < nodes_.size() && nodes_[i].t < t; ++i) {
        const double lo = nodes_[i].t;
        const double hi = std::min(nodes_[i + 1].t, t);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t q = 0; q < gl_x.size(); ++q) acc += half * gl_w[q] * fn(eval(mid + half * gl_x[q]).tau);
    }
    return acc;
}

double TauSolution::integral_inv_tau2(double t) const {
    return integrate_(t, [](double tau) { return 1.0 / (tau * tau); });
}

double TauSolution::integral_log_tau(double t) const {
    return integrate_(t, [](double tau) { return std::log(tau); });
}

TauSolution tau_solve(double t_max, double rel_tol, double abs_tol) {
    if (!(t_max > 0.0)) throw std::invalid_argument("tau_solve: t_max must be positive");
    if (!(rel_tol > 0.0 && rel_tol < 1.0 && abs_tol > 0.0 && abs_tol < 1.0))
        throw std::invalid_argument("tau_solve: tolerances must lie in (0, 1)");

    std::vector<TauNode> nodes;
    nodes.push_back({0.0, 1.0, 0.0});
    Y y{1.0, 0.0};
    double t = 0.0;
    // Steps grow roughly like t, so accepted nodes are already log-spaced at late times.
    double h = 0.01 * std::pow(std::max(rel_tol, abs_tol), 0.2);
    double err_prev = 1.0;
    Y k1 = f(y);
    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
    constexpr double beta = 0.04, alpha = 0.2 - 0.75 * beta;
    // Local control is tighter than the requested tolerance so that the accumulated
    // first-integral drift stays inside it.
    constexpr double kLocal = 0.05;

    while (t < t_max) {
        h = std::min(h, 0.05 * std::max(1.0, t));
        bool last = false;
        if (t + h >= t_max) {
            h = t_max - t;
            last = true;
        }
        if (h < 1e-14 * std::max(1.0, t))
            throw IntegratorError("tau_solve: step size underflow at t = " + std::to_string(t));

        const Y k2 = f(axpy(y, h, {{a21, k1}}));
        const Y k3 = f(axpy(y, h, {{a31, k1}, {a32, k2}}));
        const Y k4 = f(axpy(y, h, {{a41, k1}, {a42, k2}, {a43, k3}}));
        const Y k5 = f(axpy(y, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}));
        const Y k6 = f(axpy(y, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}));
        const Y yn = axpy(y, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
        const Y k7 = f(yn);
        const double ex = h * (e1 * k1.x + e3 * k3.x + e4 * k4.x + e5 * k5.x + e6 * k6.x + e7 * k7.x);
        const double ev = h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
        const double sx = kLocal * (abs_tol + rel_tol * std::max(std::abs(y.x), std::abs(yn.x)));
        const double sv = kLocal * (abs_tol + rel_tol * std::max(std::abs(y.v), std::abs(yn.v)));
        double err = std::max(std::abs(ex) / sx, std::abs(ev) / sv);
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            t = last ? t_max : t + h;
            y = yn;
            k1 = k7;
            nodes.push_back({t, y.x, y.v});
            double fac = err == 0.0 ? fac_max
                                    : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
            h *= std::clamp(fac, fac_min, fac_max);
            err_prev = std::max(err, 1e-4);
        } else {
            h *= std::max(fac_min, safety * std::pow(err, -alpha));
        }
    }
    return TauSolution(std::move(nodes), rel_tol, abs_tol);
}

TauValue tau_eval(const TauSolution& sol, double t) { return sol.eval(t); }

double tau_asymptotic_ratio(const TauSolution& sol, double t) {
    if (!(t > std::exp(1.0))) throw std::invalid_argument("tau_asymptotic_ratio: need t > e");
    return sol.eval(t).tau / (2.0 * t * std::sqrt(std::log(t)));
}

double tau_first_integral_residual(double tau, double dtau) {
    return std::abs(dtau * dtau - 4.0 * std::log(tau));
}

}  // namespace qnsk
