#include "qnsk/galerkin_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qnsk/fault_injection.hpp"

namespace qnsk {

namespace {

constexpr double kGamma = 1.0 - 0.70710678118654752440;  // 1 - 1/sqrt 2

struct SpecState {
    Spectrum R;
    std::vector<Spectrum> M;
};

SpecState forward(const HydroFields& h) {
    SpecState s{transform_forward(h.R), {}};
    for (int a = 0; a < h.M.dim(); ++a) s.M.push_back(transform_forward(h.M[a]));
    return s;
}

HydroFields inverse(const Grid& g, const SpecState& s) {
    HydroFields h{transform_inverse(g, s.R), VectorField(g)};
    for (size_t a = 0; a < s.M.size(); ++a) h.M[static_cast<int>(a)] = transform_inverse(g, s.M[a]);
    return h;
}

/// x + sum_k w_k y_k over the spectral state.
SpecState combine(const SpecState& x, std::initializer_list<std::pair<double, const SpecState*>> terms) {
    SpecState out = x;
    for (const auto& [w, y] : terms) {
        for (size_t i = 0; i < out.R.size(); ++i) out.R[i] += w * y->R[i];
        for (size_t a = 0; a < out.M.size(); ++a)
            for (size_t i = 0; i < out.M[a].size(); ++i) out.M[a][i] += w * y->M[a][i];
    }
    return out;
}

/// Frozen coefficients of the implicit operator over one step.
struct LinearCoeffs {
    double delta1, delta2, eps, eta2;
    double Rbar;  ///< mean density (hyperdiffusion linearization)
    double Rref;  ///< reference density for the implicit part of delta2 Delta^2 U
    int order;    ///< 2s + 1
};

LinearCoeffs linear_coeffs(const ScalarField& R, const ParamSet& p, double floor) {
    const double mean = integrate(R) / R.grid.volume();
    double rref = std::max(min_value(R), floor);
    if (!(rref > 0.0)) rref = 1e-10 * std::abs(mean);
    return {p.delta1, p.delta2, p.eps, p.eta2, mean, rref, 2 * p.order_s(R.grid.dim()) + 1};
}

/// Per-mode symbols: R' = -i k.M / tau^2 - aR R,  M' = -i k Q R / tau^2 - aM M.
struct ModeSymbols {
    double aR, aM, Q;
};

ModeSymbols mode_symbols(const LinearCoeffs& c, double K2, double tau2) {
    ModeSymbols s;
    s.aR = c.delta1 * K2 / tau2;
    s.aM = c.delta2 > 0.0 ? c.delta2 * K2 * K2 / (tau2 * c.Rref) : 0.0;
    s.Q = 0.25 * c.eps * c.eps * K2 + (c.eta2 > 0.0 ? c.eta2 * c.Rbar * std::pow(K2, c.order) : 0.0);
    return s;
}

SpecState linear_apply(const Grid& g, const LinearCoeffs& c, double tau, const SpecState& y) {
    const int d = g.dim();
    const double tau2 = tau * tau;
    const auto& k2 = g.k2();
    SpecState out{Spectrum(y.R.size()), std::vector<Spectrum>(d, Spectrum(y.R.size()))};
    const cplx I(0.0, 1.0);
    for (size_t i = 0; i < y.R.size(); ++i) {
        const ModeSymbols s = mode_symbols(c, k2[i], tau2);
        cplx kM = 0.0;
        for (int a = 0; a < d; ++a) kM += g.k(a)[i] * y.M[a][i];
        out.R[i] = -I * kM / tau2 - s.aR * y.R[i];
        for (int a = 0; a < d; ++a) out.M[a][i] = -I * g.k(a)[i] * s.Q * y.R[i] / tau2 - s.aM * y.M[a][i];
    }
    return out;
}

/// Solves (I - h L) x = r mode by mode.
SpecState linear_solve(const Grid& g, const LinearCoeffs& c, double tau, double h, const SpecState& r) {
    const int d = g.dim();
    const double tau2 = tau * tau;
    const double beta = h / tau2;
    const auto& k2 = g.k2();
    SpecState out = r;
    const cplx I(0.0, 1.0);
    for (size_t i = 0; i < r.R.size(); ++i) {
        const ModeSymbols s = mode_symbols(c, k2[i], tau2);
        const double A = 1.0 + h * s.aR;
        const double D = 1.0 + h * s.aM;
        double kk = 0.0;
        cplx km = 0.0;
        for (int a = 0; a < d; ++a) {
            kk += g.k(a)[i] * g.k(a)[i];
            km += g.k(a)[i] * r.M[a][i];
        }
        const double det = A * D + beta * beta * kk * s.Q;
        const cplx R = (D * r.R[i] - I * beta * km) / det;
        out.R[i] = R;
        for (int a = 0; a < d; ++a) out.M[a][i] = (r.M[a][i] - I * beta * s.Q * g.k(a)[i] * R) / D;
    }
    return out;
}

ScalarField floored(const ScalarField& R, double floor) {
    return map(R, [floor](double r) { return std::max(r, floor); });
}

/// grad R (x) grad R / R above the floor and the Hessian of R below it, so the
/// quantum stress (1/4)(grad^2 R - S) is switched off in floored cells.
TensorField korteweg_remainder(const ScalarField& R, const VectorField& gR, double floor) {
    const Grid& g = R.grid;
    const int d = g.dim();
    TensorField S = hessian(R);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (size_t i = 0; i < g.size(); ++i)
                if (R[i] > floor) S[a * d + b][i] = gR[a][i] * gR[b][i] / R[i];
    return S;
}

VectorField velocity_of(const HydroFields& h, const ScalarField& Rf) {
    VectorField U(h.R.grid);
    for (int a = 0; a < h.M.dim(); ++a)
        for (size_t i = 0; i < h.R.size(); ++i) U[a][i] = Rf[i] > 0.0 ? h.M[a][i] / Rf[i] : 0.0;
    return U;
}

/// Nonlinear part of the momentum tendency (products, dealiased) plus the
/// explicit linear terms, excluding drag: the remainder F = N - L y.
std::vector<Spectrum> explicit_momentum(const HydroFields& h, const ParamSet& p, const LinearCoeffs& c,
                                        TauValue tv, double floor) {
    const Grid& g = h.R.grid;
    const int d = g.dim();
    const size_t N = g.size();
    const double tau2 = tv.tau * tv.tau;
    const ScalarField& R = h.R;
    const ScalarField Rf = floored(R, floor);
    const VectorField U = velocity_of(h, Rf);
    const VectorField gR = gradient(R);
    const TensorField RgU = density_weighted_velocity_gradient(h.M, U, gR);

    VectorField prod(g);  // products, dealiased at the end
    // -Div(M (x) U) / tau^2
    {
        TensorField T(d * d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) T[a * d + b] = h.M[a] * U[b];
        if (p.nu > 0.0)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    for (size_t i = 0; i < N; ++i)
                        T[a * d + b][i] -= p.nu * 0.5 * (RgU[a * d + b][i] + RgU[b * d + a][i]);
        if (p.eps > 0.0) {
            const double w = 0.25 * p.eps * p.eps * (fault_injected(Fault::korteweg_sign) ? -1.0 : 1.0);
            const TensorField S = korteweg_remainder(R, gR, floor);
            for (int a = 0; a < d * d; ++a)
                for (size_t i = 0; i < N; ++i) T[a][i] += w * S[a][i];
        }
        const VectorField div = divergence(T, g);
        for (int a = 0; a < d; ++a) prod[a] = (-1.0 / tau2) * div[a];
    }
    if (p.eta1 > 0.0) {
        const ScalarField cold = map(R, [&](double r) { return std::pow(r, -p.alpha); });
        const VectorField gc = gradient(cold);
        for (int a = 0; a < d; ++a) prod[a] += p.eta1 * gc[a];
    }
    if (p.delta1 > 0.0)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (size_t i = 0; i < N; ++i)
                    if (Rf[i] > 0.0) prod[a][i] -= p.delta1 / tau2 * gR[b][i] * RgU[a * d + b][i] / Rf[i];
    if (p.delta2 > 0.0)
        for (int a = 0; a < d; ++a) prod[a] += (-p.delta2 / tau2) * bilaplacian(U[a]);
    if (p.eta2 > 0.0) {
        const VectorField gh = gradient(laplacian_power(R, c.order));
        for (int a = 0; a < d; ++a)
            for (size_t i = 0; i < N; ++i) prod[a][i] += p.eta2 / tau2 * (R[i] - c.Rbar) * gh[a][i];
    }

    const auto& keep = g.keep();
    const auto& k2 = g.k2();
    const double pressure = 1.0 - p.nu * tv.dtau / tv.tau;
    const cplx I(0.0, 1.0);
    std::vector<Spectrum> out(d);
    const Spectrum Rh = transform_forward(R);
    for (int a = 0; a < d; ++a) {
        out[a] = transform_forward(prod[a]);
        // Confinement is linear in R with a known sawtooth coefficient; truncating it would
        // add Gibbs error where the box edge cuts through nonzero density.
        const auto& y = g.y(a);
        ScalarField conf(g);
        for (size_t i = 0; i < N; ++i) conf[i] = -2.0 * y[i] * R[i];
        const Spectrum Ch = transform_forward(conf);
        const Spectrum Mh = c.delta2 > 0.0 ? transform_forward(h.M[a]) : Spectrum();
        for (size_t i = 0; i < out[a].size(); ++i) {
            if (!keep[i]) out[a][i] = 0.0;
            out[a][i] += Ch[i];
            out[a][i] -= pressure * I * g.k(a)[i] * Rh[i];
            if (c.delta2 > 0.0) out[a][i] += c.delta2 / (tau2 * c.Rref) * k2[i] * k2[i] * Mh[i];
        }
    }
    return out;
}

/// Exact flow of M' = -(r0 M / Rf + r1 R |M|^2 M / Rf^3) / tau^2 for `c` = \int tau^{-2}.
void drag_substep(HydroFields& h, const ParamSet& p, double c, double floor) {
    if (p.r0 == 0.0 && p.r1 == 0.0) return;
    const int d = h.M.dim();
    for (size_t i = 0; i < h.R.size(); ++i) {
        const double R = h.R[i];
        const double Rf = std::max(R, floor);
        if (!(Rf > 0.0)) continue;
        double m2 = 0.0;
        for (int a = 0; a < d; ++a) m2 += h.M[a][i] * h.M[a][i];
        if (m2 == 0.0) continue;
        const double ah = p.r0 / Rf;
        const double bh = p.r1 * std::max(R, 0.0) / (Rf * Rf * Rf);
        const double E = std::exp(-2.0 * ah * c);
        const double gfac = ah > 0.0 ? -std::expm1(-2.0 * ah * c) / ah : 2.0 * c;
        const double w = m2 * E / (1.0 + bh * m2 * gfac);
        const double scale = std::sqrt(w / m2);
        for (int a = 0; a < d; ++a) h.M[a][i] *= scale;
    }
}

/// \int_{t0}^{t1} tau^{-2} by 3-point Gauss-Legendre.
double inv_tau2_integral(const TauSolution& tau, double t0, double t1) {
    static constexpr std::array<double, 3> x{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double v = tau.eval(mid + half * x[k]).tau;
        acc += w[k] / (v * v);
    }
    return acc * half;
}

bool finite(const HydroFields& h) {
    if (!all_finite(h.R)) return false;
    for (const auto& m : h.M.c)
        if (!all_finite(m)) return false;
    return true;
}

void require_floor(const ScalarField& R, const ParamSet& p, double floor) {
    if (floor_violated(R, p, floor))
        throw StepError(StepError::Kind::floor_violation,
                        "density below floor: min R = " + std::to_string(min_value(R)));
}

}  // namespace

TensorField density_weighted_velocity_gradient(const VectorField& M, const VectorField& U, const VectorField& gR) {
    const int d = M.dim();
    TensorField out = gradient(M);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (size_t i = 0; i < out[a * d + b].size(); ++i) out[a * d + b][i] -= U[a][i] * gR[b][i];
    return out;
}

bool floor_violated(const ScalarField& R, const ParamSet& p, double floor) {
    const double m = min_value(R);
    return p.eta1 > 0.0 ? !(m > 0.0) : m < -floor;
}

VectorField korteweg_force(const ScalarField& R, double floor) {
    const Grid& g = R.grid;
    const int d = g.dim();
    const VectorField div = divergence(korteweg_remainder(R, gradient(R), floor), g);
    const VectorField gl = gradient(laplacian(R));
    const double sign = fault_injected(Fault::korteweg_sign) ? -1.0 : 1.0;
    VectorField out(g);
    for (int a = 0; a < d; ++a) out[a] = (0.25 * sign) * (gl[a] - div[a]);
    return out;
}

Tendency rhs(const HydroFields& h, const ParamSet& p, TauValue tau, double floor) {
    require_floor(h.R, p, floor);
    const Grid& g = h.R.grid;
    const int d = g.dim();
    const LinearCoeffs c = linear_coeffs(h.R, p, floor);
    const SpecState y = forward(h);
    const SpecState lin = linear_apply(g, c, tau.tau, y);
    const std::vector<Spectrum> ex = explicit_momentum(h, p, c, tau, floor);
    SpecState total = lin;
    for (int a = 0; a < d; ++a)
        for (size_t i = 0; i < total.R.size(); ++i) total.M[a][i] += ex[a][i];
    HydroFields out = inverse(g, total);
    if (p.r0 > 0.0 || p.r1 > 0.0) {
        const double tau2 = tau.tau * tau.tau;
        for (size_t i = 0; i < g.size(); ++i) {
            const double R = h.R[i];
            const double Rf = std::max(R, floor);
            if (!(Rf > 0.0)) continue;
            double m2 = 0.0;
            for (int a = 0; a < d; ++a) m2 += h.M[a][i] * h.M[a][i];
            const double fac = (p.r0 / Rf + p.r1 * std::max(R, 0.0) * m2 / (Rf * Rf * Rf)) / tau2;
            for (int a = 0; a < d; ++a) out.M[a][i] -= fac * h.M[a][i];
        }
    }
    return {std::move(out.R), std::move(out.M)};
}

Tendency rhs(const FluidState& s, const ParamSet& p, TauValue tau) {
    const HydroFields h = to_hydro(s);
    return rhs(h, p, tau, resolve_floor(p, integrate(h.R) / s.grid.volume()));
}

HydroFields step(const HydroFields& h0, const ParamSet& p, double t, double dt, const TauSolution& tau, double floor) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const Grid& g = h0.R.grid;
    require_floor(h0.R, p, floor);

    HydroFields h = h0;
    drag_substep(h, p, inv_tau2_integral(tau, t, t + 0.5 * dt), floor);
    const LinearCoeffs c = linear_coeffs(h.R, p, floor);

    const SpecState y0 = forward(h);
    const double t1 = t + kGamma * dt, t2 = t + (1.0 - kGamma) * dt;
    const double tau_i1 = tau.eval(t1).tau, tau_i2 = tau.eval(t2).tau;
    const TauValue te0 = tau.eval(t), te1 = tau.eval(t + dt);

    auto explicit_part = [&](const SpecState& Y, const HydroFields& Yp, TauValue tv) {
        SpecState F{Spectrum(Y.R.size(), 0.0), explicit_momentum(Yp, p, c, tv, floor)};
        return F;
    };

    const SpecState Y1 = linear_solve(g, c, tau_i1, kGamma * dt, y0);
    const SpecState K1 = linear_apply(g, c, tau_i1, Y1);
    const HydroFields Y1p = inverse(g, Y1);
    if (!finite(Y1p)) throw StepError(StepError::Kind::non_finite, "non-finite stage value");
    const SpecState F1 = explicit_part(Y1, Y1p, te0);

    const SpecState r2 = combine(y0, {{dt, &F1}, {(1.0 - 2.0 * kGamma) * dt, &K1}});
    const SpecState Y2 = linear_solve(g, c, tau_i2, kGamma * dt, r2);
    const SpecState K2 = linear_apply(g, c, tau_i2, Y2);
    const HydroFields Y2p = inverse(g, Y2);
    if (!finite(Y2p)) throw StepError(StepError::Kind::non_finite, "non-finite stage value");
    const SpecState F2 = explicit_part(Y2, Y2p, te1);

    const SpecState y1 = combine(y0, {{0.5 * dt, &F1}, {0.5 * dt, &F2}, {0.5 * dt, &K1}, {0.5 * dt, &K2}});
    HydroFields out = inverse(g, y1);
    drag_substep(out, p, inv_tau2_integral(tau, t + 0.5 * dt, t + dt), floor);
    if (!finite(out)) throw StepError(StepError::Kind::non_finite, "non-finite state after step");
    require_floor(out.R, p, floor);
    return out;
}

FluidState step(const FluidState& s, const ParamSet& p, double dt, const TauSolution& tau) {
    const HydroFields h = to_hydro(s);
    const double floor = resolve_floor(p, integrate(h.R) / s.grid.volume());
    FluidState out = from_hydro(step(h, p, s.t, dt, tau, floor), s.t + dt, s.mass_ratio);
    out.formulation = s.formulation;
    return out;
}

double cfl_dt(const HydroFields& h, const ParamSet& p, TauValue tau, double floor) {
    const Grid& g = h.R.grid;
    const int d = g.dim();
    const double kmax = g.kmax_dealiased();
    const double tau2 = tau.tau * tau.tau;
    const ScalarField Rf = floored(h.R, floor);
    double umax = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        double u2 = 0.0;
        for (int a = 0; a < d; ++a) u2 += h.M[a][i] * h.M[a][i];
        if (Rf[i] > 0.0) umax = std::max(umax, std::sqrt(u2) / Rf[i]);
    }
    double rho = umax * kmax / tau2;
    double c2 = std::abs(1.0 - p.nu * tau.dtau / tau.tau);
    if (p.eta1 > 0.0) {
        const double rmin = std::max(min_value(h.R), 1e-300);
        c2 += p.alpha * p.eta1 * std::pow(rmin, -p.alpha - 1.0) / tau2;
    }
    rho = std::max(rho, kmax * std::sqrt(c2) / tau.tau);
    rho = std::max(rho, std::sqrt(2.0 * g.ell() * std::sqrt(static_cast<double>(d)) * kmax) / tau.tau);
    rho = std::max(rho, p.nu * kmax * kmax / tau2);
    rho = std::max(rho, p.delta1 * kmax * kmax / tau2);
    if (p.eps > 0.0) {
        const VectorField gR = gradient(h.R);
        double gl = 0.0;
        for (size_t i = 0; i < g.size(); ++i) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) s += gR[a][i] * gR[a][i];
            if (Rf[i] > 0.0) gl = std::max(gl, std::sqrt(s) / Rf[i]);
        }
        rho = std::max(rho, p.eps * kmax * gl / tau2);
    }
    if (p.eta2 > 0.0) {
        const double mean = integrate(h.R) / g.volume();
        double dev = 0.0;
        for (double r : h.R.v) dev = std::max(dev, std::abs(r - mean));
        rho = std::max(rho, std::pow(kmax, 2 * p.order_s(d) + 2) * std::sqrt(p.eta2 * dev) / tau2);
    }
    const double bound = p.dt.c_cfl / rho;
    return std::min(p.dt.dt, bound);
}

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::floor_violation: return "floor_violation";
        case RunStatus::non_finite: return "non_finite";
    }
    return "unknown";
}

Trajectory run(const FluidState& initial, const ParamSet& p, const RunOptions& opts, const TauSolution& tau) {
    if (opts.t_end < initial.t) throw std::invalid_argument("run: t_end before the initial time");
    if (tau.t_max() < opts.t_end) throw std::invalid_argument("run: tau solution does not cover t_end");
    p.validate(initial.grid.dim());
    Trajectory tr;
    HydroFields h = to_hydro(initial);
    const double mean = integrate(h.R) / initial.grid.volume();
    tr.floor = resolve_floor(p, mean);
    double t = initial.t;
    const double mass_ratio = initial.mass_ratio;

    auto state_at = [&](const HydroFields& x, double tt) {
        FluidState s = from_hydro(x, tt, mass_ratio);
        s.formulation = initial.formulation;
        return s;
    };
    auto record = [&](const HydroFields& x, double tt) {
        const FluidState s = state_at(x, tt);
        tr.records.push_back(compute_record(s, p, tau.eval(tt)));
    };
    auto sample = [&](const HydroFields& x, double tt) {
        if (opts.balance) tr.balance.push_back(balance_sample(state_at(x, tt), p, tau.eval(tt)));
    };

    tr.snapshots.push_back({t, initial});
    record(h, t);
    sample(h, t);
    tr.min_density = min_value(h.R);
    tr.last = h;
    tr.t_last = t;
    if (floor_violated(h.R, p, tr.floor)) {
        tr.status = RunStatus::floor_violation;
        tr.message = "initial density below floor";
        return tr;
    }

    long k = 0;
    const double t_eps = 1e-12 * std::max(1.0, opts.t_end);
    while (opts.t_end - t > t_eps) {
        if (opts.max_steps > 0 && k >= opts.max_steps) break;
        const TauValue tv = tau.eval(t);
        double dt = p.dt.kind == DtPolicy::Kind::fixed ? p.dt.dt : cfl_dt(h, p, tv, tr.floor);
        if (t + dt > opts.t_end - t_eps) dt = opts.t_end - t;
        try {
            h = step(h, p, t, dt, tau, tr.floor);
        } catch (const StepError& e) {
            tr.status = e.kind == StepError::Kind::floor_violation ? RunStatus::floor_violation : RunStatus::non_finite;
            tr.message = e.what();
            break;
        }
        t = (opts.t_end - (t + dt) <= t_eps) ? opts.t_end : t + dt;
        ++k;
        tr.last = h;
        tr.t_last = t;
        tr.steps = k;
        tr.min_density = std::min(tr.min_density, min_value(h.R));
        sample(h, t);
        const bool done = opts.t_end - t <= t_eps;
        if (opts.diag_every > 0 && k % opts.diag_every == 0 && !done) record(h, t);
        if (opts.snapshot_every > 0 && k % opts.snapshot_every == 0 && !done) tr.snapshots.push_back({t, state_at(h, t)});
    }
    if (tr.t_last > tr.snapshots.back().t) {
        record(tr.last, tr.t_last);
        tr.snapshots.push_back({tr.t_last, state_at(tr.last, tr.t_last)});
    }
    return tr;
}

Trajectory run(const FluidState& initial, const ParamSet& p, const RunOptions& opts) {
    const TauSolution tau = tau_solve(std::max(opts.t_end, 1e-6) * 1.01 + 1e-3, 1e-12, 1e-14);
    return run(initial, p, opts, tau);
}

}  // namespace qnsk
